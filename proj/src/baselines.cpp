#include "qsplit/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "qsplit/rng.hpp"

namespace qsplit {

ReducedProblem lnls_subproblem(const IsingModel& model, const SpinVector& s_prev,
                               std::span<const std::size_t> j_set) {
    const std::size_t n = model.size();
    if (s_prev.size() != n) throw std::invalid_argument("lnls_subproblem: dimension mismatch");
    if (j_set.empty()) throw std::invalid_argument("lnls_subproblem: empty index set");
    std::vector<std::size_t> position(n, SIZE_MAX);
    for (std::size_t k = 0; k < j_set.size(); ++k) {
        if (j_set[k] >= n) throw std::out_of_range("lnls_subproblem: index out of range");
        if (position[j_set[k]] != SIZE_MAX) throw std::invalid_argument("lnls_subproblem: repeated index");
        position[j_set[k]] = k;
    }

    const auto& a = model.couplings();
    const auto& b = model.biases();
    std::vector<Triplet> terms;
    std::vector<double> c(j_set.size());
    for (std::size_t k = 0; k < j_set.size(); ++k) {
        const std::size_t i = j_set[k];
        double frozen = 0.0;
        for (const auto& e : a.row(i)) {
            const std::size_t pj = position[e.col];
            if (pj == SIZE_MAX) {
                frozen += e.value * s_prev[e.col];
            } else if (k <= pj) {
                terms.push_back({k, pj, e.value});
            }
        }
        c[k] = b[i] + 2.0 * frozen;
    }

    // constant: everything among frozen variables
    double constant = model.offset();
    for (std::size_t i = 0; i < n; ++i) {
        if (position[i] != SIZE_MAX) continue;
        double acc = 0.0;
        for (const auto& e : a.row(i)) {
            if (position[e.col] == SIZE_MAX) acc += e.value * s_prev[e.col];
        }
        constant += s_prev[i] * acc + b[i] * s_prev[i];
    }

    return {IsingModel(SymmetricMatrix::from_symmetric_terms(j_set.size(), terms), std::move(c), constant),
            std::vector<std::size_t>(j_set.begin(), j_set.end())};
}

SpinVector write_back(const ReducedProblem& reduced, const SpinVector& s_prev, const SpinVector& sub_solution) {
    if (sub_solution.size() != reduced.indices.size()) throw std::invalid_argument("write_back: size mismatch");
    SpinVector out = s_prev;
    for (std::size_t k = 0; k < reduced.indices.size(); ++k) out.set(reduced.indices[k], sub_solution[k]);
    return out;
}

SpinVector lnls_step(const IsingModel& model, const SpinVector& s_prev, std::span<const std::size_t> j_set,
                     Sampler& sampler, std::uint64_t seed) {
    if (j_set.empty()) return s_prev;
    const auto reduced = lnls_subproblem(model, s_prev, j_set);
    return write_back(reduced, s_prev, checked_sample(sampler, reduced.problem, seed));
}

std::vector<std::size_t> random_subset(std::size_t n, std::size_t m, Rng& rng) {
    if (m > n) throw std::invalid_argument("random_subset: m > n");
    // partial Fisher-Yates
    std::vector<std::size_t> pool(n);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    for (std::size_t i = 0; i < m; ++i) {
        const auto j = i + static_cast<std::size_t>(uniform_index(rng, n - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(m);
    std::sort(pool.begin(), pool.end());
    return pool;
}

RunResult lnls_run(const IsingModel& model, const LnlsConfig& cfg, Sampler& sampler) {
    const std::size_t n = model.size();
    if (cfg.m < 1 || cfg.m > n) throw std::invalid_argument("LNLS requires 1 <= m <= n");
    if (cfg.maxiter < 0) throw std::invalid_argument("LNLS maxiter must be >= 0");

    Rng init_rng = make_rng(cfg.seed, streams::kInitialState);
    std::vector<int> init(n);
    for (auto& v : init) v = random_spin(init_rng);
    IterationState state = IterationState::start(model, SpinVector(std::span<const int>(init)));

    TraceRecorder trace;
    trace.record(0, 0, std::nullopt, state.current_energy, state.best_energy);
    Rng subset_rng = make_rng(cfg.seed, streams::kSubset);
    const std::uint64_t call_base = derive_seed(cfg.seed, streams::kSamplerCall);
    for (int it = 1; it <= cfg.maxiter; ++it) {
        const auto j_set = random_subset(n, cfg.m, subset_rng);
        SpinVector next = lnls_step(model, state.current, j_set, sampler,
                                    derive_seed(call_base, static_cast<std::uint64_t>(state.calls)));
        ++state.calls;
        state.iteration = it;
        state.current_energy = energy(model, next);
        state.current = std::move(next);
        state.offer(state.current, state.current_energy);
        trace.record(it, 0, std::nullopt, state.current_energy, state.best_energy);
    }
    return {std::move(state), std::move(trace).take()};
}

KOptResult k_opt(const IsingModel& model, const SpinVector& start, int k, int max_scans) {
    if (k != 1 && k != 2) throw std::invalid_argument("k_opt supports k = 1 or 2");
    const std::size_t n = model.size();
    if (start.size() != n) throw std::invalid_argument("k_opt: dimension mismatch");

    const auto& a = model.couplings();
    SpinVector s = start;
    std::vector<double> h = local_fields(model, s);
    double e = energy(model, s);

    TraceRecorder trace;
    trace.record(0, 0, std::nullopt, e, e);
    int scans = 0;
    std::vector<double> delta(n);
    while (max_scans < 0 || scans < max_scans) {
        ++scans;
        for (std::size_t i = 0; i < n; ++i) delta[i] = -2.0 * s[i] * h[i];

        // moves must beat the tie tolerance so rounding cannot cause cycling
        double best_gain = -kEnergyTieTolerance * std::max(1.0, std::abs(e));
        std::size_t best_i = SIZE_MAX;
        std::size_t best_j = SIZE_MAX;
        for (std::size_t i = 0; i < n; ++i) {
            if (delta[i] < best_gain) {
                best_gain = delta[i];
                best_i = i;
                best_j = SIZE_MAX;
            }
        }
        if (k == 2) {
            // pair (i, j): delta_i + delta_j + 8 A_ij s_i s_j
            std::vector<double> coupling_row(n, 0.0);
            for (std::size_t i = 0; i < n; ++i) {
                for (const auto& en : a.row(i)) coupling_row[en.col] = en.value;
                for (std::size_t j = i + 1; j < n; ++j) {
                    const double d = delta[i] + delta[j] + 8.0 * coupling_row[j] * s[i] * s[j];
                    if (d < best_gain) {
                        best_gain = d;
                        best_i = i;
                        best_j = j;
                    }
                }
                for (const auto& en : a.row(i)) coupling_row[en.col] = 0.0;
            }
        }
        if (best_i == SIZE_MAX) {
            trace.record(scans, 0, std::nullopt, e, e);
            break;
        }
        for (std::size_t idx : {best_i, best_j}) {
            if (idx == SIZE_MAX) continue;
            s.flip(idx);
            const double push = 4.0 * s[idx];
            for (const auto& en : a.row(idx)) {
                if (en.col != idx) h[en.col] += push * en.value;
            }
        }
        e = energy(model, s);
        trace.record(scans, 0, std::nullopt, e, e);
    }
    return {s, e, scans, std::move(trace).take()};
}

} // namespace qsplit
