#include "qsplit/subsolver.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "qsplit/rng.hpp"

namespace qsplit {

void SolverConfig::validate() const {
    if (num_reads < 1) throw std::invalid_argument("num_reads must be >= 1");
    if (sweeps < 1) throw std::invalid_argument("sweeps must be >= 1");
    if (!(beta_start > 0.0) || !(beta_start < beta_end)) {
        throw std::invalid_argument("beta schedule must satisfy 0 < beta_start < beta_end");
    }
}

namespace {

// Off-diagonal couplings in CSR form; the diagonal never affects flips.
struct FlatCouplings {
    std::vector<std::size_t> start;
    std::vector<std::size_t> col;
    std::vector<double> value;

    explicit FlatCouplings(const SymmetricMatrix& m) : start(m.size() + 1, 0) {
        for (std::size_t i = 0; i < m.size(); ++i) {
            for (const auto& e : m.row(i)) {
                if (e.col == i) continue;
                col.push_back(e.col);
                value.push_back(e.value);
            }
            start[i + 1] = col.size();
        }
    }
};

class FieldState {
public:
    FieldState(const FlatCouplings& flat, const std::vector<double>& bias, std::vector<int> spins)
        : flat_(flat), bias_(bias), s_(std::move(spins)), h_(s_.size()) {
        refresh();
    }

    void refresh() {
        for (std::size_t i = 0; i < s_.size(); ++i) {
            double acc = 0.0;
            for (std::size_t p = flat_.start[i]; p < flat_.start[i + 1]; ++p) acc += flat_.value[p] * s_[flat_.col[p]];
            h_[i] = 2.0 * acc + bias_[i];
        }
    }

    double delta(std::size_t i) const { return -2.0 * s_[i] * h_[i]; }
    int spin(std::size_t i) const { return s_[i]; }

    void flip(std::size_t i) {
        s_[i] = -s_[i];
        const double push = 4.0 * s_[i];
        for (std::size_t p = flat_.start[i]; p < flat_.start[i + 1]; ++p) h_[flat_.col[p]] += push * flat_.value[p];
    }

    const std::vector<int>& spins() const { return s_; }

private:
    const FlatCouplings& flat_;
    const std::vector<double>& bias_;
    std::vector<int> s_;
    std::vector<double> h_;
};

double beta_at(const SolverConfig& cfg, int sweep) {
    if (cfg.sweeps == 1) return cfg.beta_end;
    const double t = static_cast<double>(sweep) / static_cast<double>(cfg.sweeps - 1);
    if (cfg.schedule == BetaScheduleKind::geometric) {
        return cfg.beta_start * std::pow(cfg.beta_end / cfg.beta_start, t);
    }
    return cfg.beta_start + (cfg.beta_end - cfg.beta_start) * t;
}

void quench(FieldState& state, std::size_t n) {
    state.refresh();
    constexpr int kMaxPasses = 1000;
    for (int pass = 0; pass < kMaxPasses; ++pass) {
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = state.delta(i);
            if (d < 0.0 || (d == 0.0 && state.spin(i) == -1)) {
                state.flip(i);
                changed = true;
            }
        }
        if (!changed) return;
    }
}

} // namespace

SpinVector sa_solve(const IsingModel& problem, const SolverConfig& cfg) {
    cfg.validate();
    const std::size_t n = problem.size();
    const FlatCouplings flat(problem.couplings());
    std::vector<double> betas(static_cast<std::size_t>(cfg.sweeps));
    for (int t = 0; t < cfg.sweeps; ++t) betas[static_cast<std::size_t>(t)] = beta_at(cfg, t);

    SpinVector best;
    double best_energy = 0.0;
    for (int read = 0; read < cfg.num_reads; ++read) {
        Rng rng = make_rng(derive_seed(cfg.seed, streams::kAnnealRead), static_cast<std::uint64_t>(read));
        std::vector<int> init(n);
        for (auto& v : init) v = random_spin(rng);
        FieldState state(flat, problem.biases(), std::move(init));
        for (double beta : betas) {
            for (std::size_t i = 0; i < n; ++i) {
                const double d = state.delta(i);
                if (d <= 0.0 || uniform_unit(rng) < std::exp(-beta * d)) state.flip(i);
            }
        }
        quench(state, n);
        SpinVector candidate(std::span<const int>(state.spins()));
        const double e = energy(problem, candidate);
        if (read == 0 || e < best_energy) {
            best = std::move(candidate);
            best_energy = e;
        }
    }
    return best;
}

BruteForceResult brute_force_solve(const IsingModel& problem) {
    const std::size_t n = problem.size();
    if (n > kBruteForceMaxSize) {
        throw std::invalid_argument("brute_force_solve: n = " + std::to_string(n) + " exceeds limit " +
                                    std::to_string(kBruteForceMaxSize));
    }
    const FlatCouplings flat(problem.couplings());
    FieldState state(flat, problem.biases(), std::vector<int>(n, -1));

    SpinVector current(std::span<const int>(state.spins()));
    SpinVector best = current;
    double best_exact = energy(problem, current);
    double running = best_exact;

    const std::uint64_t total = std::uint64_t{1} << n;
    for (std::uint64_t g = 1; g < total; ++g) {
        const auto i = static_cast<std::size_t>(std::countr_zero(g));
        running += state.delta(i);
        state.flip(i);
        current.flip(i);
        const double scale = std::max(1.0, std::abs(best_exact));
        if (running > best_exact + 1e-9 * scale) continue;
        // near the incumbent: decide on exact energies
        const double exact = energy(problem, current);
        running = exact;
        if (energies_equal(exact, best_exact)) {
            if (current.lexicographically_less(best)) {
                best = current;
                best_exact = std::min(best_exact, exact);
            }
        } else if (exact < best_exact) {
            best = current;
            best_exact = exact;
        }
    }
    return {best, energy(problem, best)};
}

IsingModel restrict_to_mask(const IsingModel& model, const HardwareMask& mask) {
    if (mask.size() != model.size()) throw std::invalid_argument("restrict_to_mask: size mismatch");
    std::vector<Triplet> kept;
    for (std::size_t i = 0; i < model.size(); ++i) {
        for (const auto& e : model.couplings().row(i)) {
            if (e.col < i) continue;
            if (e.col == i || mask.has_edge(i, e.col)) kept.push_back({i, e.col, e.value});
        }
    }
    return IsingModel(SymmetricMatrix::from_symmetric_terms(model.size(), kept), model.biases(),
                      model.offset());
}

bool respects_mask(const IsingModel& problem, const HardwareMask& mask) {
    if (mask.size() != problem.size()) return false;
    for (std::size_t i = 0; i < problem.size(); ++i) {
        for (const auto& e : problem.couplings().row(i)) {
            if (e.col != i && !mask.has_edge(i, e.col)) return false;
        }
    }
    return true;
}

SpinVector restricted_sa_solve(const IsingModel& model, const HardwareMask& mask, const SolverConfig& cfg) {
    return sa_solve(restrict_to_mask(model, mask), cfg);
}

AnnealingSampler::AnnealingSampler(SolverConfig cfg) : cfg_(cfg) { cfg_.validate(); }

SpinVector AnnealingSampler::sample(const IsingModel& problem, std::uint64_t seed) {
    SolverConfig cfg = cfg_;
    cfg.seed = seed;
    return sa_solve(problem, cfg);
}

SpinVector ExhaustiveSampler::sample(const IsingModel& problem, std::uint64_t) {
    return brute_force_solve(problem).spins;
}

SpinVector CallbackSampler::sample(const IsingModel& problem, std::uint64_t seed) { return fn_(problem, seed); }

SpinVector checked_sample(Sampler& sampler, const IsingModel& problem, std::uint64_t seed) {
    SpinVector out = sampler.sample(problem, seed);
    if (out.size() != problem.size()) {
        throw std::runtime_error("sampler '" + sampler.name() + "' returned " + std::to_string(out.size()) +
                                 " spins for a problem of size " + std::to_string(problem.size()));
    }
    return out;
}

} // namespace qsplit
