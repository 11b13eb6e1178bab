#include "qsplit/splitting.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qsplit/baselines.hpp"

namespace qsplit {

// ---------------------------------------------------------------------------
// Configuration

LambdaPolicy LambdaPolicy::parse(const std::string& text) {
    if (text == "scan") return {LambdaMode::scan, 0.0};
    if (text == "monotone") return {LambdaMode::monotone, 0.0};
    if (text == "zero") return {LambdaMode::zero, 0.0};
    constexpr std::string_view prefix = "fixed:";
    if (text.rfind(prefix, 0) == 0) {
        const std::string number = text.substr(prefix.size());
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(number, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != number.size() || !(v >= 0.0)) {
            throw std::invalid_argument("fixed lambda must be a non-negative number: " + text);
        }
        return {LambdaMode::fixed, v};
    }
    throw std::invalid_argument("unknown lambda mode '" + text + "' (scan|fixed:<v>|monotone|zero)");
}

std::string LambdaPolicy::to_string() const {
    switch (mode) {
    case LambdaMode::scan: return "scan";
    case LambdaMode::monotone: return "monotone";
    case LambdaMode::zero: return "zero";
    case LambdaMode::fixed: {
        std::string s = std::to_string(value);
        s.erase(s.find_last_not_of('0') + 1);
        if (!s.empty() && s.back() == '.') s.pop_back();
        return "fixed:" + s;
    }
    }
    return {};
}

void SplitConfig::validate() const {
    if (maxiter < 0) throw std::invalid_argument("maxiter must be >= 0");
    if (maxsubiter < 1) throw std::invalid_argument("maxsubiter must be >= 1");
    if (lambda.mode == LambdaMode::fixed && !(lambda.value >= 0.0)) {
        throw std::invalid_argument("fixed lambda must be >= 0");
    }
}

IterationState IterationState::start(const IsingModel& model, SpinVector s) {
    IterationState st;
    st.current_energy = energy(model, s);
    st.best_energy = st.current_energy;
    st.best = s;
    st.current = std::move(s);
    return st;
}

void IterationState::offer(const SpinVector& s, double e) {
    if (e <= best_energy) {
        best = s;
        best_energy = e;
    }
}

// ---------------------------------------------------------------------------
// Splitting primitives

SplitPair split(const IsingModel& model, const HardwareMask& mask, const Permutation& p) {
    const std::size_t n = model.size();
    if (mask.size() != n || p.size() != n) throw std::invalid_argument("split: size mismatch");
    std::vector<Triplet> quad;
    std::vector<Triplet> lin;
    for (std::size_t i = 0; i < n; ++i) {
        for (const auto& e : model.couplings().row(i)) {
            if (e.col < i) continue;
            // permuted mask entry M'[i][j] = M[p(i)][p(j)]
            const bool on_hardware = e.col != i && mask.has_edge(p[i], p[e.col]);
            (on_hardware ? quad : lin).push_back({i, e.col, e.value});
        }
    }
    return {SymmetricMatrix::from_symmetric_terms(n, quad), SymmetricMatrix::from_symmetric_terms(n, lin)};
}

std::vector<double> linear_coefficient(const SplitPair& pair, std::span<const double> bias,
                                       const SpinVector& s_prev, bool gradient_factor_two) {
    if (bias.size() != pair.lin.size()) throw std::invalid_argument("linear_coefficient: dimension mismatch");
    auto g = pair.lin.multiply(s_prev);
    const double factor = gradient_factor_two ? 2.0 : 1.0;
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = bias[i] + factor * g[i];
    return g;
}

IsingModel linearized_subproblem(const SplitPair& pair, std::span<const double> bias, const SpinVector& s_prev,
                                 double lambda, bool gradient_factor_two) {
    if (!(lambda >= 0.0)) throw std::invalid_argument("lambda must be >= 0");
    auto c = linear_coefficient(pair, bias, s_prev, gradient_factor_two);
    for (std::size_t i = 0; i < c.size(); ++i) c[i] -= lambda * s_prev[i];
    return IsingModel(pair.quad, std::move(c));
}

std::vector<double> lambda_candidates(std::span<const double> linear_term, int maxsubiter) {
    if (maxsubiter < 1) throw std::invalid_argument("maxsubiter must be >= 1");
    std::vector<double> v;
    v.reserve(linear_term.size() + 2);
    v.push_back(0.0);
    for (double x : linear_term) v.push_back(std::abs(x));
    std::sort(v.begin() + 1, v.end());
    v.push_back(2.0 * v.back());

    std::vector<double> midpoints;
    midpoints.reserve(v.size() - 1);
    for (std::size_t i = 0; i + 1 < v.size(); ++i) {
        const double mid = 0.5 * (v[i] + v[i + 1]);
        if (midpoints.empty() || midpoints.back() != mid) midpoints.push_back(mid);
    }
    const std::size_t count = midpoints.size();
    const std::size_t stride = (count + static_cast<std::size_t>(maxsubiter) - 1) / static_cast<std::size_t>(maxsubiter);
    std::vector<double> out;
    for (std::size_t i = 0; i < count; i += stride) out.push_back(midpoints[i]);
    return out;
}

std::vector<double> lambda_candidates(const SplitPair& pair, std::span<const double> bias, const SpinVector& s_prev,
                                      int maxsubiter, bool gradient_factor_two) {
    const auto l = linear_coefficient(pair, bias, s_prev, gradient_factor_two);
    return lambda_candidates(l, maxsubiter);
}

double spectral_norm(const SymmetricMatrix& m, const PowerIterationOptions& opts) {
    const std::size_t n = m.size();
    if (n == 0 || m.is_zero()) return 0.0;
    // fixed pseudo-random start so the estimate is deterministic
    Rng rng(0x5eed5eedULL);
    std::vector<double> v(n);
    for (auto& x : v) x = uniform_unit(rng) + 0.5;
    auto normalize = [](std::vector<double>& x) {
        double norm = 0.0;
        for (double y : x) norm += y * y;
        norm = std::sqrt(norm);
        if (norm > 0.0) {
            for (double& y : x) y /= norm;
        }
        return norm;
    };
    normalize(v);
    double sigma = 0.0;
    for (int it = 0; it < opts.max_iterations; ++it) {
        auto w = m.multiply(v);
        const double next = normalize(w); // ||A v|| for unit v
        auto u = m.multiply(w);
        if (normalize(u) == 0.0) return next;
        v = std::move(u);
        if (it > 0 && std::abs(next - sigma) <= opts.relative_tolerance * next) {
            sigma = next;
            break;
        }
        sigma = next;
    }
    // one more Rayleigh evaluation on the final vector
    auto w = m.multiply(v);
    double norm = 0.0;
    for (double y : w) norm += y * y;
    return std::max(sigma, std::sqrt(norm));
}

double monotone_lambda(const SplitPair& pair) { return 2.0 * spectral_norm(pair.lin); }

double linearization_gap(const SplitPair& pair, const SpinVector& s, const SpinVector& s_prev) {
    const auto& lin = pair.lin;
    const auto lin_prev = lin.multiply(s_prev);
    double cross = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) cross += lin_prev[i] * (s[i] - s_prev[i]);
    return lin.quadratic_form(s) - lin.quadratic_form(s_prev) - 2.0 * cross;
}

double linearization_gap_quadratic(const SplitPair& pair, const SpinVector& s, const SpinVector& s_prev) {
    if (s.size() != s_prev.size()) throw std::invalid_argument("linearization_gap: dimension mismatch");
    std::vector<double> d(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) d[i] = s[i] - s_prev[i];
    return pair.lin.quadratic_form(d);
}

// ---------------------------------------------------------------------------
// Iteration

namespace {

struct Attempt {
    SpinVector spins;
    double energy;
};

Attempt call_sampler(const IsingModel& model, const SplitPair& pair, const SpinVector& s_prev, double lambda,
                     const SplitConfig& cfg, Sampler& sampler, SplitContext& ctx, IterationState& next) {
    const auto sub = linearized_subproblem(pair, model.biases(), s_prev, lambda, cfg.gradient_factor_two);
    SpinVector x = checked_sample(sampler, sub, derive_seed(ctx.call_seed_base, static_cast<std::uint64_t>(next.calls)));
    ++next.calls;
    const double e = energy(model, x);
    next.offer(x, e);
    return {std::move(x), e};
}

} // namespace

IterationState split_step(const IsingModel& model, const HardwareMask& mask, const IterationState& state,
                          const SplitConfig& cfg, Sampler& sampler, SplitContext& ctx, TraceRecorder& trace) {
    if (mask.size() != model.size()) throw std::invalid_argument("split_step: mask size != model size");
    IterationState next = state;
    next.iteration = state.iteration + 1;
    const SpinVector& s_prev = state.current;

    auto record = [&](int sub, double lambda, double e) {
        trace.record(next.iteration, sub, lambda, e, next.best_energy);
    };

    switch (cfg.lambda.mode) {
    case LambdaMode::scan:
    case LambdaMode::zero: {
        // incumbent competes; ties go to the newer vector
        SpinVector x_best = s_prev;
        double e_best = state.current_energy;
        const bool scan = cfg.lambda.mode == LambdaMode::scan;
        std::vector<double> lambdas;
        SplitPair pair;
        if (scan) {
            pair = split(model, mask, random_permutation(model.size(), ctx.permutation_rng));
            lambdas = lambda_candidates(pair, model.biases(), s_prev, cfg.maxsubiter, cfg.gradient_factor_two);
        } else {
            lambdas.assign(static_cast<std::size_t>(cfg.maxsubiter), 0.0);
        }
        for (std::size_t sub = 0; sub < lambdas.size(); ++sub) {
            if (!scan) pair = split(model, mask, random_permutation(model.size(), ctx.permutation_rng));
            auto attempt = call_sampler(model, pair, s_prev, lambdas[sub], cfg, sampler, ctx, next);
            record(static_cast<int>(sub), lambdas[sub], attempt.energy);
            if (e_best >= attempt.energy) {
                e_best = attempt.energy;
                x_best = std::move(attempt.spins);
            }
        }
        next.current = std::move(x_best);
        next.current_energy = e_best;
        break;
    }
    case LambdaMode::fixed:
    case LambdaMode::monotone: {
        const auto pair = split(model, mask, random_permutation(model.size(), ctx.permutation_rng));
        const double lambda = cfg.lambda.mode == LambdaMode::fixed ? cfg.lambda.value : monotone_lambda(pair);
        auto attempt = call_sampler(model, pair, s_prev, lambda, cfg, sampler, ctx, next);
        record(0, lambda, attempt.energy);
        next.current = std::move(attempt.spins);
        next.current_energy = attempt.energy;
        break;
    }
    }
    return next;
}

RunResult run_splitting(const IsingModel& input, const HardwareMask& mask, const SplitConfig& cfg, Sampler& sampler) {
    cfg.validate();
    if (mask.size() != input.size()) throw std::invalid_argument("run_splitting: mask size != model size");
    const IsingModel model = cfg.diagonal_shift == 0.0 ? input : apply_diagonal_shift(input, cfg.diagonal_shift);

    Rng init_rng = make_rng(cfg.seed, streams::kInitialState);
    std::vector<int> init(model.size());
    for (auto& v : init) v = random_spin(init_rng);
    IterationState state = IterationState::start(model, SpinVector(std::span<const int>(init)));

    TraceRecorder trace;
    trace.record(0, 0, std::nullopt, state.current_energy, state.best_energy);
    SplitContext ctx{make_rng(cfg.seed, streams::kPermutation), derive_seed(cfg.seed, streams::kSamplerCall)};
    for (int k = 0; k < cfg.maxiter; ++k) state = split_step(model, mask, state, cfg, sampler, ctx, trace);
    return {std::move(state), std::move(trace).take()};
}

// ---------------------------------------------------------------------------
// Regularized (non-monotone) step

double sa_reg_weight(double delta_energy, double temperature, double r) {
    const double exponent = std::min(-delta_energy / temperature, 700.0);
    return std::exp(exponent) - r;
}

IterationState sa_reg_step(const IsingModel& model, const IterationState& state, const SaRegConfig& cfg, int k,
                           Sampler& sampler, Rng& rng) {
    if (k < 1) throw std::invalid_argument("sa_reg_step: k must be >= 1");
    if (!(cfg.temperature_c > 0.0)) throw std::invalid_argument("sa_reg_step: temperature constant must be > 0");
    IterationState next = state;
    next.iteration = state.iteration + 1;
    const std::size_t m = std::min(cfg.subset_size, model.size());
    if (m == 0) return next;

    const SpinVector& s_prev = state.current;
    const auto j_set = random_subset(model.size(), m, rng);
    SpinVector s_neighbor = s_prev;
    for (std::size_t i : j_set) s_neighbor.flip(i);
    const double temperature = cfg.temperature_c / std::log(1.0 + static_cast<double>(k));
    const double weight = sa_reg_weight(energy(model, s_neighbor) - state.current_energy, temperature, uniform_unit(rng));

    const auto reduced = lnls_subproblem(model, s_prev, j_set);
    auto c = reduced.problem.biases();
    for (std::size_t t = 0; t < j_set.size(); ++t) c[t] += weight * s_prev[j_set[t]];
    const IsingModel augmented(reduced.problem.couplings(), std::move(c), reduced.problem.offset());

    const SpinVector sub = checked_sample(sampler, augmented, rng());
    ++next.calls;
    next.current = write_back(reduced, s_prev, sub);
    next.current_energy = energy(model, next.current);
    next.offer(next.current, next.current_energy);
    return next;
}

} // namespace qsplit
