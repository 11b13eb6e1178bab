#pragma once

// Masked splitting with linearization and damping.
//
// For a permuted hardware mask M' the coupling matrix is split as
//   A = A_quad + A_lin,   A_quad = M' (.) A,
// and each step solves
//   s+ = argmin_s  s^T A_quad s + <b + 2 A_lin s_prev, s> - lambda <s, s_prev>
// on the hardware-sized subproblem (A_quad, linear term). The mask is
// permuted while the problem stays fixed, so iterates live in the problem's
// own index space.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qsplit/ising.hpp"
#include "qsplit/rng.hpp"
#include "qsplit/subsolver.hpp"
#include "qsplit/topology.hpp"
#include "qsplit/trace.hpp"

namespace qsplit {

struct SplitPair {
    SymmetricMatrix quad; // supported on permuted-mask edges only
    SymmetricMatrix lin;  // A - quad, including the whole diagonal
};

enum class LambdaMode {
    scan,      // sign-change candidates, one sampler call per candidate
    fixed,     // one call with a user-supplied lambda
    monotone,  // one call with lambda = 2 ||A_lin||_2
    zero,      // lambda = 0 and a fresh permutation for every subiteration
};

struct LambdaPolicy {
    LambdaMode mode = LambdaMode::scan;
    double value = 0.0; // used by LambdaMode::fixed

    /// "scan", "fixed:<v>", "monotone" or "zero".
    static LambdaPolicy parse(const std::string& text);
    std::string to_string() const;
};

struct SplitConfig {
    int maxiter = 25;
    int maxsubiter = 15;
    LambdaPolicy lambda;
    /// Use 2 A_lin s_prev as the gradient term; false drops the factor 2.
    bool gradient_factor_two = true;
    /// Constant c added to the diagonal (energy-neutral relaxation shift).
    double diagonal_shift = 0.0;
    std::uint64_t seed = 0;

    void validate() const;
};

struct IterationState {
    SpinVector current;
    double current_energy = 0.0;
    SpinVector best;
    double best_energy = 0.0;
    int iteration = 0;
    int calls = 0; // inner-solver calls so far

    static IterationState start(const IsingModel& model, SpinVector s);
    /// Adopts `s` as best when its energy is <= the incumbent's.
    void offer(const SpinVector& s, double e);
};

struct RunResult {
    IterationState state;
    std::vector<TraceRow> rows;
};

SplitPair split(const IsingModel& model, const HardwareMask& mask, const Permutation& p);

/// Subproblem (B, c) with B = pair.quad and
/// c = bias + g A_lin s_prev - lambda s_prev, g = 2 (or 1 without the factor).
IsingModel linearized_subproblem(const SplitPair& pair, std::span<const double> bias,
                                 const SpinVector& s_prev, double lambda,
                                 bool gradient_factor_two = true);

/// The lambda-free linear coefficient bias + g A_lin s_prev.
std::vector<double> linear_coefficient(const SplitPair& pair, std::span<const double> bias,
                                       const SpinVector& s_prev, bool gradient_factor_two = true);

/// Sign-change lambda candidates: midpoints of consecutive sorted |L| values
/// padded with 0 below and twice the largest above, duplicates collapsed,
/// then every ceil(count / maxsubiter)-th value starting at the smallest.
std::vector<double> lambda_candidates(std::span<const double> linear_term, int maxsubiter);
std::vector<double> lambda_candidates(const SplitPair& pair, std::span<const double> bias,
                                      const SpinVector& s_prev, int maxsubiter,
                                      bool gradient_factor_two = true);

/// 2 ||A_lin||_2 by power iteration on A_lin^2; a damping at least this
/// large makes exact-solver iterates non-increasing in energy.
double monotone_lambda(const SplitPair& pair);

struct PowerIterationOptions {
    int max_iterations = 1000;
    double relative_tolerance = 1e-6;
};
double spectral_norm(const SymmetricMatrix& m, const PowerIterationOptions& opts = {});

/// s^T A_lin s - s_prev^T A_lin s_prev - 2 s_prev^T A_lin (s - s_prev).
double linearization_gap(const SplitPair& pair, const SpinVector& s, const SpinVector& s_prev);
/// (s - s_prev)^T A_lin (s - s_prev); equal to linearization_gap.
double linearization_gap_quadratic(const SplitPair& pair, const SpinVector& s, const SpinVector& s_prev);

/// Mutable context shared by the steps of one run.
struct SplitContext {
    Rng permutation_rng;
    std::uint64_t call_seed_base;
};

/// One outer iteration: draws a permutation, tries the lambda values of the
/// configured mode and moves to the best result. In scan and zero modes the
/// incumbent s_prev competes too and ties go to the newer vector; in fixed
/// and monotone modes the single sampler result becomes the next iterate.
IterationState split_step(const IsingModel& model, const HardwareMask& mask, const IterationState& state,
                          const SplitConfig& cfg, Sampler& sampler, SplitContext& ctx,
                          TraceRecorder& trace);

/// maxiter outer iterations from a seeded uniform random start.
RunResult run_splitting(const IsingModel& model, const HardwareMask& mask, const SplitConfig& cfg,
                        Sampler& sampler);

struct SaRegConfig {
    double temperature_c = 1.0;
    std::size_t subset_size = 4;
};

/// Simulated-annealing-like regularized step (experimental): with a random
/// index set J and s_N the vector s_prev flipped on J, minimizes
///   s^T A s + b^T s + sum_{i in J} (exp(-(E(s_N) - E(s_prev)) / T) - R) s_i s_prev_i
/// over s agreeing with s_prev outside J, T = c / log(1 + k), R ~ U[0, 1].
IterationState sa_reg_step(const IsingModel& model, const IterationState& state, const SaRegConfig& cfg,
                           int k, Sampler& sampler, Rng& rng);

/// The weight exp(-delta / T) - r attached to s_i s_prev_i.
double sa_reg_weight(double delta_energy, double temperature, double r);

} // namespace qsplit
