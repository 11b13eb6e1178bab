#pragma once

// Comparison methods: large-neighborhood local search over random index
// sets and steepest-descent k-Opt for k in {1, 2}.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "qsplit/ising.hpp"
#include "qsplit/splitting.hpp"
#include "qsplit/subsolver.hpp"
#include "qsplit/trace.hpp"

namespace qsplit {

struct LnlsConfig {
    std::size_t m = 10;
    int maxiter = 25;
    std::uint64_t seed = 0;
};

/// Model restricted to the variables in `indices` with everything else
/// frozen at s_prev. The offset carries the frozen part, so
/// energy(problem, s_J) == energy(full, write_back(s_J)).
struct ReducedProblem {
    IsingModel problem;
    std::vector<std::size_t> indices;
};

/// B = A[J, J], c_i = b_i + 2 sum_{j not in J} A_ij s_prev_j. Throws on an
/// empty or repeated index set.
ReducedProblem lnls_subproblem(const IsingModel& model, const SpinVector& s_prev,
                               std::span<const std::size_t> j_set);

SpinVector write_back(const ReducedProblem& reduced, const SpinVector& s_prev, const SpinVector& sub_solution);

/// Solve the reduced problem on j_set and write back; empty j_set is a no-op.
SpinVector lnls_step(const IsingModel& model, const SpinVector& s_prev, std::span<const std::size_t> j_set,
                     Sampler& sampler, std::uint64_t seed);

/// m distinct indices, uniform without replacement.
std::vector<std::size_t> random_subset(std::size_t n, std::size_t m, Rng& rng);

RunResult lnls_run(const IsingModel& model, const LnlsConfig& cfg, Sampler& sampler);

struct KOptResult {
    SpinVector spins;
    double energy;
    int scans;
    std::vector<TraceRow> rows;
};

/// Steepest descent over all vectors within Hamming distance k (k = 1 or 2):
/// each scan evaluates the whole neighborhood and moves to the best strictly
/// improving neighbor (lowest index on ties). One trace row per scan.
/// max_scans < 0 means no limit.
KOptResult k_opt(const IsingModel& model, const SpinVector& start, int k, int max_scans = -1);

} // namespace qsplit
