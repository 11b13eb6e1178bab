#pragma once

// Inner solvers S(B, c) = argmin_s s^T B s + c^T s for the masked or reduced
// subproblems. A subproblem is carried as an IsingModel (B = couplings,
// c = biases, offset ignored by the solvers but kept for reporting).

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>

#include "qsplit/ising.hpp"
#include "qsplit/topology.hpp"

namespace qsplit {

enum class BetaScheduleKind { geometric, linear };

struct SolverConfig {
    int num_reads = 100;
    int sweeps = 1000;
    double beta_start = 0.1;
    double beta_end = 10.0;
    BetaScheduleKind schedule = BetaScheduleKind::geometric;
    std::uint64_t seed = 0;

    /// Throws std::invalid_argument on num_reads < 1, sweeps < 1 or
    /// beta_start >= beta_end.
    void validate() const;
};

/// Metropolis single-flip annealing, best of num_reads reads. Read r uses
/// its own generator derived from (seed, r). Each read ends with a
/// zero-temperature quench in which zero-gain moves only turn -1 into +1, so
/// spins with zero local field come out as +1.
SpinVector sa_solve(const IsingModel& problem, const SolverConfig& cfg);

struct BruteForceResult {
    SpinVector spins;
    double energy;
};

inline constexpr std::size_t kBruteForceMaxSize = 26;

/// Exact minimizer by Gray-code enumeration. Ties (within the energy tie
/// tolerance) go to the lexicographically smallest vector with -1 < +1.
BruteForceResult brute_force_solve(const IsingModel& problem);

/// SA on (A masked by `mask`, b). The returned vector should be scored with
/// the full model's energy.
SpinVector restricted_sa_solve(const IsingModel& model, const HardwareMask& mask,
                               const SolverConfig& cfg);

/// Keeps couplings present in the mask and the diagonal; drops the rest.
IsingModel restrict_to_mask(const IsingModel& model, const HardwareMask& mask);

/// True when every off-diagonal coupling of `problem` sits on a mask edge.
bool respects_mask(const IsingModel& problem, const HardwareMask& mask);

/// Seam for inner solvers. Implementations receive subproblems whose
/// couplings already respect the active mask and must return a spin vector
/// of matching length.
class Sampler {
public:
    virtual ~Sampler() = default;
    virtual SpinVector sample(const IsingModel& problem, std::uint64_t seed) = 0;
    virtual std::string name() const = 0;
};

class AnnealingSampler final : public Sampler {
public:
    explicit AnnealingSampler(SolverConfig cfg);
    SpinVector sample(const IsingModel& problem, std::uint64_t seed) override;
    std::string name() const override { return "sa"; }
    const SolverConfig& config() const noexcept { return cfg_; }

private:
    SolverConfig cfg_;
};

class ExhaustiveSampler final : public Sampler {
public:
    SpinVector sample(const IsingModel& problem, std::uint64_t seed) override;
    std::string name() const override { return "brute-force"; }
};

/// Wraps an arbitrary callable, e.g. a client for an external annealer.
class CallbackSampler final : public Sampler {
public:
    using Fn = std::function<SpinVector(const IsingModel&, std::uint64_t)>;
    CallbackSampler(Fn fn, std::string name) : fn_(std::move(fn)), name_(std::move(name)) {}
    SpinVector sample(const IsingModel& problem, std::uint64_t seed) override;
    std::string name() const override { return name_; }

private:
    Fn fn_;
    std::string name_;
};

/// Calls sampler.sample and checks the returned length.
SpinVector checked_sample(Sampler& sampler, const IsingModel& problem, std::uint64_t seed);

} // namespace qsplit
