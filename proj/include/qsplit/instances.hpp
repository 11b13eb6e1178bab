#pragma once

// Benchmark instances and reference values.

#include <cstddef>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qsplit/ising.hpp"
#include "qsplit/rng.hpp"

namespace qsplit {

/// Fully connected regular spin glass of dimension N (1-indexed formulas):
///   A_ij = 1 - (i + j - 2) / (N - 1) for i != j,  b_i = 1 - 2 (i - 1) / (N - 1),
/// stored symmetric with zero diagonal.
struct RegInstance {
    int N;
    IsingModel model;
};

RegInstance reg_instance(int N);

/// (-1 x k, +1 x (N - k)).
SpinVector reg_minus_plus(int N, int k);
/// (+1 x k, -1 x (N - k)).
SpinVector reg_plus_minus(int N, int k);
/// 2k (1 - (k - 1) / (N - 1)), the linear term b^T s_{+-}(k).
double reg_plus_minus_linear_term(int N, int k);

struct GroundState {
    SpinVector spins;
    double energy;
    int k; // number of leading -1 entries
};

/// Minimum over the N + 1 vectors reg_minus_plus(N, k); ties go to the
/// smallest k. This is the exact ground state of the Reg family.
GroundState reg_ground_state(int N);

class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// MQLib edge list: header "n m", then m lines "i j w" with 1-indexed
/// vertices. Blank lines and lines starting with '#' are skipped.
WeightedGraph parse_maxcut_edgelist(std::string_view text);
std::string format_maxcut_edgelist(const WeightedGraph& g);

struct BestKnownEntry {
    double value;
    bool usable_for_ratio; // false when the value is 0
};

/// Best reported objective values by instance name.
struct BestKnownTable {
    std::map<std::string, BestKnownEntry> entries;
    std::string provenance;

    const BestKnownEntry* find(const std::string& name) const;
};

/// CSV "name,value" with an optional header line.
BestKnownTable load_best_known(std::string_view csv, std::string provenance = {});

enum class RatioKind { ising_ground, cut_best };

/// ising_ground: achieved / reference (energies); cut_best: |achieved| / reference.
double approximation_ratio(double achieved, double reference, RatioKind kind);

/// Dense model with couplings and biases uniform in [-1, 1], zero diagonal.
IsingModel random_dense_model(std::size_t n, Rng& rng, bool with_bias = true);

/// Erdos-Renyi graph with the given edge probability and integer weights
/// drawn uniformly from {-w, ..., w} \ {0} (w = 0 gives unit weights).
WeightedGraph random_graph(std::size_t n, double edge_probability, int max_abs_weight, Rng& rng);

} // namespace qsplit
