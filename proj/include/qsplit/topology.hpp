#pragma once

// Hardware connectivity graphs (Chimera, Pegasus) used as masks for the
// quadratic part of subproblems, plus node permutations.
//
// Canonical node orderings:
//   Chimera C(R, C, t): index = (row * C + col) * 2t + u * t + k, with u = 0
//     for vertical qubits (coupled across rows) and u = 1 for horizontal
//     qubits (coupled across columns).
//   Pegasus P_m: index = ((u * m + w) * 12 + k) * (m - 1) + z for coordinates
//     (u, w, k, z), u in {0,1}, w in [0, m), k in [0, 12), z in [0, m - 1).
//     This is lexicographic order of the Pegasus coordinates.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qsplit/rng.hpp"

namespace qsplit {

/// A bijection on {0, ..., n-1}.
class Permutation {
public:
    explicit Permutation(std::vector<std::size_t> p);
    static Permutation identity(std::size_t n);

    std::size_t size() const noexcept { return p_.size(); }
    std::size_t operator[](std::size_t i) const noexcept { return p_[i]; }
    const std::vector<std::size_t>& values() const noexcept { return p_; }
    Permutation inverse() const;

    friend bool operator==(const Permutation&, const Permutation&) = default;

private:
    std::vector<std::size_t> p_;
};

/// Symmetric 0/1 adjacency with zero diagonal.
class HardwareMask {
public:
    using EdgeList = std::vector<std::pair<std::size_t, std::size_t>>;

    /// Edges may be given in any orientation; loops and duplicates are rejected.
    HardwareMask(std::size_t n, const EdgeList& edges, std::string label);

    std::size_t size() const noexcept { return adjacency_.size(); }
    const std::string& label() const noexcept { return label_; }
    std::span<const std::size_t> neighbors(std::size_t i) const { return adjacency_[i]; }
    std::size_t degree(std::size_t i) const { return adjacency_[i].size(); }
    std::size_t edge_count() const noexcept { return edge_count_; }
    bool has_edge(std::size_t i, std::size_t j) const;
    /// Sorted (i, j) pairs with i < j.
    EdgeList edges() const;
    /// Induced subgraph on `nodes`, relabeled to positions in `nodes`.
    HardwareMask induced(std::span<const std::size_t> nodes, std::string label) const;

    friend bool operator==(const HardwareMask& a, const HardwareMask& b) {
        return a.adjacency_ == b.adjacency_;
    }

private:
    std::vector<std::vector<std::size_t>> adjacency_;
    std::string label_;
    std::size_t edge_count_ = 0;
};

HardwareMask chimera_mask(int rows, int cols, int shore);
HardwareMask pegasus_mask(int size);
HardwareMask complete_mask(std::size_t n);
HardwareMask empty_mask(std::size_t n);

/// Pegasus node-count formula, 24 m (m - 1).
constexpr std::size_t pegasus_node_count(int size) {
    return 24u * static_cast<std::size_t>(size) * static_cast<std::size_t>(size - 1);
}

/// Nodes of the P_sub graph sitting at the corner w < sub, z < sub - 1 of
/// a full Pegasus mask, listed in P_sub canonical order.
std::vector<std::size_t> sub_pegasus_nodes(const HardwareMask& full, int sub_size);

enum class TopologyFamily { pegasus, chimera, complete, empty };

/// A topology family plus its smallest allowed size. Textual forms:
/// "pegasus[:m]", "chimera[:R,C,S]", "complete", "empty".
struct TopologySpec {
    TopologyFamily family = TopologyFamily::pegasus;
    int pegasus_size = 2;
    int chimera_rows = 1;
    int chimera_cols = 1;
    int chimera_shore = 4;

    static TopologySpec parse(const std::string& text);
    std::string to_string() const;
};

/// Smallest mask of the family (starting from the spec's size) with at least
/// problem_n nodes, truncated to the first problem_n canonical nodes.
/// Pegasus grows m; Chimera grows (R, C) -> (R, C+1) -> (R+1, C+1) -> ...
HardwareMask mask_for_problem(std::size_t problem_n, const TopologySpec& spec);

/// Fisher-Yates, uniform over S_n for the given generator state.
Permutation random_permutation(std::size_t n, Rng& rng);

/// M'[i][j] = M[p(i)][p(j)].
HardwareMask permuted_mask(const HardwareMask& mask, const Permutation& p);

} // namespace qsplit
