#include "qsplit/topology.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <numeric>
#include <stdexcept>

namespace qsplit {

// ---------------------------------------------------------------------------
// Permutation

Permutation::Permutation(std::vector<std::size_t> p) : p_(std::move(p)) {
    std::vector<bool> seen(p_.size(), false);
    for (std::size_t v : p_) {
        if (v >= p_.size() || seen[v]) throw std::invalid_argument("not a permutation");
        seen[v] = true;
    }
}

Permutation Permutation::identity(std::size_t n) {
    std::vector<std::size_t> p(n);
    std::iota(p.begin(), p.end(), std::size_t{0});
    return Permutation(std::move(p));
}

Permutation Permutation::inverse() const {
    std::vector<std::size_t> inv(p_.size());
    for (std::size_t i = 0; i < p_.size(); ++i) inv[p_[i]] = i;
    return Permutation(std::move(inv));
}

// ---------------------------------------------------------------------------
// HardwareMask

HardwareMask::HardwareMask(std::size_t n, const EdgeList& edges, std::string label)
    : adjacency_(n), label_(std::move(label)) {
    for (auto [a, b] : edges) {
        if (a >= n || b >= n) throw std::out_of_range("mask edge endpoint out of range");
        if (a == b) throw std::invalid_argument("mask edges cannot be loops");
        adjacency_[a].push_back(b);
        adjacency_[b].push_back(a);
    }
    for (auto& nbrs : adjacency_) {
        std::sort(nbrs.begin(), nbrs.end());
        if (std::adjacent_find(nbrs.begin(), nbrs.end()) != nbrs.end()) {
            throw std::invalid_argument("duplicate mask edge");
        }
        edge_count_ += nbrs.size();
    }
    edge_count_ /= 2;
}

bool HardwareMask::has_edge(std::size_t i, std::size_t j) const {
    const auto& nbrs = adjacency_.at(i);
    return std::binary_search(nbrs.begin(), nbrs.end(), j);
}

HardwareMask::EdgeList HardwareMask::edges() const {
    EdgeList out;
    out.reserve(edge_count_);
    for (std::size_t i = 0; i < adjacency_.size(); ++i) {
        for (std::size_t j : adjacency_[i]) {
            if (i < j) out.emplace_back(i, j);
        }
    }
    return out;
}

HardwareMask HardwareMask::induced(std::span<const std::size_t> nodes, std::string label) const {
    std::vector<std::size_t> position(size(), SIZE_MAX);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (nodes[i] >= size()) throw std::out_of_range("induced: node out of range");
        if (position[nodes[i]] != SIZE_MAX) throw std::invalid_argument("induced: repeated node");
        position[nodes[i]] = i;
    }
    EdgeList edges;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        for (std::size_t j : adjacency_[nodes[i]]) {
            const std::size_t pj = position[j];
            if (pj != SIZE_MAX && i < pj) edges.emplace_back(i, pj);
        }
    }
    return HardwareMask(nodes.size(), edges, std::move(label));
}

// ---------------------------------------------------------------------------
// Generators

HardwareMask chimera_mask(int rows, int cols, int shore) {
    if (rows < 1 || cols < 1 || shore < 1) throw std::invalid_argument("chimera dimensions must be >= 1");
    const auto t = static_cast<std::size_t>(shore);
    const auto R = static_cast<std::size_t>(rows);
    const auto C = static_cast<std::size_t>(cols);
    auto index = [&](std::size_t r, std::size_t c, std::size_t u, std::size_t k) {
        return (r * C + c) * 2 * t + u * t + k;
    };
    HardwareMask::EdgeList edges;
    for (std::size_t r = 0; r < R; ++r) {
        for (std::size_t c = 0; c < C; ++c) {
            for (std::size_t k = 0; k < t; ++k) {
                for (std::size_t kk = 0; kk < t; ++kk) edges.emplace_back(index(r, c, 0, k), index(r, c, 1, kk));
                if (r + 1 < R) edges.emplace_back(index(r, c, 0, k), index(r + 1, c, 0, k));
                if (c + 1 < C) edges.emplace_back(index(r, c, 1, k), index(r, c + 1, 1, k));
            }
        }
    }
    return HardwareMask(R * C * 2 * t, edges,
                        "chimera:" + std::to_string(rows) + "," + std::to_string(cols) + "," +
                            std::to_string(shore));
}

namespace {

// Standard Pegasus shift lists (vertical, horizontal).
constexpr std::array<int, 12> kVerticalOffsets{2, 2, 2, 2, 10, 10, 10, 10, 6, 6, 6, 6};
constexpr std::array<int, 12> kHorizontalOffsets{6, 6, 6, 6, 2, 2, 2, 2, 10, 10, 10, 10};

int parse_int(std::string_view text, const std::string& context) {
    int value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw std::invalid_argument("bad integer '" + std::string(text) + "' in " + context);
    }
    return value;
}

int pegasus_size_from_label(const std::string& label) {
    constexpr std::string_view prefix = "pegasus:";
    if (label.rfind(prefix, 0) != 0) {
        throw std::invalid_argument("mask '" + label + "' is not a full Pegasus graph");
    }
    return parse_int(std::string_view(label).substr(prefix.size()), label);
}

} // namespace

HardwareMask pegasus_mask(int size) {
    if (size < 2) throw std::invalid_argument("pegasus size must be >= 2");
    const int m = size;
    const int m1 = m - 1;
    auto label = [&](int u, int w, int k, int z) {
        return static_cast<std::size_t>(((u * m + w) * 12 + k) * m1 + z);
    };
    HardwareMask::EdgeList edges;
    // external couplers: same line, consecutive z
    for (int u = 0; u < 2; ++u)
        for (int w = 0; w < m; ++w)
            for (int k = 0; k < 12; ++k)
                for (int z = 0; z + 1 < m1; ++z) edges.emplace_back(label(u, w, k, z), label(u, w, k, z + 1));
    // odd couplers: k paired with k + 1
    for (int u = 0; u < 2; ++u)
        for (int w = 0; w < m; ++w)
            for (int k = 0; k < 12; k += 2)
                for (int z = 0; z < m1; ++z) edges.emplace_back(label(u, w, k, z), label(u, w, k + 1, z));
    // internal couplers between vertical and horizontal qubits
    for (int w = 0; w < m; ++w) {
        for (int kk = 0; kk < 12; ++kk) {
            const int k_begin = w == 0 ? kHorizontalOffsets[kk] : 0;
            const int k_end = w < m1 ? 12 : kHorizontalOffsets[kk];
            for (int k = k_begin; k < k_end; ++k) {
                for (int z = 0; z < m1; ++z) {
                    const int w2 = z + (kk < kVerticalOffsets[k] ? 1 : 0);
                    const int z2 = w - (k < kHorizontalOffsets[kk] ? 1 : 0);
                    edges.emplace_back(label(0, w, k, z), label(1, w2, kk, z2));
                }
            }
        }
    }
    return HardwareMask(pegasus_node_count(size), edges, "pegasus:" + std::to_string(size));
}

HardwareMask complete_mask(std::size_t n) {
    HardwareMask::EdgeList edges;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) edges.emplace_back(i, j);
    return HardwareMask(n, edges, "complete:" + std::to_string(n));
}

HardwareMask empty_mask(std::size_t n) { return HardwareMask(n, {}, "empty:" + std::to_string(n)); }

std::vector<std::size_t> sub_pegasus_nodes(const HardwareMask& full, int sub_size) {
    const int m = pegasus_size_from_label(full.label());
    if (full.size() != pegasus_node_count(m)) {
        throw std::invalid_argument("mask '" + full.label() + "' is not a full Pegasus graph");
    }
    if (sub_size < 2 || sub_size > m) throw std::invalid_argument("sub_pegasus_nodes: sub size out of range");
    const int m1 = m - 1;
    std::vector<std::size_t> nodes;
    nodes.reserve(pegasus_node_count(sub_size));
    for (int u = 0; u < 2; ++u)
        for (int w = 0; w < sub_size; ++w)
            for (int k = 0; k < 12; ++k)
                for (int z = 0; z < sub_size - 1; ++z)
                    nodes.push_back(static_cast<std::size_t>(((u * m + w) * 12 + k) * m1 + z));
    return nodes;
}

// ---------------------------------------------------------------------------
// Topology specs

TopologySpec TopologySpec::parse(const std::string& text) {
    TopologySpec spec;
    const auto colon = text.find(':');
    const std::string family = text.substr(0, colon);
    const std::string args = colon == std::string::npos ? "" : text.substr(colon + 1);
    if (family == "pegasus") {
        spec.family = TopologyFamily::pegasus;
        if (!args.empty()) spec.pegasus_size = parse_int(args, text);
        if (spec.pegasus_size < 2) throw std::invalid_argument("pegasus size must be >= 2");
    } else if (family == "chimera") {
        spec.family = TopologyFamily::chimera;
        if (!args.empty()) {
            std::array<int, 3> v{};
            std::size_t start = 0;
            for (int idx = 0; idx < 3; ++idx) {
                const auto comma = args.find(',', start);
                if ((idx < 2) == (comma == std::string::npos)) {
                    throw std::invalid_argument("chimera topology expects R,C,S: " + text);
                }
                v[idx] = parse_int(std::string_view(args).substr(start, comma - start), text);
                start = comma + 1;
            }
            spec.chimera_rows = v[0];
            spec.chimera_cols = v[1];
            spec.chimera_shore = v[2];
            if (v[0] < 1 || v[1] < 1 || v[2] < 1) throw std::invalid_argument("chimera dimensions must be >= 1");
        }
    } else if (family == "complete" && args.empty()) {
        spec.family = TopologyFamily::complete;
    } else if (family == "empty" && args.empty()) {
        spec.family = TopologyFamily::empty;
    } else {
        throw std::invalid_argument("unknown topology '" + text + "'");
    }
    return spec;
}

std::string TopologySpec::to_string() const {
    switch (family) {
    case TopologyFamily::pegasus: return "pegasus:" + std::to_string(pegasus_size);
    case TopologyFamily::chimera:
        return "chimera:" + std::to_string(chimera_rows) + "," + std::to_string(chimera_cols) + "," +
               std::to_string(chimera_shore);
    case TopologyFamily::complete: return "complete";
    case TopologyFamily::empty: return "empty";
    }
    return {};
}

HardwareMask mask_for_problem(std::size_t problem_n, const TopologySpec& spec) {
    if (problem_n == 0) throw std::invalid_argument("mask_for_problem: problem size must be >= 1");
    constexpr std::size_t kMaxNodes = std::size_t{1} << 24;
    HardwareMask full = empty_mask(0);
    switch (spec.family) {
    case TopologyFamily::complete: return complete_mask(problem_n);
    case TopologyFamily::empty: return empty_mask(problem_n);
    case TopologyFamily::pegasus: {
        int m = spec.pegasus_size;
        while (pegasus_node_count(m) < problem_n) {
            if (pegasus_node_count(m) > kMaxNodes) throw std::invalid_argument("pegasus family cannot reach problem size");
            ++m;
        }
        full = pegasus_mask(m);
        break;
    }
    case TopologyFamily::chimera: {
        int r = spec.chimera_rows;
        int c = spec.chimera_cols;
        const auto per_cell = 2 * static_cast<std::size_t>(spec.chimera_shore);
        auto count = [&] { return static_cast<std::size_t>(r) * static_cast<std::size_t>(c) * per_cell; };
        while (count() < problem_n) {
            if (count() > kMaxNodes) throw std::invalid_argument("chimera family cannot reach problem size");
            if (c <= r) ++c;
            else ++r;
        }
        full = chimera_mask(r, c, spec.chimera_shore);
        break;
    }
    }
    if (full.size() == problem_n) return full;
    std::vector<std::size_t> nodes(problem_n);
    std::iota(nodes.begin(), nodes.end(), std::size_t{0});
    return full.induced(nodes, full.label() + "[:" + std::to_string(problem_n) + "]");
}

Permutation random_permutation(std::size_t n, Rng& rng) {
    if (n == 0) throw std::invalid_argument("random_permutation: n must be >= 1");
    std::vector<std::size_t> p(n);
    std::iota(p.begin(), p.end(), std::size_t{0});
    for (std::size_t i = n - 1; i > 0; --i) {
        const auto j = static_cast<std::size_t>(uniform_index(rng, i + 1));
        std::swap(p[i], p[j]);
    }
    return Permutation(std::move(p));
}

HardwareMask permuted_mask(const HardwareMask& mask, const Permutation& p) {
    if (mask.size() != p.size()) throw std::invalid_argument("permuted_mask: size mismatch");
    // M'[i][j] = M[p(i)][p(j)]: an edge (a, b) of M becomes (p^-1(a), p^-1(b)).
    const Permutation inv = p.inverse();
    HardwareMask::EdgeList edges;
    edges.reserve(mask.edge_count());
    for (auto [a, b] : mask.edges()) edges.emplace_back(inv[a], inv[b]);
    return HardwareMask(mask.size(), edges, mask.label() + "~perm");
}

} // namespace qsplit
