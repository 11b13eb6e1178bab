#include "qsplit/instances.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>
#include <sstream>

namespace qsplit {

RegInstance reg_instance(int N) {
    if (N < 2) throw std::invalid_argument("reg_instance: N must be >= 2");
    const double denom = static_cast<double>(N - 1);
    std::vector<Triplet> terms;
    terms.reserve(static_cast<std::size_t>(N) * static_cast<std::size_t>(N - 1) / 2);
    std::vector<double> b(static_cast<std::size_t>(N));
    // 1-indexed formulas, 0-indexed storage: i = r + 1, j = c + 1
    for (int r = 0; r < N; ++r) {
        b[static_cast<std::size_t>(r)] = 1.0 - 2.0 * r / denom;
        for (int c = r + 1; c < N; ++c) {
            terms.push_back({static_cast<std::size_t>(r), static_cast<std::size_t>(c), 1.0 - (r + c) / denom});
        }
    }
    return {N, IsingModel(SymmetricMatrix::from_symmetric_terms(static_cast<std::size_t>(N), terms), std::move(b))};
}

SpinVector reg_minus_plus(int N, int k) {
    if (N < 1 || k < 0 || k > N) throw std::invalid_argument("reg_minus_plus: need 0 <= k <= N");
    std::vector<int> s(static_cast<std::size_t>(N), 1);
    for (int i = 0; i < k; ++i) s[static_cast<std::size_t>(i)] = -1;
    return SpinVector(std::span<const int>(s));
}

SpinVector reg_plus_minus(int N, int k) { return reg_minus_plus(N, k).negated(); }

double reg_plus_minus_linear_term(int N, int k) {
    return 2.0 * k * (1.0 - static_cast<double>(k - 1) / static_cast<double>(N - 1));
}

GroundState reg_ground_state(int N) {
    const auto inst = reg_instance(N);
    GroundState best{reg_minus_plus(N, 0), energy(inst.model, reg_minus_plus(N, 0)), 0};
    for (int k = 1; k <= N; ++k) {
        auto s = reg_minus_plus(N, k);
        const double e = energy(inst.model, s);
        if (e < best.energy && !energies_equal(e, best.energy)) best = {std::move(s), e, k};
    }
    return best;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

std::vector<std::string_view> tokens(std::string_view line, char sep = 0) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    auto is_sep = [&](char ch) { return sep ? ch == sep : (ch == ' ' || ch == '\t' || ch == '\r'); };
    while (i <= line.size()) {
        if (!sep) {
            while (i < line.size() && is_sep(line[i])) ++i;
            if (i >= line.size()) break;
        }
        std::size_t j = i;
        while (j < line.size() && !is_sep(line[j])) ++j;
        out.push_back(line.substr(i, j - i));
        i = j + 1;
        if (sep && j >= line.size()) break;
    }
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

template <typename T>
bool parse_number(std::string_view text, T& out) {
    text = trim(text);
    if (text.empty()) return false;
    if (text.front() == '+') text.remove_prefix(1);
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    return ec == std::errc{} && ptr == text.data() + text.size();
}

} // namespace

WeightedGraph parse_maxcut_edgelist(std::string_view text) {
    std::size_t line_no = 0;
    std::size_t pos = 0;
    bool have_header = false;
    std::size_t n = 0;
    std::size_t m = 0;
    std::vector<Edge> edges;
    std::set<std::pair<std::size_t, std::size_t>> seen;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        const auto line = trim(text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos));
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        if (line.empty() || line.front() == '#') continue;
        const auto tok = tokens(line);
        if (!have_header) {
            if (tok.size() != 2 || !parse_number(tok[0], n) || !parse_number(tok[1], m)) {
                throw ParseError(line_no, "expected header 'n m'");
            }
            if (n == 0) throw ParseError(line_no, "graph must have at least one vertex");
            have_header = true;
            continue;
        }
        std::size_t i = 0;
        std::size_t j = 0;
        double w = 0.0;
        if (tok.size() != 3 || !parse_number(tok[0], i) || !parse_number(tok[1], j) || !parse_number(tok[2], w)) {
            throw ParseError(line_no, "expected edge line 'i j w'");
        }
        if (i < 1 || j < 1 || i > n || j > n) throw ParseError(line_no, "vertex index out of range 1.." + std::to_string(n));
        if (i == j) throw ParseError(line_no, "self-loop on vertex " + std::to_string(i));
        const std::pair<std::size_t, std::size_t> key{std::min(i, j) - 1, std::max(i, j) - 1};
        if (!seen.insert(key).second) throw ParseError(line_no, "duplicate edge " + std::to_string(i) + " " + std::to_string(j));
        if (edges.size() == m) throw ParseError(line_no, "more edges than declared (" + std::to_string(m) + ")");
        edges.push_back({key.first, key.second, w});
    }
    if (!have_header) throw ParseError(line_no, "missing header 'n m'");
    if (edges.size() != m) {
        throw ParseError(line_no, "declared " + std::to_string(m) + " edges, found " + std::to_string(edges.size()));
    }
    return WeightedGraph(n, std::move(edges));
}

std::string format_maxcut_edgelist(const WeightedGraph& g) {
    std::ostringstream out;
    out.precision(17);
    out << g.size() << ' ' << g.edges().size() << '\n';
    for (const auto& e : g.edges()) out << e.u + 1 << ' ' << e.v + 1 << ' ' << e.weight << '\n';
    return out.str();
}

const BestKnownEntry* BestKnownTable::find(const std::string& name) const {
    auto it = entries.find(name);
    return it == entries.end() ? nullptr : &it->second;
}

BestKnownTable load_best_known(std::string_view csv, std::string provenance) {
    BestKnownTable table;
    table.provenance = std::move(provenance);
    std::size_t line_no = 0;
    std::size_t pos = 0;
    bool first = true;
    while (pos <= csv.size()) {
        const auto nl = csv.find('\n', pos);
        const auto line = trim(csv.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos));
        pos = nl == std::string_view::npos ? csv.size() + 1 : nl + 1;
        ++line_no;
        if (line.empty() || line.front() == '#') continue;
        const auto tok = tokens(line, ',');
        if (tok.size() != 2) throw ParseError(line_no, "expected 'name,value'");
        const std::string name(trim(tok[0]));
        double value = 0.0;
        if (!parse_number(tok[1], value)) {
            if (first) { // header
                first = false;
                continue;
            }
            throw ParseError(line_no, "non-numeric value '" + std::string(trim(tok[1])) + "'");
        }
        first = false;
        if (name.empty()) throw ParseError(line_no, "empty instance name");
        if (!std::isfinite(value)) throw ParseError(line_no, "non-finite value");
        if (!table.entries.emplace(name, BestKnownEntry{value, value != 0.0}).second) {
            throw ParseError(line_no, "duplicate instance name '" + name + "'");
        }
    }
    return table;
}

double approximation_ratio(double achieved, double reference, RatioKind kind) {
    if (reference == 0.0) throw std::invalid_argument("approximation_ratio: reference value is zero");
    return kind == RatioKind::ising_ground ? achieved / reference : std::abs(achieved) / reference;
}

// ---------------------------------------------------------------------------
// Random instances

IsingModel random_dense_model(std::size_t n, Rng& rng, bool with_bias) {
    std::vector<Triplet> terms;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) terms.push_back({i, j, 2.0 * uniform_unit(rng) - 1.0});
    }
    std::vector<double> b(n, 0.0);
    if (with_bias) {
        for (auto& x : b) x = 2.0 * uniform_unit(rng) - 1.0;
    }
    return IsingModel(SymmetricMatrix::from_symmetric_terms(n, terms), std::move(b));
}

WeightedGraph random_graph(std::size_t n, double edge_probability, int max_abs_weight, Rng& rng) {
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (uniform_unit(rng) >= edge_probability) continue;
            double w = 1.0;
            if (max_abs_weight > 0) {
                const auto span = static_cast<std::uint64_t>(2 * max_abs_weight);
                auto v = static_cast<int>(uniform_index(rng, span)) - max_abs_weight; // -w .. w-1
                if (v >= 0) ++v;                                                      // skip 0
                w = v;
            }
            edges.push_back({i, j, w});
        }
    }
    return WeightedGraph(n, std::move(edges));
}

} // namespace qsplit
