#include "qsplit/ising.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

namespace qsplit {

namespace {

std::int8_t checked_spin(int v) {
    if (v != 1 && v != -1) {
        throw std::invalid_argument("spin entries must be -1 or +1, got " + std::to_string(v));
    }
    return static_cast<std::int8_t>(v);
}

void check_size(std::size_t expected, std::size_t got, const char* what) {
    if (expected != got) {
        throw std::invalid_argument(std::string(what) + ": dimension mismatch (" +
                                    std::to_string(expected) + " vs " + std::to_string(got) + ")");
    }
}

} // namespace

// ---------------------------------------------------------------------------
// SpinVector

SpinVector::SpinVector(std::initializer_list<int> values) {
    spins_.reserve(values.size());
    for (int v : values) spins_.push_back(checked_spin(v));
}

SpinVector::SpinVector(std::span<const int> values) {
    spins_.reserve(values.size());
    for (int v : values) spins_.push_back(checked_spin(v));
}

int SpinVector::at(std::size_t i) const {
    if (i >= spins_.size()) throw std::out_of_range("spin index out of range");
    return spins_[i];
}

void SpinVector::set(std::size_t i, int value) {
    if (i >= spins_.size()) throw std::out_of_range("spin index out of range");
    spins_[i] = checked_spin(value);
}

SpinVector SpinVector::negated() const {
    SpinVector out = *this;
    for (auto& v : out.spins_) v = static_cast<std::int8_t>(-v);
    return out;
}

std::vector<int> SpinVector::to_vector() const { return {spins_.begin(), spins_.end()}; }

bool SpinVector::lexicographically_less(const SpinVector& other) const {
    return std::lexicographical_compare(spins_.begin(), spins_.end(), other.spins_.begin(),
                                        other.spins_.end());
}

std::size_t SpinVector::hamming_distance(const SpinVector& other) const {
    check_size(size(), other.size(), "hamming_distance");
    std::size_t d = 0;
    for (std::size_t i = 0; i < spins_.size(); ++i) d += spins_[i] != other.spins_[i];
    return d;
}

// ---------------------------------------------------------------------------
// SymmetricMatrix

SymmetricMatrix::SymmetricMatrix(std::size_t n) : rows_(n) { finalize(); }

SymmetricMatrix::SymmetricMatrix(std::vector<std::vector<MatrixEntry>> rows)
    : rows_(std::move(rows)) {
    finalize();
}

void SymmetricMatrix::finalize() {
    nonzeros_ = 0;
    for (auto& r : rows_) {
        std::sort(r.begin(), r.end(),
                  [](const MatrixEntry& a, const MatrixEntry& b) { return a.col < b.col; });
        // merge duplicate columns and drop zeros
        std::vector<MatrixEntry> merged;
        merged.reserve(r.size());
        for (const auto& e : r) {
            if (!merged.empty() && merged.back().col == e.col) {
                merged.back().value += e.value;
            } else {
                merged.push_back(e);
            }
        }
        std::erase_if(merged, [](const MatrixEntry& e) { return e.value == 0.0; });
        r = std::move(merged);
        nonzeros_ += r.size();
    }
    dense_.clear();
    const std::size_t n = rows_.size();
    if (n <= kDenseLimit) {
        dense_.assign(n * n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            for (const auto& e : rows_[i]) dense_[i * n + e.col] = e.value;
        }
    }
}

SymmetricMatrix SymmetricMatrix::from_symmetric_terms(std::size_t n,
                                                      std::span<const Triplet> terms) {
    std::vector<std::vector<MatrixEntry>> rows(n);
    for (const auto& t : terms) {
        if (t.row >= n || t.col >= n) throw std::out_of_range("matrix term index out of range");
        rows[t.row].push_back({t.col, t.value});
        if (t.row != t.col) rows[t.col].push_back({t.row, t.value});
    }
    return SymmetricMatrix(std::move(rows));
}

SymmetricMatrix SymmetricMatrix::from_dense(std::size_t n, std::span<const double> row_major,
                                            bool* was_symmetrized) {
    check_size(n * n, row_major.size(), "SymmetricMatrix::from_dense");
    bool asym = false;
    std::vector<std::vector<MatrixEntry>> rows(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double a = row_major[i * n + j];
            const double b = row_major[j * n + i];
            if (a != b) asym = true;
            const double v = a == b ? a : 0.5 * (a + b);
            if (v != 0.0) rows[i].push_back({j, v});
        }
    }
    if (was_symmetrized) *was_symmetrized = asym;
    return SymmetricMatrix(std::move(rows));
}

double SymmetricMatrix::at(std::size_t i, std::size_t j) const {
    const std::size_t n = size();
    if (i >= n || j >= n) throw std::out_of_range("matrix index out of range");
    if (!dense_.empty()) return dense_[i * n + j];
    const auto& r = rows_[i];
    auto it = std::lower_bound(r.begin(), r.end(), j,
                               [](const MatrixEntry& e, std::size_t c) { return e.col < c; });
    return (it != r.end() && it->col == j) ? it->value : 0.0;
}

bool SymmetricMatrix::has_zero_diagonal() const {
    for (std::size_t i = 0; i < size(); ++i) {
        if (at(i, i) != 0.0) return false;
    }
    return true;
}

std::vector<double> SymmetricMatrix::multiply(std::span<const double> x) const {
    check_size(size(), x.size(), "SymmetricMatrix::multiply");
    std::vector<double> y(size(), 0.0);
    for (std::size_t i = 0; i < size(); ++i) {
        double acc = 0.0;
        for (const auto& e : rows_[i]) acc += e.value * x[e.col];
        y[i] = acc;
    }
    return y;
}

std::vector<double> SymmetricMatrix::multiply(const SpinVector& s) const {
    check_size(size(), s.size(), "SymmetricMatrix::multiply");
    std::vector<double> y(size(), 0.0);
    for (std::size_t i = 0; i < size(); ++i) {
        double acc = 0.0;
        for (const auto& e : rows_[i]) acc += e.value * s[e.col];
        y[i] = acc;
    }
    return y;
}

double SymmetricMatrix::quadratic_form(const SpinVector& s) const {
    check_size(size(), s.size(), "SymmetricMatrix::quadratic_form");
    double total = 0.0;
    for (std::size_t i = 0; i < size(); ++i) {
        double acc = 0.0;
        for (const auto& e : rows_[i]) acc += e.value * s[e.col];
        total += s[i] * acc;
    }
    return total;
}

double SymmetricMatrix::quadratic_form(std::span<const double> x) const {
    const auto y = multiply(x);
    return std::inner_product(x.begin(), x.end(), y.begin(), 0.0);
}

SymmetricMatrix SymmetricMatrix::plus_identity(double c) const {
    auto rows = rows_;
    if (c != 0.0) {
        for (std::size_t i = 0; i < rows.size(); ++i) rows[i].push_back({i, c});
    }
    return SymmetricMatrix(std::move(rows));
}

SymmetricMatrix SymmetricMatrix::scaled(double factor) const {
    auto rows = rows_;
    for (auto& r : rows) {
        for (auto& e : r) e.value *= factor;
    }
    return SymmetricMatrix(std::move(rows));
}

SymmetricMatrix SymmetricMatrix::minus(const SymmetricMatrix& other) const {
    check_size(size(), other.size(), "SymmetricMatrix::minus");
    auto rows = rows_;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (const auto& e : other.rows_[i]) rows[i].push_back({e.col, -e.value});
    }
    return SymmetricMatrix(std::move(rows));
}

std::vector<double> SymmetricMatrix::to_dense() const {
    const std::size_t n = size();
    std::vector<double> out(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (const auto& e : rows_[i]) out[i * n + e.col] = e.value;
    }
    return out;
}

bool operator==(const SymmetricMatrix& a, const SymmetricMatrix& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const auto& ra = a.rows_[i];
        const auto& rb = b.rows_[i];
        if (ra.size() != rb.size()) return false;
        for (std::size_t k = 0; k < ra.size(); ++k) {
            if (ra[k].col != rb[k].col || ra[k].value != rb[k].value) return false;
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// Models

IsingModel::IsingModel(SymmetricMatrix couplings, std::vector<double> biases, double offset)
    : couplings_(std::move(couplings)), biases_(std::move(biases)), offset_(offset) {
    if (biases_.empty()) throw std::invalid_argument("IsingModel requires n >= 1");
    check_size(couplings_.size(), biases_.size(), "IsingModel");
}

QuboModel QuboModel::from_dense(std::size_t n, std::span<const double> row_major) {
    bool sym = false;
    QuboModel q(SymmetricMatrix::from_dense(n, row_major, &sym));
    q.symmetrized_ = sym;
    return q;
}

WeightedGraph::WeightedGraph(std::size_t n, std::vector<Edge> edges) : n_(n), edges_(std::move(edges)) {
    std::map<std::pair<std::size_t, std::size_t>, bool> seen;
    for (auto& e : edges_) {
        if (e.u >= n_ || e.v >= n_) throw std::out_of_range("graph edge endpoint out of range");
        if (e.u == e.v) throw std::invalid_argument("graph self-loop at vertex " + std::to_string(e.u));
        if (e.u > e.v) std::swap(e.u, e.v);
        if (!seen.emplace(std::pair{e.u, e.v}, true).second) {
            throw std::invalid_argument("duplicate graph edge (" + std::to_string(e.u) + ", " +
                                        std::to_string(e.v) + ")");
        }
    }
}

double WeightedGraph::total_weight() const noexcept {
    double w = 0.0;
    for (const auto& e : edges_) w += e.weight;
    return w;
}

// ---------------------------------------------------------------------------
// Conversions and evaluation

IsingConversion qubo_to_ising(const QuboModel& q) {
    const auto& qm = q.matrix();
    const std::size_t n = qm.size();
    // x = (s + 1) / 2:  x^T Q x = s^T (Q/4) s + (Q 1 / 2)^T s + 1^T Q 1 / 4
    std::vector<double> ones(n, 1.0);
    auto row_sums = qm.multiply(ones);
    std::vector<double> b(n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        b[i] = 0.5 * row_sums[i];
        total += row_sums[i];
    }
    return {IsingModel(qm.scaled(0.25), std::move(b), 0.25 * total), q.was_symmetrized()};
}

double qubo_value(const QuboModel& q, std::span<const int> x) {
    check_size(q.size(), x.size(), "qubo_value");
    std::vector<double> xd(x.begin(), x.end());
    for (double v : xd) {
        if (v != 0.0 && v != 1.0) throw std::invalid_argument("QUBO entries must be 0 or 1");
    }
    return q.matrix().quadratic_form(xd);
}

double energy(const IsingModel& m, const SpinVector& s) {
    check_size(m.size(), s.size(), "energy");
    double lin = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) lin += m.biases()[i] * s[i];
    return m.couplings().quadratic_form(s) + lin + m.offset();
}

std::vector<double> local_fields(const IsingModel& m, const SpinVector& s) {
    check_size(m.size(), s.size(), "local_fields");
    std::vector<double> h(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) {
        double acc = 0.0;
        for (const auto& e : m.couplings().row(i)) {
            if (e.col != i) acc += e.value * s[e.col];
        }
        h[i] = 2.0 * acc + m.biases()[i];
    }
    return h;
}

double delta_energy(const IsingModel& m, const SpinVector& s, std::size_t i) {
    check_size(m.size(), s.size(), "delta_energy");
    if (i >= m.size()) throw std::out_of_range("delta_energy: index out of range");
    double acc = 0.0;
    for (const auto& e : m.couplings().row(i)) {
        if (e.col != i) acc += e.value * s[e.col];
    }
    return -2.0 * s[i] * (2.0 * acc + m.biases()[i]);
}

IsingModel maxcut_to_ising(const WeightedGraph& g) {
    std::vector<Triplet> terms;
    terms.reserve(g.edges().size());
    for (const auto& e : g.edges()) terms.push_back({e.u, e.v, 0.5 * e.weight});
    const std::size_t n = g.size();
    return IsingModel(SymmetricMatrix::from_symmetric_terms(n, terms), std::vector<double>(n, 0.0));
}

double cut_value(const WeightedGraph& g, const SpinVector& s) {
    check_size(g.size(), s.size(), "cut_value");
    double cut = 0.0;
    for (const auto& e : g.edges()) {
        if (s[e.u] != s[e.v]) cut += e.weight;
    }
    return cut;
}

IsingModel apply_diagonal_shift(const IsingModel& m, double c) {
    return IsingModel(m.couplings().plus_identity(c), m.biases(),
                      m.offset() - c * static_cast<double>(m.size()));
}

bool energies_equal(double a, double b) noexcept {
    const double scale = std::max({1.0, std::abs(a), std::abs(b)});
    return std::abs(a - b) <= kEnergyTieTolerance * scale;
}

} // namespace qsplit
