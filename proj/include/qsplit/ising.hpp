#pragma once

// Problem representations for QUBO / Ising / Max-Cut and the conversions
// between them. Objective convention throughout:
//
//   E(s) = s^T A s + b^T s + offset,   s in {-1,+1}^n
//
// with A symmetric. Diagonal entries of A are allowed; they only add a
// constant on the hypercube but change gradients of relaxations.

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace qsplit {

/// Length-n vector with entries in {-1,+1}.
class SpinVector {
public:
    SpinVector() = default;
    /// All +1.
    explicit SpinVector(std::size_t n) : spins_(n, 1) {}
    SpinVector(std::initializer_list<int> values);
    explicit SpinVector(std::span<const int> values);

    static SpinVector ones(std::size_t n) { return SpinVector(n); }

    std::size_t size() const noexcept { return spins_.size(); }
    int operator[](std::size_t i) const noexcept { return spins_[i]; }
    int at(std::size_t i) const;

    void set(std::size_t i, int value);
    void flip(std::size_t i) noexcept { spins_[i] = static_cast<std::int8_t>(-spins_[i]); }

    SpinVector negated() const;
    std::vector<int> to_vector() const;
    /// Lexicographic order with -1 < +1, index 0 most significant.
    bool lexicographically_less(const SpinVector& other) const;
    std::size_t hamming_distance(const SpinVector& other) const;

    friend bool operator==(const SpinVector&, const SpinVector&) = default;

private:
    std::vector<std::int8_t> spins_;
};

struct MatrixEntry {
    std::size_t col;
    double value;
};

struct Triplet {
    std::size_t row;
    std::size_t col;
    double value;
};

/// Symmetric real matrix stored as sorted sparse rows. A dense lookup table
/// is kept alongside for n <= kDenseLimit so at() is O(1) there.
class SymmetricMatrix {
public:
    static constexpr std::size_t kDenseLimit = 256;

    SymmetricMatrix() = default;
    /// Zero matrix.
    explicit SymmetricMatrix(std::size_t n);

    /// Each triplet (i, j, v) adds v to both A[i][j] and A[j][i] (once for
    /// i == j). Explicit zeros are dropped.
    static SymmetricMatrix from_symmetric_terms(std::size_t n, std::span<const Triplet> terms);

    /// Row-major dense input. A non-symmetric input is replaced by
    /// (M + M^T) / 2 and *was_symmetrized is set.
    static SymmetricMatrix from_dense(std::size_t n, std::span<const double> row_major,
                                      bool* was_symmetrized = nullptr);

    std::size_t size() const noexcept { return rows_.size(); }
    std::span<const MatrixEntry> row(std::size_t i) const { return rows_[i]; }
    double at(std::size_t i, std::size_t j) const;
    /// Stored entries, counting (i,j) and (j,i) separately.
    std::size_t nonzeros() const noexcept { return nonzeros_; }
    bool is_zero() const noexcept { return nonzeros_ == 0; }
    bool has_zero_diagonal() const;

    std::vector<double> multiply(std::span<const double> x) const;
    std::vector<double> multiply(const SpinVector& s) const;
    double quadratic_form(const SpinVector& s) const;
    double quadratic_form(std::span<const double> x) const;

    SymmetricMatrix plus_identity(double c) const;
    SymmetricMatrix scaled(double factor) const;
    /// A - B, both of the same size.
    SymmetricMatrix minus(const SymmetricMatrix& other) const;
    /// Dense row-major copy.
    std::vector<double> to_dense() const;

    friend bool operator==(const SymmetricMatrix& a, const SymmetricMatrix& b);

private:
    explicit SymmetricMatrix(std::vector<std::vector<MatrixEntry>> rows);
    void finalize();

    std::vector<std::vector<MatrixEntry>> rows_;
    std::vector<double> dense_;
    std::size_t nonzeros_ = 0;
};

/// E(s) = s^T A s + b^T s + offset.
class IsingModel {
public:
    IsingModel(SymmetricMatrix couplings, std::vector<double> biases, double offset = 0.0);

    std::size_t size() const noexcept { return biases_.size(); }
    const SymmetricMatrix& couplings() const noexcept { return couplings_; }
    const std::vector<double>& biases() const noexcept { return biases_; }
    double offset() const noexcept { return offset_; }

private:
    SymmetricMatrix couplings_;
    std::vector<double> biases_;
    double offset_;
};

/// x^T Q x over x in {0,1}^n.
class QuboModel {
public:
    explicit QuboModel(SymmetricMatrix q) : q_(std::move(q)) {}
    /// Row-major input; symmetrized if needed (see was_symmetrized()).
    static QuboModel from_dense(std::size_t n, std::span<const double> row_major);

    std::size_t size() const noexcept { return q_.size(); }
    const SymmetricMatrix& matrix() const noexcept { return q_; }
    bool was_symmetrized() const noexcept { return symmetrized_; }

private:
    SymmetricMatrix q_;
    bool symmetrized_ = false;
};

struct Edge {
    std::size_t u;
    std::size_t v;
    double weight;
};

/// Undirected weighted graph with u < v on every edge, no loops or duplicates.
class WeightedGraph {
public:
    WeightedGraph(std::size_t n, std::vector<Edge> edges);

    std::size_t size() const noexcept { return n_; }
    const std::vector<Edge>& edges() const noexcept { return edges_; }
    double total_weight() const noexcept;

private:
    std::size_t n_;
    std::vector<Edge> edges_;
};

struct IsingConversion {
    IsingModel model;
    /// Set when the QUBO matrix had to be symmetrized first.
    bool symmetrized;
};

IsingConversion qubo_to_ising(const QuboModel& q);
double qubo_value(const QuboModel& q, std::span<const int> x);

double energy(const IsingModel& m, const SpinVector& s);

/// h_i = 2 * sum_{j != i} A_ij s_j + b_i. Flipping s_i changes E by -2 s_i h_i.
std::vector<double> local_fields(const IsingModel& m, const SpinVector& s);

/// energy(flip(s, i)) - energy(s) in O(row degree).
double delta_energy(const IsingModel& m, const SpinVector& s, std::size_t i);

IsingModel maxcut_to_ising(const WeightedGraph& g);
double cut_value(const WeightedGraph& g, const SpinVector& s);

/// A + c I with offset - c n; identical energies on the hypercube.
IsingModel apply_diagonal_shift(const IsingModel& m, double c);

/// Energies closer than this (scaled by max(1, |E|)) are reported as equal.
inline constexpr double kEnergyTieTolerance = 1e-12;
bool energies_equal(double a, double b) noexcept;

} // namespace qsplit
