#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "qsplit/instances.hpp"

using namespace qsplit;

namespace {

// Reg entries straight from the 1-indexed definition.
oracle::Dense reg_oracle(int N) {
    oracle::Dense d;
    d.n = static_cast<std::size_t>(N);
    d.a.assign(d.n * d.n, 0.0);
    d.b.resize(d.n);
    for (int i = 1; i <= N; ++i) {
        d.b[i - 1] = 1.0 - 2.0 * (i - 1) / (N - 1.0);
        for (int j = 1; j <= N; ++j) {
            if (i != j) d.a[(i - 1) * d.n + (j - 1)] = 1.0 - (i + j - 2) / (N - 1.0);
        }
    }
    return d;
}

} // namespace

TEST_CASE("reg_instance entries") {
    const auto r3 = reg_instance(3);
    CHECK(r3.model.couplings().at(0, 1) == 0.5);
    CHECK(r3.model.couplings().at(1, 0) == 0.5);
    CHECK(r3.model.couplings().at(0, 2) == 0.0);
    CHECK(r3.model.couplings().at(1, 2) == -0.5);
    CHECK(r3.model.biases() == std::vector<double>{1.0, 0.0, -1.0});

    const auto r2 = reg_instance(2);
    CHECK(r2.model.couplings().at(0, 1) == 0.0);
    CHECK(r2.model.biases() == std::vector<double>{1.0, -1.0});

    for (int N : {3, 7, 50}) {
        const auto m = reg_instance(N).model;
        const auto d = reg_oracle(N);
        CHECK(m.couplings().has_zero_diagonal());
        const auto dense = m.couplings().to_dense();
        for (std::size_t k = 0; k < dense.size(); ++k) CHECK(dense[k] == doctest::Approx(d.a[k]).epsilon(1e-14));
        for (std::size_t i = 0; i < d.n; ++i)
            for (std::size_t j = 0; j < d.n; ++j) CHECK(m.couplings().at(i, j) == m.couplings().at(j, i));
    }
    CHECK_THROWS(reg_instance(1));
}

TEST_CASE("reg_ground_state equals exhaustive search") {
    for (int N = 2; N <= 16; ++N) {
        const auto d = reg_oracle(N);
        const auto want = oracle::exhaustive_min(d, 1e-12);
        const auto gs = reg_ground_state(N);
        CHECK(oracle::close(gs.energy, want.energy, 1e-10));
        CHECK(oracle::close(oracle::energy(d, gs.spins.to_vector()), want.energy, 1e-10));
        CHECK(gs.spins == reg_minus_plus(N, gs.k));
    }
}

TEST_CASE("reg vectors and the linear term identity") {
    CHECK(reg_minus_plus(4, 1) == SpinVector{-1, 1, 1, 1});
    CHECK(reg_plus_minus(4, 1) == SpinVector{1, -1, -1, -1});
    CHECK(reg_minus_plus(3, 3) == SpinVector{-1, -1, -1});
    CHECK_THROWS(reg_minus_plus(3, 4));
    for (int N : {2, 5, 11, 40}) {
        const auto d = reg_oracle(N);
        for (int k = 0; k <= N; ++k) {
            const auto s = reg_plus_minus(N, k).to_vector();
            double lin = 0.0;
            for (std::size_t i = 0; i < d.n; ++i) lin += d.b[i] * s[i];
            CHECK(reg_plus_minus_linear_term(N, k) == doctest::Approx(lin).epsilon(1e-12));
        }
    }
}

TEST_CASE("parse_maxcut_edgelist") {
    SUBCASE("basic") {
        const auto g = parse_maxcut_edgelist("# comment\n3 2\n1 2 1.5\n\n2 3 -2\n");
        CHECK(g.size() == 3);
        REQUIRE(g.edges().size() == 2);
        CHECK(g.edges()[0].u == 0);
        CHECK(g.edges()[0].v == 1);
        CHECK(g.edges()[0].weight == 1.5);
        CHECK(g.edges()[1].weight == -2.0);
        CHECK(g.total_weight() == -0.5);
    }
    SUBCASE("reversed endpoints are normalized") {
        const auto g = parse_maxcut_edgelist("2 1\n2 1 3\n");
        CHECK(g.edges()[0].u == 0);
        CHECK(g.edges()[0].v == 1);
    }
    SUBCASE("round trip") {
        Rng rng = make_rng(3, 0);
        const auto g = random_graph(15, 0.4, 3, rng);
        const auto h = parse_maxcut_edgelist(format_maxcut_edgelist(g));
        CHECK(h.size() == g.size());
        REQUIRE(h.edges().size() == g.edges().size());
        for (std::size_t k = 0; k < g.edges().size(); ++k) {
            CHECK(h.edges()[k].u == g.edges()[k].u);
            CHECK(h.edges()[k].v == g.edges()[k].v);
            CHECK(h.edges()[k].weight == g.edges()[k].weight);
        }
    }
    SUBCASE("errors carry line numbers") {
        auto line_of = [](std::string_view text) -> std::size_t {
            try {
                parse_maxcut_edgelist(text);
            } catch (const ParseError& e) {
                return e.line();
            }
            return 0;
        };
        CHECK(line_of("") == 1);
        CHECK(line_of("x y\n") == 1);
        CHECK(line_of("3 1\n1 4 1\n") == 2);
        CHECK(line_of("3 1\n2 2 1\n") == 2);
        CHECK(line_of("3 2\n1 2 1\n2 1 1\n") == 3);
        CHECK(line_of("3 1\n1 2 1\n2 3 1\n") == 3);
        CHECK(line_of("3 2\n1 2 1\n") >= 2);
        CHECK(line_of("3 1\n1 2\n") == 2);
        CHECK(line_of("0 0\n") == 1);
    }
}

TEST_CASE("load_best_known") {
    const auto t = load_best_known("name,value\ng1,11624\ng2, 0\n# note\n\ntoroid, -3.5\n", "test table");
    CHECK(t.provenance == "test table");
    CHECK(t.entries.size() == 3);
    REQUIRE(t.find("g1"));
    CHECK(t.find("g1")->value == 11624.0);
    CHECK(t.find("g1")->usable_for_ratio);
    REQUIRE(t.find("g2"));
    CHECK_FALSE(t.find("g2")->usable_for_ratio);
    CHECK(t.find("toroid")->value == -3.5);
    CHECK(t.find("missing") == nullptr);
    CHECK(load_best_known("").entries.empty());
    CHECK(load_best_known("a,1\n").entries.size() == 1);
    CHECK_THROWS_AS(load_best_known("a,1\na,2\n"), ParseError);
    CHECK_THROWS_AS(load_best_known("a,1\nb,x\n"), ParseError);
    CHECK_THROWS_AS(load_best_known("a,1,2\n"), ParseError);
}

TEST_CASE("approximation_ratio") {
    CHECK(approximation_ratio(40, 50, RatioKind::cut_best) == doctest::Approx(0.8));
    CHECK(approximation_ratio(-40, 50, RatioKind::cut_best) == doctest::Approx(0.8));
    CHECK(approximation_ratio(-8, -10, RatioKind::ising_ground) == doctest::Approx(0.8));
    CHECK_THROWS(approximation_ratio(1, 0, RatioKind::ising_ground));
    // no vector beats the Reg ground state
    const auto inst = reg_instance(10);
    const double ref = reg_ground_state(10).energy;
    CHECK(ref < 0);
    std::mt19937_64 gen(5);
    for (int trial = 0; trial < 500; ++trial) {
        const auto s = oracle::spin_vector(oracle::random_spins(10, gen));
        CHECK(approximation_ratio(energy(inst.model, s), ref, RatioKind::ising_ground) <= 1.0 + 1e-12);
    }
}

TEST_CASE("random generators") {
    Rng rng = make_rng(1, 0);
    const auto m = random_dense_model(12, rng);
    CHECK(m.couplings().has_zero_diagonal());
    CHECK(m.couplings().nonzeros() == 12 * 11);
    for (double b : m.biases()) CHECK(std::abs(b) <= 1.0);
    const auto nb = random_dense_model(5, rng, false);
    for (double b : nb.biases()) CHECK(b == 0.0);

    const auto g = random_graph(40, 0.3, 2, rng);
    for (const auto& e : g.edges()) {
        CHECK(e.u < e.v);
        CHECK(e.weight != 0.0);
        CHECK(std::abs(e.weight) <= 2.0);
        CHECK(e.weight == std::round(e.weight));
    }
    const double expected = 0.3 * 40 * 39 / 2;
    CHECK(std::abs(static_cast<double>(g.edges().size()) - expected) < 5 * std::sqrt(expected));
    const auto complete = random_graph(10, 1.0, 0, rng);
    for (const auto& e : complete.edges()) CHECK(e.weight == 1.0);
    CHECK(complete.edges().size() == 45);
}
