#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "qsplit/instances.hpp"
#include "qsplit/subsolver.hpp"

using namespace qsplit;

namespace {

IsingModel dense_model(std::size_t n, std::vector<double> a, std::vector<double> b) {
    return IsingModel(SymmetricMatrix::from_dense(n, a), std::move(b));
}

SolverConfig small_config(std::uint64_t seed) {
    SolverConfig cfg;
    cfg.num_reads = 10;
    cfg.sweeps = 200;
    cfg.seed = seed;
    return cfg;
}

} // namespace

TEST_CASE("SolverConfig validation") {
    SolverConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.num_reads = 0;
    CHECK_THROWS(cfg.validate());
    cfg = {};
    cfg.sweeps = 0;
    CHECK_THROWS(cfg.validate());
    cfg = {};
    cfg.beta_start = 10.0;
    cfg.beta_end = 1.0;
    CHECK_THROWS(cfg.validate());
    cfg = {};
    CHECK(cfg.num_reads == 100);
    CHECK(cfg.sweeps == 1000);
    CHECK(cfg.beta_start == 0.1);
    CHECK(cfg.beta_end == 10.0);
}

TEST_CASE("sa_solve small examples") {
    CHECK(sa_solve(dense_model(2, {0, 0, 0, 0}, {3, -2}), small_config(1)) == SpinVector{-1, 1});
    const auto ferro = dense_model(2, {0, -1, -1, 0}, {0, 0});
    const auto s = sa_solve(ferro, small_config(2));
    CHECK(energy(ferro, s) == -2.0);
    CHECK(s[0] == s[1]);
    // zero local field ends at +1
    CHECK(sa_solve(dense_model(3, std::vector<double>(9, 0.0), {0, 1, -1}), small_config(3)) == SpinVector{1, -1, 1});
}

TEST_CASE("sa_solve is seed-deterministic and stays in the spin domain") {
    std::mt19937_64 gen(12);
    const auto model = oracle::to_model(oracle::random_dense(30, gen));
    const auto a = sa_solve(model, small_config(99));
    const auto b = sa_solve(model, small_config(99));
    CHECK(a == b);
    CHECK(a.size() == 30);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK((a[i] == 1 || a[i] == -1));
    // linear schedule works too
    auto cfg = small_config(4);
    cfg.schedule = BetaScheduleKind::linear;
    CHECK(sa_solve(model, cfg).size() == 30);
    CHECK_THROWS(sa_solve(model, SolverConfig{0, 10, 0.1, 1.0, BetaScheduleKind::geometric, 0}));
}

TEST_CASE("sa_solve finds the exhaustive optimum on 12-spin dense models") {
    // 100 instances, each with its own seed; the oracle is a plain enumeration.
    std::mt19937_64 gen(2024);
    int hits = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const auto d = oracle::random_dense(12, gen);
        const auto best = oracle::exhaustive_min(d);
        SolverConfig cfg;
        cfg.sweeps = 2000;
        cfg.num_reads = 100;
        cfg.seed = static_cast<std::uint64_t>(trial);
        const auto s = sa_solve(oracle::to_model(d), cfg);
        if (oracle::close(oracle::energy(d, s.to_vector()), best.energy, 1e-9)) ++hits;
    }
    MESSAGE("SA optimum hits: " << hits << "/100");
    CHECK(hits >= 95);
}

TEST_CASE("brute_force_solve") {
    SUBCASE("single spin") {
        const auto r = brute_force_solve(dense_model(1, {0}, {1}));
        CHECK(r.spins == SpinVector{-1});
        CHECK(r.energy == -1.0);
    }
    SUBCASE("ferromagnetic tie goes to the smallest vector") {
        const auto r = brute_force_solve(dense_model(2, {0, -1, -1, 0}, {0, 0}));
        CHECK(r.spins == SpinVector{-1, -1});
        CHECK(r.energy == -2.0);
    }
    SUBCASE("agrees with plain enumeration, including ties") {
        std::mt19937_64 gen(31);
        for (int trial = 0; trial < 60; ++trial) {
            const std::size_t n = 1 + trial % 12;
            auto d = oracle::random_dense(n, gen, trial % 2 == 0, trial % 3 == 0);
            if (trial % 4 == 1) {
                // integer weights make ties common
                for (auto& v : d.a) v = std::round(v * 2);
                for (auto& v : d.b) v = std::round(v * 2);
                for (std::size_t i = 0; i < n; ++i)
                    for (std::size_t j = 0; j < i; ++j) d.a[i * n + j] = d.a[j * n + i];
            }
            const auto want = oracle::exhaustive_min(d);
            const auto got = brute_force_solve(oracle::to_model(d));
            CHECK(got.spins.to_vector() == want.spins);
            CHECK(oracle::close(got.energy, want.energy, 1e-12));
        }
    }
    SUBCASE("Reg N = 10 matches the candidate scan") {
        const auto inst = reg_instance(10);
        const auto gs = reg_ground_state(10);
        const auto r = brute_force_solve(inst.model);
        CHECK(r.energy == doctest::Approx(gs.energy).epsilon(1e-12));
        CHECK(r.spins == gs.spins);
    }
    SUBCASE("size guard") {
        const std::size_t n = kBruteForceMaxSize + 1;
        CHECK_THROWS(brute_force_solve(IsingModel(SymmetricMatrix(n), std::vector<double>(n, 0.0))));
    }
}

TEST_CASE("restricted_sa_solve") {
    std::mt19937_64 gen(17);
    const auto model = oracle::to_model(oracle::random_dense(10, gen));
    SUBCASE("complete mask equals plain SA") {
        CHECK(restricted_sa_solve(model, complete_mask(10), small_config(5)) == sa_solve(model, small_config(5)));
    }
    SUBCASE("empty mask optimizes the linear term only") {
        const auto s = restricted_sa_solve(model, empty_mask(10), small_config(6));
        for (std::size_t i = 0; i < 10; ++i) CHECK(s[i] == (model.biases()[i] > 0 ? -1 : 1));
        const IsingModel zero_bias(model.couplings(), std::vector<double>(10, 0.0));
        CHECK(restricted_sa_solve(zero_bias, empty_mask(10), small_config(6)) == SpinVector::ones(10));
    }
    SUBCASE("Reg N = 48 on P2 never beats the oracle") {
        const auto inst = reg_instance(48);
        const double opt = reg_ground_state(48).energy;
        SolverConfig cfg;
        cfg.num_reads = 20;
        cfg.sweeps = 300;
        for (std::uint64_t seed = 0; seed < 3; ++seed) {
            cfg.seed = seed;
            const auto s = restricted_sa_solve(inst.model, pegasus_mask(2), cfg);
            CHECK(energy(inst.model, s) >= opt - 1e-9);
        }
    }
    CHECK_THROWS(restricted_sa_solve(model, complete_mask(9), small_config(1)));
}

TEST_CASE("restrict_to_mask and respects_mask") {
    std::mt19937_64 gen(19);
    const auto model = oracle::to_model(oracle::random_dense(8, gen, true, true));
    const auto mask = chimera_mask(1, 1, 4);
    const auto r = restrict_to_mask(model, mask);
    CHECK(respects_mask(r, mask));
    CHECK_FALSE(respects_mask(model, mask));
    for (std::size_t i = 0; i < 8; ++i) {
        CHECK(r.couplings().at(i, i) == model.couplings().at(i, i));
        for (std::size_t j = 0; j < 8; ++j) {
            if (i != j) CHECK(r.couplings().at(i, j) == (mask.has_edge(i, j) ? model.couplings().at(i, j) : 0.0));
        }
    }
    CHECK(r.biases() == model.biases());
}

TEST_CASE("sampler seam") {
    const auto model = dense_model(2, {0, -1, -1, 0}, {0, 0});
    ExhaustiveSampler exact;
    CHECK(exact.sample(model, 0) == SpinVector{-1, -1});
    AnnealingSampler sa(small_config(0));
    CHECK(energy(model, sa.sample(model, 5)) == -2.0);
    CHECK(sa.sample(model, 5) == sa.sample(model, 5));
    int calls = 0;
    CallbackSampler cb(
        [&](const IsingModel& p, std::uint64_t) {
            ++calls;
            return SpinVector::ones(p.size());
        },
        "ones");
    CHECK(checked_sample(cb, model, 0) == SpinVector{1, 1});
    CHECK(calls == 1);
    CHECK(cb.name() == "ones");
    CallbackSampler bad([](const IsingModel&, std::uint64_t) { return SpinVector{1}; }, "bad");
    CHECK_THROWS(checked_sample(bad, model, 0));
}
