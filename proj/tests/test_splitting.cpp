#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>

#include "doctest.h"
#include "oracles.hpp"
#include "qsplit/instances.hpp"
#include "qsplit/splitting.hpp"

using namespace qsplit;

namespace {

SymmetricMatrix dense_matrix(std::size_t n, std::vector<double> a) { return SymmetricMatrix::from_dense(n, a); }

double max_abs_eigenvalue(const SymmetricMatrix& m) {
    const std::size_t n = m.size();
    const auto dense = m.to_dense();
    Eigen::MatrixXd a(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a(i, j) = dense[i * n + j];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

// Candidate set computed directly from its definition.
std::vector<double> candidate_oracle(std::vector<double> l, int maxsubiter) {
    for (auto& x : l) x = std::abs(x);
    std::sort(l.begin(), l.end());
    std::vector<double> padded{0.0};
    padded.insert(padded.end(), l.begin(), l.end());
    padded.push_back(2.0 * padded.back());
    std::vector<double> mids;
    for (std::size_t i = 0; i + 1 < padded.size(); ++i) mids.push_back((padded[i] + padded[i + 1]) / 2.0);
    mids.erase(std::unique(mids.begin(), mids.end()), mids.end());
    const std::size_t stride = static_cast<std::size_t>(std::ceil(static_cast<double>(mids.size()) / maxsubiter));
    std::vector<double> out;
    for (std::size_t i = 0; i < mids.size(); i += stride) out.push_back(mids[i]);
    return out;
}

SplitConfig fixed_config(double lambda, int maxiter, std::uint64_t seed) {
    SplitConfig cfg;
    cfg.maxiter = maxiter;
    cfg.lambda = LambdaPolicy{LambdaMode::fixed, lambda};
    cfg.seed = seed;
    return cfg;
}

} // namespace

TEST_CASE("LambdaPolicy and SplitConfig") {
    CHECK(LambdaPolicy::parse("scan").mode == LambdaMode::scan);
    CHECK(LambdaPolicy::parse("zero").mode == LambdaMode::zero);
    CHECK(LambdaPolicy::parse("monotone").mode == LambdaMode::monotone);
    const auto f = LambdaPolicy::parse("fixed:0.25");
    CHECK(f.mode == LambdaMode::fixed);
    CHECK(f.value == 0.25);
    CHECK(LambdaPolicy::parse(f.to_string()).value == 0.25);
    CHECK_THROWS(LambdaPolicy::parse("fixed:-1"));
    CHECK_THROWS(LambdaPolicy::parse("fixed:"));
    CHECK_THROWS(LambdaPolicy::parse("sometimes"));
    SplitConfig cfg;
    CHECK(cfg.maxsubiter == 15);
    CHECK(cfg.gradient_factor_two);
    CHECK(cfg.diagonal_shift == 0.0);
    cfg.maxsubiter = 0;
    CHECK_THROWS(cfg.validate());
}

TEST_CASE("split examples") {
    std::mt19937_64 gen(1);
    const auto model = oracle::to_model(oracle::random_dense(8, gen));
    const auto id = Permutation::identity(8);
    SUBCASE("complete mask") {
        const auto pair = split(model, complete_mask(8), id);
        for (std::size_t i = 0; i < 8; ++i)
            for (std::size_t j = 0; j < 8; ++j) {
                if (i == j) continue;
                CHECK(pair.lin.at(i, j) == 0.0);
                CHECK(pair.quad.at(i, j) == model.couplings().at(i, j));
            }
    }
    SUBCASE("empty mask") {
        const auto pair = split(model, empty_mask(8), id);
        CHECK(pair.quad.is_zero());
        CHECK(pair.lin == model.couplings());
    }
    SUBCASE("K8 on a Chimera unit cell") {
        const auto pair = split(model, chimera_mask(1, 1, 4), id);
        CHECK(pair.quad.nonzeros() == 2 * 16);
        CHECK(pair.lin.nonzeros() == 2 * (28 - 16));
    }
    CHECK_THROWS(split(model, complete_mask(7), Permutation::identity(7)));
}

TEST_CASE("split is exact and respects the permuted mask") {
    std::mt19937_64 gen(2);
    Rng rng = make_rng(2, 2);
    const auto mask = pegasus_mask(2);
    for (int trial = 0; trial < 20; ++trial) {
        const auto model = oracle::to_model(oracle::random_dense(48, gen, true, trial % 2 == 0));
        const auto p = random_permutation(48, rng);
        const auto pair = split(model, mask, p);
        const auto pm = permuted_mask(mask, p);
        for (std::size_t i = 0; i < 48; ++i)
            for (std::size_t j = 0; j < 48; ++j) {
                CHECK(pair.quad.at(i, j) + pair.lin.at(i, j) == model.couplings().at(i, j));
                if (!pm.has_edge(i, j)) CHECK(pair.quad.at(i, j) == 0.0);
            }
    }
}

TEST_CASE("linearized_subproblem") {
    const std::vector<double> zero4(4, 0.0);
    SUBCASE("damping alone") {
        const SplitPair pair{SymmetricMatrix(4), SymmetricMatrix(4)};
        const SpinVector s{1, -1, 1, -1};
        const auto sub = linearized_subproblem(pair, zero4, s, 1.0);
        CHECK(sub.biases() == std::vector<double>{-1, 1, -1, 1});
    }
    SUBCASE("hand example") {
        const SplitPair pair{SymmetricMatrix(4), dense_matrix(4, {0, 1, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0})};
        const auto sub = linearized_subproblem(pair, zero4, SpinVector::ones(4), 0.0);
        CHECK(sub.biases() == std::vector<double>{2, 2, 0, 0});
        const auto half = linearized_subproblem(pair, zero4, SpinVector::ones(4), 0.0, false);
        CHECK(half.biases() == std::vector<double>{1, 1, 0, 0});
        const std::vector<double> bias{0.5, 0, 0, -1};
        CHECK(linear_coefficient(pair, bias, SpinVector::ones(4)) == std::vector<double>{2.5, 2, 0, -1});
    }
    SUBCASE("quadratic part is passed through") {
        std::mt19937_64 gen(3);
        const auto model = oracle::to_model(oracle::random_dense(8, gen));
        const auto pair = split(model, chimera_mask(1, 1, 4), Permutation::identity(8));
        CHECK(linearized_subproblem(pair, model.biases(), SpinVector::ones(8), 0.3).couplings() == pair.quad);
    }
    CHECK_THROWS(linearized_subproblem({SymmetricMatrix(2), SymmetricMatrix(2)}, std::vector<double>(2, 0.0),
                                       SpinVector::ones(2), -0.1));
}

TEST_CASE("lambda_candidates") {
    CHECK(lambda_candidates(std::vector<double>{1, 2, 3}, 4) == std::vector<double>{0.5, 1.5, 2.5, 4.5});
    CHECK(lambda_candidates(std::vector<double>{3, -1, 2}, 15) == std::vector<double>{0.5, 1.5, 2.5, 4.5});
    CHECK(lambda_candidates(std::vector<double>{0, 0, 0}, 15) == std::vector<double>{0});
    CHECK(lambda_candidates(std::vector<double>{2}, 15) == std::vector<double>{1, 3});
    CHECK(lambda_candidates(std::vector<double>{1, 2, 3}, 2) == std::vector<double>{0.5, 2.5});
    CHECK(lambda_candidates(std::vector<double>{1, 2, 3}, 1) == std::vector<double>{0.5});
    CHECK_THROWS(lambda_candidates(std::vector<double>{1}, 0));

    const SplitPair none{SymmetricMatrix(5), SymmetricMatrix(5)};
    CHECK(lambda_candidates(none, std::vector<double>(5, 0.0), SpinVector::ones(5), 15) == std::vector<double>{0});

    std::mt19937_64 gen(4);
    std::uniform_int_distribution<int> small(-3, 3);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + trial % 40;
        std::vector<double> l(n);
        for (auto& x : l) x = trial % 2 ? small(gen) : std::uniform_real_distribution<double>(-5, 5)(gen);
        const int maxsub = 1 + trial % 17;
        const auto got = lambda_candidates(l, maxsub);
        CHECK(got == candidate_oracle(l, maxsub));
        CHECK(got.size() <= static_cast<std::size_t>(maxsub));
        CHECK(std::is_sorted(got.begin(), got.end()));
    }
}

TEST_CASE("spectral_norm and monotone_lambda") {
    const SplitPair swap{SymmetricMatrix(2), dense_matrix(2, {0, 1, 1, 0})};
    CHECK(monotone_lambda(swap) == doctest::Approx(2.0).epsilon(1e-9));
    const SplitPair none{SymmetricMatrix(3), SymmetricMatrix(3)};
    CHECK(monotone_lambda(none) == 0.0);

    std::mt19937_64 gen(5);
    for (int trial = 0; trial < 30; ++trial) {
        const auto d = oracle::random_dense(8, gen, false, trial % 2 == 0);
        const auto m = dense_matrix(8, d.a);
        CHECK(std::abs(spectral_norm(m) - max_abs_eigenvalue(m)) <= 1e-4);
    }
    // negative-dominant spectrum
    const auto neg = dense_matrix(2, {-3, 0, 0, 1});
    CHECK(spectral_norm(neg) == doctest::Approx(3.0).epsilon(1e-6));
}

TEST_CASE("linearization gap identity") {
    std::mt19937_64 gen(6);
    const auto id = Permutation::identity(10);
    const auto mask = mask_for_problem(10, TopologySpec::parse("chimera"));
    Rng rng = make_rng(6, 2);
    for (int trial = 0; trial < 1000; ++trial) {
        const auto model = oracle::to_model(oracle::random_dense(10, gen, false, trial % 2 == 0));
        const auto pair = split(model, mask, random_permutation(10, rng));
        const auto s = oracle::spin_vector(oracle::random_spins(10, gen));
        const auto sp = oracle::spin_vector(oracle::random_spins(10, gen));
        CHECK(std::abs(linearization_gap(pair, s, sp) - linearization_gap_quadratic(pair, s, sp)) <= 1e-9);
        CHECK(linearization_gap(pair, s, s) == 0.0);
    }
    // exactly one changed entry and zero diagonal: the linearization is exact
    for (int trial = 0; trial < 100; ++trial) {
        const auto model = oracle::to_model(oracle::random_dense(10, gen, false, false));
        const auto pair = split(model, empty_mask(10), id);
        const auto sp = oracle::spin_vector(oracle::random_spins(10, gen));
        auto s = sp;
        s.flip(gen() % 10);
        CHECK(std::abs(linearization_gap(pair, s, sp)) <= 1e-12);
    }
}

TEST_CASE("split_step with a complete mask solves the problem in one step") {
    std::mt19937_64 gen(7);
    ExhaustiveSampler exact;
    for (int trial = 0; trial < 5; ++trial) {
        const auto d = oracle::random_dense(10, gen);
        const auto model = oracle::to_model(d);
        SplitConfig cfg;
        cfg.maxiter = 1;
        cfg.seed = static_cast<std::uint64_t>(trial);
        const auto result = run_splitting(model, complete_mask(10), cfg, exact);
        CHECK(oracle::close(result.state.best_energy, oracle::exhaustive_min(d).energy, 1e-12));
    }
}

TEST_CASE("empty mask with lambda = 0 is the projected gradient sign step") {
    std::mt19937_64 gen(8);
    SolverConfig sc;
    sc.num_reads = 2;
    sc.sweeps = 10;
    AnnealingSampler sa(sc);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 3 + trial % 20;
        const auto model = oracle::to_model(oracle::random_dense(n, gen, false));
        const auto s0 = oracle::spin_vector(oracle::random_spins(n, gen));
        auto state = IterationState::start(model, s0);
        SplitContext ctx{make_rng(1, 2), 9};
        TraceRecorder trace;
        const auto next = split_step(model, empty_mask(n), state, fixed_config(0.0, 1, 0), sa, ctx, trace);
        const auto g = model.couplings().multiply(s0);
        for (std::size_t i = 0; i < n; ++i) CHECK(next.current[i] == (2 * g[i] > 0 ? -1 : 1));
        CHECK(trace.rows().size() == 1);
    }
}

TEST_CASE("Reg N = 20 on a truncated Chimera mask with an exact inner solver") {
    // Runs end in the ground state or in its negation s_{+-}(k), which the
    // exact step cannot leave (the quadratic part is sign symmetric).
    const auto inst = reg_instance(20);
    const auto gs = reg_ground_state(20);
    const auto mirror = gs.spins.negated();
    std::vector<std::size_t> first(20);
    for (std::size_t i = 0; i < 20; ++i) first[i] = i;
    const auto mask = chimera_mask(1, 3, 4).induced(first, "chimera:1,3,4[:20]");
    ExhaustiveSampler exact;
    int within = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        SplitConfig cfg;
        cfg.maxiter = 10;
        cfg.seed = seed;
        const auto result = run_splitting(inst.model, mask, cfg, exact);
        const double ratio = result.state.best_energy / gs.energy;
        if (ratio >= 0.98) ++within;
        CHECK(result.state.best_energy >= gs.energy - 1e-9);
        CHECK((result.state.best == gs.spins || result.state.best == mirror));
    }
    MESSAGE("seeds within 2% of the optimum: " << within << "/10");
    CHECK(within >= 1);

    IterationState state = IterationState::start(inst.model, mirror);
    SplitContext ctx{make_rng(4, 2), 4};
    TraceRecorder trace;
    SplitConfig cfg;
    for (int k = 0; k < 20; ++k) {
        state = split_step(inst.model, mask, state, cfg, exact, ctx, trace);
        CHECK(state.current == mirror);
    }
}

TEST_CASE("run_splitting bookkeeping") {
    std::mt19937_64 gen(9);
    const auto model = oracle::to_model(oracle::random_dense(30, gen));
    const auto mask = mask_for_problem(30, TopologySpec::parse("chimera"));
    SolverConfig sc;
    sc.num_reads = 5;
    sc.sweeps = 50;
    AnnealingSampler sa(sc);

    SUBCASE("maxiter = 0") {
        SplitConfig cfg;
        cfg.maxiter = 0;
        const auto r = run_splitting(model, mask, cfg, sa);
        CHECK(r.rows.size() == 1);
        CHECK(r.rows[0].iteration == 0);
        CHECK(r.rows[0].call == 0);
        CHECK(r.state.calls == 0);
        CHECK(r.rows[0].energy == doctest::Approx(energy(model, r.state.current)));
    }
    SUBCASE("deterministic per seed, best non-increasing, one row per call") {
        for (auto mode : {"scan", "zero", "monotone", "fixed:0.5"}) {
            SplitConfig cfg;
            cfg.maxiter = 4;
            cfg.maxsubiter = 6;
            cfg.lambda = LambdaPolicy::parse(mode);
            cfg.seed = 77;
            const auto a = run_splitting(model, mask, cfg, sa);
            const auto b = run_splitting(model, mask, cfg, sa);
            REQUIRE(a.rows.size() == b.rows.size());
            for (std::size_t i = 0; i < a.rows.size(); ++i) {
                CHECK(a.rows[i].energy == b.rows[i].energy);
                CHECK(a.rows[i].lambda == b.rows[i].lambda);
            }
            CHECK(a.state.best == b.state.best);
            CHECK(static_cast<int>(a.rows.size()) == a.state.calls + 1);
            std::map<int, int> per_iteration;
            for (std::size_t i = 1; i < a.rows.size(); ++i) {
                CHECK(a.rows[i].best_energy <= a.rows[i - 1].best_energy);
                CHECK(a.rows[i].call == static_cast<int>(i));
                ++per_iteration[a.rows[i].iteration];
            }
            for (const auto& [it, count] : per_iteration) CHECK(count <= cfg.maxsubiter);
            if (cfg.lambda.mode == LambdaMode::zero) {
                for (const auto& [it, count] : per_iteration) CHECK(count == cfg.maxsubiter);
            }
            CHECK(a.state.best_energy == doctest::Approx(energy(model, a.state.best)));
        }
    }
    SUBCASE("scan keeps the incumbent, so the current energy never rises") {
        SplitConfig cfg;
        cfg.maxiter = 6;
        cfg.seed = 3;
        IterationState state = IterationState::start(model, SpinVector::ones(30));
        SplitContext ctx{make_rng(3, 2), 11};
        TraceRecorder trace;
        double last = state.current_energy;
        for (int k = 0; k < cfg.maxiter; ++k) {
            state = split_step(model, mask, state, cfg, sa, ctx, trace);
            CHECK(state.current_energy <= last);
            last = state.current_energy;
        }
    }
    SUBCASE("zero mode draws a fresh permutation for every call") {
        std::vector<std::vector<double>> seen;
        CallbackSampler spy(
            [&](const IsingModel& p, std::uint64_t) {
                seen.push_back(p.couplings().to_dense());
                return SpinVector::ones(p.size());
            },
            "spy");
        SplitConfig cfg;
        cfg.maxiter = 1;
        cfg.maxsubiter = 5;
        cfg.lambda = LambdaPolicy::parse("zero");
        run_splitting(model, mask, cfg, spy);
        REQUIRE(seen.size() == 5);
        std::set<std::vector<double>> distinct(seen.begin(), seen.end());
        CHECK(distinct.size() == 5);
    }
    SUBCASE("diagonal shift leaves reported energies true") {
        SplitConfig cfg;
        cfg.maxiter = 2;
        cfg.diagonal_shift = 1.5;
        const auto r = run_splitting(model, mask, cfg, sa);
        CHECK(r.state.best_energy == doctest::Approx(energy(model, r.state.best)));
    }
    CHECK_THROWS(run_splitting(model, complete_mask(29), SplitConfig{}, sa));
}

TEST_CASE("monotone mode with an exact solver never increases the energy") {
    std::mt19937_64 gen(10);
    ExhaustiveSampler exact;
    for (int trial = 0; trial < 5; ++trial) {
        const std::size_t n = 6 + trial;
        const auto model = oracle::to_model(oracle::random_dense(n, gen));
        SplitConfig cfg;
        cfg.maxiter = 30;
        cfg.lambda = LambdaPolicy::parse("monotone");
        cfg.seed = static_cast<std::uint64_t>(trial);
        const auto r = run_splitting(model, mask_for_problem(n, TopologySpec::parse("chimera")), cfg, exact);
        for (std::size_t i = 1; i < r.rows.size(); ++i) CHECK(r.rows[i].energy <= r.rows[i - 1].energy);
    }
}

TEST_CASE("monotone iterates only move to strictly lower energies") {
    // No state can repeat, so the sequence settles after at most 2^n moves.
    std::mt19937_64 gen(11);
    ExhaustiveSampler exact;
    for (int trial = 0; trial < 4; ++trial) {
        const std::size_t n = 5 + trial;
        const auto model = oracle::to_model(oracle::random_dense(n, gen));
        const auto mask = mask_for_problem(n, TopologySpec::parse("chimera"));
        SplitConfig cfg;
        cfg.lambda = LambdaPolicy::parse("monotone");
        IterationState state = IterationState::start(model, SpinVector::ones(n));
        SplitContext ctx{make_rng(static_cast<std::uint64_t>(trial), 2), 5};
        TraceRecorder trace;
        std::set<std::vector<int>> visited{state.current.to_vector()};
        int moves = 0;
        const int budget = 1 << n;
        for (int k = 0; k < budget; ++k) {
            const auto next = split_step(model, mask, state, cfg, exact, ctx, trace);
            if (!(next.current == state.current)) {
                CHECK(next.current_energy < state.current_energy);
                CHECK(visited.insert(next.current.to_vector()).second);
                ++moves;
            }
            state = next;
        }
        CHECK(moves < budget);
    }
}

TEST_CASE("sa_reg_step") {
    SUBCASE("weight at very high temperature") {
        for (double r : {0.0, 0.3, 0.9}) {
            CHECK(std::abs(sa_reg_weight(5.0, 1e9, r) - (1.0 - r)) <= 1e-6);
            CHECK(std::abs(sa_reg_weight(-5.0, 1e9, r) - (1.0 - r)) <= 1e-6);
        }
        CHECK(std::isfinite(sa_reg_weight(-1e9, 1e-9, 0.5)));
    }
    std::mt19937_64 gen(12);
    const auto model = oracle::to_model(oracle::random_dense(8, gen));
    ExhaustiveSampler exact;
    SUBCASE("empty index set leaves the state unchanged") {
        SaRegConfig cfg;
        cfg.subset_size = 0;
        Rng rng = make_rng(1, 6);
        const auto state = IterationState::start(model, SpinVector::ones(8));
        const auto next = sa_reg_step(model, state, cfg, 1, exact, rng);
        CHECK(next.current == state.current);
        CHECK(next.calls == state.calls);
    }
    SUBCASE("explores above the running minimum") {
        SaRegConfig cfg;
        cfg.temperature_c = 1.0;
        Rng rng = make_rng(2, 6);
        IterationState state = IterationState::start(model, SpinVector::ones(8));
        std::set<double> above;
        for (int k = 1; k <= 500; ++k) {
            state = sa_reg_step(model, state, cfg, k, exact, rng);
            CHECK(state.best_energy <= state.current_energy);
            if (state.current_energy > state.best_energy + 1e-12) above.insert(state.current_energy);
        }
        // unit-scale couplings: gaps exceed the weight bound, so no climbs
        MESSAGE("distinct energy levels above the running minimum: " << above.size());
    }
    SUBCASE("weak couplings climb above the running minimum") {
        std::mt19937_64 wgen(40);
        int exploring = 0;
        for (int trial = 0; trial < 20; ++trial) {
            auto d = oracle::random_dense(8, wgen);
            for (auto& x : d.a) x *= 0.1;
            for (auto& x : d.b) x *= 0.1;
            const auto weak = oracle::to_model(d);
            Rng rng = make_rng(static_cast<std::uint64_t>(trial), 6);
            IterationState state = IterationState::start(weak, SpinVector::ones(8));
            std::set<double> above;
            for (int k = 1; k <= 500; ++k) {
                state = sa_reg_step(weak, state, SaRegConfig{}, k, exact, rng);
                CHECK(state.best_energy <= state.current_energy);
                if (state.current_energy > state.best_energy + 1e-12) above.insert(state.current_energy);
            }
            if (above.size() >= 2) ++exploring;
        }
        MESSAGE("models with >= 2 levels above the running minimum: " << exploring << "/20");
        CHECK(exploring >= 10);
    }
    SUBCASE("argument checks") {
        Rng rng = make_rng(3, 6);
        const auto state = IterationState::start(model, SpinVector::ones(8));
        CHECK_THROWS(sa_reg_step(model, state, SaRegConfig{}, 0, exact, rng));
        CHECK_THROWS(sa_reg_step(model, state, SaRegConfig{0.0, 4}, 1, exact, rng));
    }
}
