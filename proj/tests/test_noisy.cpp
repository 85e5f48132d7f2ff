#include <cmath>
#include <numbers>

#include "doctest.h"
#include "helpers.hpp"
#include "qudit/data.hpp"
#include "qudit/mos.hpp"
#include "qudit/noisy.hpp"
#include "qudit/train.hpp"

using namespace qudit;
using std::numbers::pi;

namespace {

ReferenceSet trine() {
    GAConfig ga;
    ga.seed = 1;
    return ReferenceSet{evolve(ga, 2, 3).best.states};
}

NoisyProblem iris_problem(double T2, const ReferenceSet& refs, double T1 = 0.1) {
    return NoisyProblem{EncodingSpec::ladder(EncodingVariant::g2, 2, 4, 1), refs, NoiseModel::from_rabi_hz(1e7, T1, T2)};
}

}  // namespace

TEST_SUITE("noisy") {

TEST_CASE("a point already on its center has zero loss") {
    CVector minus(2);
    minus << 1, -1;
    const ReferenceSet refs{{PureState::uniform(2), PureState::normalized(minus)}};
    const NoisyProblem problem{EncodingSpec::ladder(EncodingVariant::g2, 2, 1, 1), refs,
                               NoiseModel::from_rabi_hz(1e7, 1e9, 1e9)};
    Samples s;
    s.x = Eigen::MatrixXd::Constant(1, 1, 0.7);
    s.y = {0};
    s.num_classes = 2;
    const auto params = AnsatzParams::zeros(problem.spec);
    // Zero parameters leave every encoding pulse with zero length.
    for (const auto& p : schedule_from_rotations(ladder_rotations(encode(s.x.row(0).transpose(), problem.spec, params)),
                                                 problem.noise.rabi))
        CHECK(p.duration == 0.0);
    const auto inv = reference_inverse_schedules(problem);
    CHECK(noisy_point_fidelity(s.x.row(0).transpose(), params, problem, inv[0]) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(noisy_point_fidelity(s.x.row(0).transpose(), params, problem, inv[1]) < 1e-6);
}

TEST_CASE("noiseless pulses classify like the state-vector model") {
    const auto sp = prepare(load_iris(testutil::data_dir() / "iris.csv", 1));
    const auto refs = trine();
    Problem clean{EncodingSpec::ladder(EncodingVariant::g2, 2, 4, 1), Method::Explicit, refs, {}};
    TrainConfig cfg;
    cfg.max_evals = 60;
    const auto res = train_single(sp.train, clean, cfg, 4);
    const double expected = test_accuracy(res.model, sp.test);
    const auto problem = iris_problem(1e9, refs, 1e9);
    CHECK(std::abs(noisy_test(res.model.params, sp.test, problem) - expected) <= 0.02);
    CHECK(noisy_loss(sp.train, problem, res.model.params) == doctest::Approx(res.final_loss).epsilon(1e-5));
}

TEST_CASE("heavy dephasing leaves chance accuracy") {
    const auto sp = prepare(load_iris(testutil::data_dir() / "iris.csv", 1));
    const auto problem = iris_problem(1e-11, trine());
    std::mt19937_64 rng(3);
    const double acc = noisy_test(AnsatzParams::random(problem.spec, rng), sp.test, problem);
    CHECK(acc >= 1.0 / 3 - 0.08);
    CHECK(acc <= 1.0 / 3 + 0.08);
}

TEST_CASE("spsa training evaluates the loss twice per iteration") {
    const auto sp = prepare(load_iris(testutil::data_dir() / "iris.csv", 1));
    const auto problem = iris_problem(1e-4, trine());
    std::mt19937_64 rng(5);
    const auto init = AnsatzParams::random(problem.spec, rng);
    SpsaConfig cfg;
    cfg.iterations = 6;
    const auto res = spsa_train(sp.train, problem, init, cfg, rng);
    CHECK(res.evaluations == 12);
    CHECK(res.history.size() == 12u);
    CHECK_FALSE(res.aborted);
    CHECK(res.best_loss == *std::min_element(res.history.begin(), res.history.end()));
    CHECK(noisy_loss(sp.train, problem, res.params) == doctest::Approx(res.best_loss).epsilon(1e-12));
}

TEST_CASE("chained runs carry parameters only after an improvement") {
    const auto sp = prepare(load_iris(testutil::data_dir() / "iris.csv", 1));
    const auto problem = iris_problem(1e-5, trine());
    ChainConfig cfg;
    cfg.runs = 6;
    cfg.spsa.iterations = 3;
    cfg.seed = 2;
    const auto recs = run_chain(sp.train, sp.test, problem, cfg);
    REQUIRE(recs.size() == 6u);
    CHECK(recs[0].reinitialized);
    CHECK_FALSE(recs[1].reinitialized);
    for (std::size_t r = 2; r < recs.size(); ++r)
        CHECK(recs[r].reinitialized == !(recs[r - 1].test_accuracy > recs[r - 2].test_accuracy));
    const auto again = run_chain(sp.train, sp.test, problem, cfg);
    for (std::size_t r = 0; r < recs.size(); ++r) {
        CHECK(again[r].test_accuracy == recs[r].test_accuracy);
        CHECK(again[r].train_loss == recs[r].train_loss);
    }
}

TEST_CASE("log grid") {
    const auto g = log_grid(1e-7, 1e-4, 12);
    REQUIRE(g.size() == 12u);
    CHECK(g.front() == 1e-7);
    CHECK(g.back() == 1e-4);
    for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] / g[i - 1] == doctest::Approx(std::pow(1e3, 1.0 / 11)));
    CHECK_THROWS(log_grid(0.0, 1.0, 3));
}

TEST_CASE("precondition errors") {
    const auto refs = trine();
    const auto problem = iris_problem(1e-4, refs);
    CHECK_THROWS_AS(noisy_test(AnsatzParams::zeros(problem.spec), Samples{}, problem), MetricError);
    NoisyProblem g1 = problem;
    g1.spec.variant = EncodingVariant::g1;
    CHECK_THROWS_AS(g1.check(3), EncodingError);
    CHECK_THROWS_AS(problem.check(2), MetricError);
}

}
