#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "qudit/data.hpp"
#include "qudit/train.hpp"

using namespace qudit;
using std::numbers::pi;

namespace {

PreparedSplits iris_splits(std::uint64_t seed = 1) {
    return prepare(load_iris(testutil::data_dir() / "iris.csv", seed));
}

Problem explicit_problem(EncodingVariant v, int d, int data_dim, int K) {
    return Problem{EncodingSpec::ladder(v, d, data_dim, 1), Method::Explicit, ReferenceSet::orthonormal(d, K), {}};
}

// Fourth-order central stencil written directly against training_loss.
std::vector<double> stencil_gradient(const Samples& s, const Problem& p, const std::vector<double>& x, double h) {
    std::vector<double> g(x.size());
    auto at = [&](std::size_t i, double shift) {
        auto y = x;
        y[i] += shift;
        return training_loss(s, p, AnsatzParams::from_flat(p.spec, y));
    };
    for (std::size_t i = 0; i < x.size(); ++i)
        g[i] = (-at(i, 2 * h) + 8 * at(i, h) - 8 * at(i, -h) + at(i, -2 * h)) / (12 * h);
    return g;
}

}  // namespace

TEST_SUITE("train") {

TEST_CASE("points already on their centers stop at the first evaluation") {
    Samples s;
    s.x = Eigen::MatrixXd(2, 1);
    s.x << 0.0, 1.0;
    s.y = {0, 1};
    s.num_classes = 2;
    const auto problem = explicit_problem(EncodingVariant::g1, 2, 1, 2);
    AnsatzParams init = AnsatzParams::zeros(problem.spec);
    init.layers[0].weights(0, 0) = pi;
    TrainConfig cfg;
    const auto res = train_single(s, problem, cfg, 1, init);
    CHECK(res.final_loss == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(res.history.size() == 1);
    CHECK(res.converged);
    CHECK(test_accuracy(res.model, s) == 1.0);
}

TEST_CASE("training is reproducible and independent of the worker count") {
    const auto sp = iris_splits();
    const auto problem = explicit_problem(EncodingVariant::g2, 3, 4, 3);
    TrainConfig cfg;
    cfg.restarts = 3;
    cfg.max_evals = 15;
    cfg.seed = 12;
    const auto a = train_restarts(sp.train, problem, cfg);
    cfg.jobs = 3;
    const auto b = train_restarts(sp.train, problem, cfg);
    REQUIRE(a.size() == 3);
    for (std::size_t r = 0; r < a.size(); ++r) {
        CHECK(a[r].history == b[r].history);
        CHECK(a[r].model.params.flatten() == b[r].model.params.flatten());
    }
    CHECK(a[0].history != a[1].history);
}

TEST_CASE("training lowers both losses") {
    const auto sp = iris_splits();
    for (auto m : {Method::Explicit, Method::Implicit}) {
        auto problem = explicit_problem(EncodingVariant::g1, 3, 4, 3);
        problem.method = m;
        if (m == Method::Implicit) problem.refs.reset();
        TrainConfig cfg;
        cfg.method = m;
        cfg.max_evals = 40;
        const auto res = train_single(sp.train, problem, cfg, 3);
        CHECK(res.final_loss < res.history.front());
        CHECK(res.final_loss == *std::min_element(res.history.begin(), res.history.end()));
        const double acc = test_accuracy(res.model, sp.test);
        CHECK(acc >= 0.0);
        CHECK(acc <= 1.0);
    }
}

TEST_CASE("finite-difference gradients match a higher-order stencil") {
    const auto sp = iris_splits();
    std::mt19937_64 rng(77);
    for (auto m : {Method::Explicit, Method::Implicit}) {
        auto problem = explicit_problem(EncodingVariant::g2, 3, 4, 3);
        problem.method = m;
        for (int trial = 0; trial < 5; ++trial) {
            const auto x = AnsatzParams::random(problem.spec, rng).flatten();
            const Objective f = [&](std::span<const double> p) {
                return training_loss(sp.train, problem, AnsatzParams::from_flat(problem.spec, p));
            };
            const auto g = central_gradient(f, x, 1e-5);
            const auto o = stencil_gradient(sp.train, problem, x, 1e-3);
            double diff = 0.0, scale = 0.0;
            for (std::size_t i = 0; i < g.size(); ++i) {
                diff = std::max(diff, std::abs(g[i] - o[i]));
                scale = std::max(scale, std::abs(o[i]));
            }
            CHECK(diff / scale < 1e-5);
        }
    }
}

TEST_CASE("constant predictions on a balanced three-class set score one third") {
    const auto sp = iris_splits();
    Model model;
    model.problem = explicit_problem(EncodingVariant::g1, 3, 4, 3);
    model.params = AnsatzParams::zeros(model.problem.spec);  // every point maps to |0>, center 0
    CHECK(test_accuracy(model, sp.test) == doctest::Approx(1.0 / 3.0));
    for (int i = 0; i < 5; ++i) CHECK(model.classify(sp.test.x.row(i).transpose()) == 0);
}

TEST_CASE("a point on a center is assigned to that center") {
    Model model;
    model.problem = explicit_problem(EncodingVariant::g1, 3, 2, 3);
    model.params = AnsatzParams::zeros(model.problem.spec);
    model.params.layers[0].weights(0, 0) = 1.0;
    model.params.layers[0].bias(1) = -pi / 2;
    // theta = pi moves |0> onto level 1.
    CHECK(model.classify(Eigen::Vector2d(pi, 0.0)) == 1);
    // Equal fidelity to centers 0 and 1 goes to class 0.
    CHECK(model.classify(Eigen::Vector2d(pi / 2, 0.0)) == 0);
}

TEST_CASE("relabelling classes and centers consistently keeps the accuracy") {
    const auto sp = iris_splits();
    const auto problem = explicit_problem(EncodingVariant::g2, 3, 4, 3);
    TrainConfig cfg;
    cfg.max_evals = 30;
    const auto res = train_single(sp.train, problem, cfg, 5);
    const double base = test_accuracy(res.model, sp.test);

    const std::vector<int> perm{2, 0, 1};
    Model permuted = res.model;
    for (int k = 0; k < 3; ++k) permuted.problem.refs->centers[perm[k]] = res.model.problem.refs->centers[k];
    Samples relabelled = sp.test;
    for (auto& y : relabelled.y) y = perm[y];
    CHECK(test_accuracy(permuted, relabelled) == base);
}

TEST_CASE("implicit scores are mean overlaps with the training ensembles") {
    const auto sp = iris_splits();
    Problem problem{EncodingSpec::ladder(EncodingVariant::g1, 2, 4, 1), Method::Implicit, {}, {}};
    TrainConfig cfg;
    cfg.method = Method::Implicit;
    cfg.max_evals = 5;
    const auto res = train_single(sp.train, problem, cfg, 2);
    REQUIRE(res.model.class_densities.size() == 3);
    const Eigen::VectorXd x = sp.test.x.row(0).transpose();
    const auto scores = res.model.class_scores(x);
    const auto psi = res.model.embed(x);
    for (int k = 0; k < 3; ++k) {
        double mean = 0.0;
        int n = 0;
        for (int i = 0; i < sp.train.size(); ++i) {
            if (sp.train.y[i] != k) continue;
            mean += fidelity(psi, res.model.embed(sp.train.x.row(i).transpose()));
            ++n;
        }
        CHECK(scores[k] == doctest::Approx(mean / n).epsilon(1e-12));
    }
}

TEST_CASE("training errors") {
    const auto sp = iris_splits();
    Problem problem{EncodingSpec::ladder(EncodingVariant::g2, 3, 4, 1), Method::Explicit, {}, {}};
    TrainConfig cfg;
    CHECK_THROWS_AS(train_single(sp.train, problem, cfg, 1), MetricError);
    CHECK_THROWS_AS(test_accuracy(Model{}, Samples{}), MetricError);
    cfg.restarts = 0;
    CHECK_THROWS_AS(cfg.check(), std::invalid_argument);
    Model untrained;
    untrained.problem = problem;
    untrained.problem.method = Method::Implicit;
    untrained.params = AnsatzParams::zeros(problem.spec);
    CHECK_THROWS_AS(untrained.classify(sp.test.x.row(0).transpose()), MetricError);
}

}
