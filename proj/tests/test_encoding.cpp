#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "qudit/encoding.hpp"

using namespace qudit;
using std::numbers::pi;

namespace {

AnsatzParams identity_params(const EncodingSpec& spec) {
    AnsatzParams p = AnsatzParams::zeros(spec);
    for (auto& layer : p.layers) layer.weights.setOnes();
    return p;
}

double max_abs(const CVector& v) { return v.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_SUITE("encoding") {

TEST_CASE("d=3 with four features fills one sublayer in order") {
    const auto spec = EncodingSpec::ladder(EncodingVariant::g1, 3, 4, 1);
    const Eigen::Vector4d x(0.1, 0.2, 0.3, 0.4);
    const auto sched = encode(x, spec, identity_params(spec));
    REQUIRE(sched.size() == 1);
    REQUIRE(sched[0].size() == 2);
    CHECK(sched[0][0].theta == 0.1);
    CHECK(sched[0][0].phi == 0.2);
    CHECK(sched[0][1].theta == 0.3);
    CHECK(sched[0][1].phi == 0.4);
}

TEST_CASE("qubit with four features uses two sublayers") {
    const auto spec = EncodingSpec::ladder(EncodingVariant::g2, 2, 4, 1);
    CHECK(spec.sublayers_per_layer() == 2);
    const auto sched = encode(Eigen::Vector4d(1, 2, 3, 4), spec, identity_params(spec));
    REQUIRE(sched.size() == 2);
    CHECK(sched[1][0].theta == 3.0);
    CHECK(sched[1][0].phi == 4.0);
}

TEST_CASE("affine map and padding") {
    const auto spec = EncodingSpec::ladder(EncodingVariant::g2, 4, 4, 1);
    CHECK(spec.padded_dim() == 6);
    AnsatzParams p = AnsatzParams::zeros(spec);
    p.layers[0].weights.col(0) << 2, 3, 4, 5;
    p.layers[0].bias << 1, 1, 1, 1;
    const auto sched = encode(Eigen::Vector4d(1, 1, 1, 1), spec, p);
    REQUIRE(sched.size() == 1);
    CHECK(sched[0][0].theta == 3.0);
    CHECK(sched[0][1].phi == 6.0);
    CHECK(sched[0][2].theta == 0.0);
    CHECK(sched[0][2].phi == 0.0);
}

TEST_CASE("g3 uses a full weight matrix and a single sublayer") {
    const auto spec = EncodingSpec::ladder(EncodingVariant::g3, 3, 5, 2);
    CHECK(spec.sublayers_per_layer() == 1);
    CHECK(spec.parameter_count() == 2 * 4 * 6);
    std::mt19937_64 rng(1);
    const auto p = AnsatzParams::random(spec, rng);
    Eigen::VectorXd x(5);
    x << 0.3, -0.2, 0.9, 1.1, -0.5;
    const auto sched = encode(x, spec, p);
    REQUIRE(sched.size() == 2);
    for (int l = 0; l < 2; ++l) {
        const Eigen::VectorXd xp = p.layers[l].weights * x + p.layers[l].bias;
        for (int i = 0; i < 2; ++i) {
            CHECK(sched[l][i].theta == doctest::Approx(xp[2 * i]).epsilon(1e-15));
            CHECK(sched[l][i].phi == doctest::Approx(xp[2 * i + 1]).epsilon(1e-15));
        }
    }
}

TEST_CASE("zero parameters give the initial state") {
    for (auto v : {EncodingVariant::g1, EncodingVariant::g2, EncodingVariant::g3}) {
        const auto spec = EncodingSpec::ladder(v, 4, 7, 2);
        const auto s = build_circuit(Eigen::VectorXd::Constant(7, 0.8), spec, AnsatzParams::zeros(spec));
        CHECK(max_abs(s.amplitudes() - initial_state(spec).amplitudes()) < 1e-15);
    }
    CHECK(initial_state(EncodingSpec::ladder(EncodingVariant::g1, 3, 2, 1))[0] == cplx(1, 0));
    CHECK(std::abs(initial_state(EncodingSpec::ladder(EncodingVariant::g2, 3, 2, 1))[2] - 1 / std::sqrt(3.0)) < 1e-15);
}

TEST_CASE("qutrit amplitudes follow the closed form") {
    const auto spec = EncodingSpec::ladder(EncodingVariant::g1, 3, 4, 1);
    const auto p = identity_params(spec);
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> ang(-2 * pi, 2 * pi);
    const cplx I(0, 1);
    for (int trial = 0; trial < 100; ++trial) {
        const double t0 = ang(rng), f0 = ang(rng), t1 = ang(rng), f1 = ang(rng);
        const auto s = build_circuit(Eigen::Vector4d(t0, f0, t1, f1), spec, p);
        const cplx c0 = std::cos(t0 / 2);
        const cplx c1 = -I * std::sin(t0 / 2) * std::cos(t1 / 2) * std::exp(I * f0);
        const cplx c2 = -std::sin(t0 / 2) * std::sin(t1 / 2) * std::exp(I * (f0 + f1));
        CHECK(std::abs(s[0] - c0) < 1e-12);
        CHECK(std::abs(s[1] - c1) < 1e-12);
        CHECK(std::abs(s[2] - c2) < 1e-12);
    }
}

TEST_CASE("two layers compose like two single-layer circuits") {
    std::mt19937_64 rng(4);
    const auto two = EncodingSpec::ladder(EncodingVariant::g1, 2, 3, 2);
    const auto p = AnsatzParams::random(two, rng);
    const Eigen::Vector3d x(0.4, -1.2, 0.7);
    const auto whole = build_circuit(x, two, p);

    const auto one = EncodingSpec::ladder(EncodingVariant::g1, 2, 3, 1);
    PureState s = initial_state(one);
    for (int l = 0; l < 2; ++l) {
        AnsatzParams single;
        single.layers = {p.layers[l]};
        s = apply_sequence(s, ladder_rotations(encode(x, one, single)));
    }
    CHECK(max_abs(whole.amplitudes() - s.amplitudes()) < 1e-13);
}

TEST_CASE("a computational virtual basis reproduces the ladder circuit") {
    std::mt19937_64 rng(9);
    VirtualBasis basis;
    for (int l = 0; l < 4; ++l) basis.states.push_back(PureState::basis(4, l));
    const auto spec = EncodingSpec::on_basis(EncodingVariant::g2, basis, 5, 2);
    CHECK(spec.transitions == 3);
    const auto p = AnsatzParams::random(spec, rng);
    Eigen::VectorXd x(5);
    x << 0.1, 0.2, -0.3, 0.4, 1.5;
    const auto a = build_circuit(x, spec, p);
    const auto b = build_circuit(x, spec, p, basis);
    CHECK(max_abs(a.amplitudes() - b.amplitudes()) < 1e-12);
}

TEST_CASE("virtual rotations are unitary for non-orthogonal endpoints") {
    std::mt19937_64 rng(13);
    VirtualBasis basis;
    for (int k = 0; k < 4; ++k) basis.states.push_back(testutil::random_state(2, rng));
    const CMatrix u = virtual_rotation_matrix(basis, 1, 0.7, -0.3);
    CHECK((u.adjoint() * u - CMatrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);

    const auto spec = EncodingSpec::on_basis(EncodingVariant::g2, basis, 4, 1);
    CHECK(spec.transitions == 3);
    const auto s = build_circuit(Eigen::Vector4d(1, 2, 3, 4), spec, AnsatzParams::random(spec, rng), basis);
    CHECK(std::abs(s.amplitudes().squaredNorm() - 1.0) < 1e-12);
    CHECK_THROWS_AS(build_circuit(Eigen::Vector4d(1, 2, 3, 4), spec, AnsatzParams::zeros(spec)), EncodingError);
}

TEST_CASE("flat parameter round trip") {
    std::mt19937_64 rng(2);
    for (auto v : {EncodingVariant::g1, EncodingVariant::g3}) {
        const auto spec = EncodingSpec::ladder(v, 3, 5, 3);
        const auto p = AnsatzParams::random(spec, rng);
        const auto flat = p.flatten();
        CHECK(static_cast<int>(flat.size()) == spec.parameter_count());
        CHECK(AnsatzParams::from_flat(spec, flat).flatten() == flat);
    }
}

TEST_CASE("random initialization ranges") {
    std::mt19937_64 rng(6);
    const auto spec = EncodingSpec::ladder(EncodingVariant::g2, 3, 30, 4);
    for (double v : AnsatzParams::random(spec, rng).flatten()) CHECK(std::abs(v) <= pi);
}

TEST_CASE("encoding errors") {
    const auto spec = EncodingSpec::ladder(EncodingVariant::g2, 3, 4, 1);
    CHECK_THROWS_AS(encode(Eigen::Vector3d(1, 2, 3), spec, AnsatzParams::zeros(spec)), EncodingError);
    const auto other = EncodingSpec::ladder(EncodingVariant::g3, 3, 4, 1);
    CHECK_THROWS_AS(encode(Eigen::Vector4d(1, 2, 3, 4), spec, AnsatzParams::zeros(other)), EncodingError);
    CHECK_THROWS_AS(EncodingSpec::ladder(EncodingVariant::g1, 3, 4, 0), EncodingError);
    CHECK_THROWS_AS(EncodingSpec::ladder(EncodingVariant::g1, 1, 4, 1), DimensionError);
    CHECK_THROWS_AS(parse_encoding("g4"), EncodingError);
    CHECK(parse_encoding("g3") == EncodingVariant::g3);
    const std::vector<double> short_flat(3, 0.0);
    CHECK_THROWS_AS(AnsatzParams::from_flat(spec, short_flat), EncodingError);
}

}
