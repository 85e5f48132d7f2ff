#include "qudit/state.hpp"

#include <cmath>
#include <string>

namespace qudit {

namespace {
constexpr double kNormSlack = 1e-8;
}

PureState::PureState(CVector amplitudes) : amps_(std::move(amplitudes)) {
    if (amps_.size() < 2)
        throw DimensionError("qudit dimension must be at least 2, got " + std::to_string(amps_.size()));
    const double n2 = amps_.squaredNorm();
    if (!std::isfinite(n2) || std::abs(n2 - 1.0) > kNormSlack)
        throw std::invalid_argument("state is not normalized (|psi|^2 = " + std::to_string(n2) + ")");
    amps_ /= std::sqrt(n2);
}

PureState PureState::normalized(CVector amplitudes) {
    const double n = amplitudes.norm();
    if (!(n > 0.0) || !std::isfinite(n)) throw std::invalid_argument("cannot normalize a zero vector");
    amplitudes /= n;
    return PureState(std::move(amplitudes));
}

PureState PureState::basis(int dim, int level) {
    if (dim < 2) throw DimensionError("qudit dimension must be at least 2");
    if (level < 0 || level >= dim)
        throw DimensionError("basis level " + std::to_string(level) + " outside dimension " + std::to_string(dim));
    CVector v = CVector::Zero(dim);
    v[level] = 1.0;
    return PureState(std::move(v));
}

PureState PureState::uniform(int dim) {
    if (dim < 2) throw DimensionError("qudit dimension must be at least 2");
    return PureState(CVector::Constant(dim, cplx(1.0 / std::sqrt(static_cast<double>(dim)), 0.0)));
}

void Rotation::check(int dim) const {
    if (k < 0 || l <= k || l >= dim)
        throw DimensionError("rotation levels (" + std::to_string(k) + "," + std::to_string(l) +
                             ") invalid for dimension " + std::to_string(dim));
}

CMatrix Rotation::matrix(int dim) const {
    check(dim);
    CMatrix u = CMatrix::Identity(dim, dim);
    const double c = std::cos(theta / 2), s = std::sin(theta / 2);
    // G = e^{-i phi}|k><l| + e^{i phi}|l><k|, so exp(-i theta/2 G) = cos - i sin G on {k,l}.
    u(k, k) = c;
    u(l, l) = c;
    u(k, l) = cplx(0, -s) * std::polar(1.0, -phi);
    u(l, k) = cplx(0, -s) * std::polar(1.0, phi);
    return u;
}

namespace detail {
void rotate(CVector& amps, int k, int l, double theta, double phi) {
    const double c = std::cos(theta / 2), s = std::sin(theta / 2);
    const cplx ak = amps[k], al = amps[l];
    const cplx up = cplx(0, -s) * std::polar(1.0, -phi);  // <k|R|l>
    const cplx lo = cplx(0, -s) * std::polar(1.0, phi);   // <l|R|k>
    amps[k] = c * ak + up * al;
    amps[l] = lo * ak + c * al;
}
}  // namespace detail

PureState apply_rotation(const PureState& state, const Rotation& rot) {
    rot.check(state.dim());
    CVector v = state.amplitudes();
    detail::rotate(v, rot.k, rot.l, rot.theta, rot.phi);
    return PureState(std::move(v));
}

PureState apply_sequence(const PureState& state, const RotationSequence& seq) {
    CVector v = state.amplitudes();
    for (const auto& r : seq) {
        r.check(state.dim());
        detail::rotate(v, r.k, r.l, r.theta, r.phi);
    }
    return PureState(std::move(v));
}

RotationSequence inverse(const RotationSequence& seq) {
    RotationSequence out(seq.rbegin(), seq.rend());
    for (auto& r : out) r.theta = -r.theta;
    return out;
}

cplx inner(const PureState& a, const PureState& b) {
    if (a.dim() != b.dim()) throw DimensionError("inner product of states with different dimensions");
    return a.amplitudes().dot(b.amplitudes());  // Eigen's dot conjugates the left operand
}

double fidelity(const PureState& a, const PureState& b) { return std::norm(inner(a, b)); }

}  // namespace qudit
