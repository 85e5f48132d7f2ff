#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace qudit {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Normalized wave function of a single d-level system (d >= 2).
class PureState {
public:
    /// Takes ownership of `amplitudes`. Throws DimensionError for d < 2 and
    /// std::invalid_argument when the squared norm is off by more than 1e-8;
    /// smaller deviations are rescaled away.
    explicit PureState(CVector amplitudes);

    /// Rescales any nonzero vector to unit norm.
    static PureState normalized(CVector amplitudes);
    /// Computational basis state |level>.
    static PureState basis(int dim, int level);
    /// Uniform superposition (1/sqrt(d)) sum_l |l>.
    static PureState uniform(int dim);

    int dim() const { return static_cast<int>(amps_.size()); }
    const CVector& amplitudes() const { return amps_; }
    cplx operator[](int level) const { return amps_[level]; }

private:
    CVector amps_;
};

/// Two-level rotation exp(-i theta/2 G_{k,l}(phi)) with
/// G = cos(phi) sigma^x_{k,l} - sin(phi) sigma^y_{k,l}.
struct Rotation {
    int k = 0;
    int l = 1;
    double theta = 0.0;
    double phi = 0.0;

    /// Dense d x d matrix of the rotation.
    CMatrix matrix(int dim) const;
    void check(int dim) const;
};

using RotationSequence = std::vector<Rotation>;

PureState apply_rotation(const PureState& state, const Rotation& rot);

/// Applies the rotations in order, first element first.
PureState apply_sequence(const PureState& state, const RotationSequence& seq);

/// Sequence implementing the adjoint of `seq`.
RotationSequence inverse(const RotationSequence& seq);

/// |<a|b>|^2
double fidelity(const PureState& a, const PureState& b);

/// <a|b>
cplx inner(const PureState& a, const PureState& b);

namespace detail {
// Unchecked in-place rotation of raw amplitudes; callers validate indices.
void rotate(CVector& amps, int k, int l, double theta, double phi);
}  // namespace detail

}  // namespace qudit
