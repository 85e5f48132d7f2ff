#include "qudit/lindblad.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace qudit {

namespace {

constexpr double kTraceTol = 1e-9;
constexpr double kHermTol = 1e-10;
constexpr double kEigTol = 1e-8;

CMatrix lowering(int d) {
    CMatrix o = CMatrix::Zero(d, d);
    for (int j = 0; j + 1 < d; ++j) o(j, j + 1) = 1.0;
    return o;
}

CMatrix level_number(int d) {
    CMatrix o = CMatrix::Zero(d, d);
    for (int j = 0; j < d; ++j) o(j, j) = static_cast<double>(j);
    return o;
}

double rate(double T) { return std::isinf(T) ? 0.0 : 1.0 / T; }

void add_dissipator(CMatrix& out, const CMatrix& rho, const CMatrix& o, double gamma) {
    if (gamma == 0.0) return;
    const CMatrix od = o.adjoint();
    const CMatrix n = od * o;
    out += gamma * (2.0 * o * rho * od - n * rho - rho * n);
}

// Superoperator of the (piecewise constant) generator acting on column-major vec(rho).
CMatrix generator(int d, const std::optional<Pulse>& pulse, const NoiseModel& model) {
    const int n = d * d;
    CMatrix L(n, n);
    CMatrix e = CMatrix::Zero(d, d);
    for (int c = 0; c < d; ++c)
        for (int r = 0; r < d; ++r) {
            e(r, c) = 1.0;
            const CMatrix col = rhs(e, pulse, model);
            L.col(c * d + r) = Eigen::Map<const CVector>(col.data(), n);
            e(r, c) = 0.0;
        }
    return L;
}

// One classical RK4 step of a linear autonomous system is exactly this Taylor polynomial.
CMatrix rk4_propagator(const CMatrix& L, double h) {
    const CMatrix a = h * L;
    CMatrix term = CMatrix::Identity(L.rows(), L.cols());
    CMatrix p = term;
    for (int k = 1; k <= 4; ++k) {
        term = (a * term) / static_cast<double>(k);
        p += term;
    }
    return p;
}

void check_step(const CVector& v, int d) {
    cplx tr = 0.0;
    double herm = 0.0;
    for (int i = 0; i < d; ++i) {
        tr += v[i * d + i];
        for (int j = i; j < d; ++j) herm = std::max(herm, std::abs(v[j * d + i] - std::conj(v[i * d + j])));
    }
    if (!std::isfinite(tr.real()) || std::abs(tr - 1.0) > kTraceTol)
        throw NumericalError("trace drifted to " + std::to_string(tr.real()) + " during integration");
    if (herm > kHermTol) throw NumericalError("density matrix lost hermiticity during integration");
}

CVector propagate(CVector v, int d, const CMatrix& L, double duration, int steps) {
    const double h = duration / steps;
    const CMatrix p = rk4_propagator(L, h);
    CVector next(v.size());
    for (int s = 0; s < steps; ++s) {
        next.noalias() = p * v;
        v.swap(next);
        check_step(v, d);
    }
    return v;
}

DensityMatrix from_vec(const CVector& v, int d) {
    DensityMatrix out{Eigen::Map<const CMatrix>(v.data(), d, d)};
    out.rho = (out.rho + out.rho.adjoint()) / 2.0;
    Eigen::SelfAdjointEigenSolver<CMatrix> es(out.rho, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -kEigTol) throw NumericalError("density matrix acquired a negative eigenvalue");
    return out;
}

}  // namespace

DensityMatrix DensityMatrix::pure(const PureState& psi) {
    return DensityMatrix{psi.amplitudes() * psi.amplitudes().adjoint()};
}

void DensityMatrix::check() const {
    if (rho.rows() != rho.cols() || rho.rows() < 2) throw DimensionError("density matrix must be square with d >= 2");
    if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > kHermTol) throw NumericalError("density matrix is not Hermitian");
    if (std::abs(rho.trace() - 1.0) > kTraceTol) throw NumericalError("density matrix trace differs from 1");
    Eigen::SelfAdjointEigenSolver<CMatrix> es(rho, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -kEigTol) throw NumericalError("density matrix has a negative eigenvalue");
}

NoiseModel NoiseModel::from_rabi_hz(double rabi_hz, double T1, double T2) {
    NoiseModel m;
    m.rabi = 2.0 * std::numbers::pi * rabi_hz;
    m.T1 = T1;
    m.T2 = T2;
    m.check();
    return m;
}

void NoiseModel::check() const {
    if (!(T1 > 0.0)) throw std::invalid_argument("T1 must be positive");
    if (!(T2 > 0.0)) throw std::invalid_argument("T2 must be positive");
    if (!(rabi > 0.0) || std::isinf(rabi)) throw std::invalid_argument("Rabi frequency must be positive and finite");
}

PulseSchedule schedule_from_rotations(const RotationSequence& seq, double rabi) {
    if (!(rabi > 0.0)) throw std::invalid_argument("Rabi frequency must be positive");
    PulseSchedule out;
    out.reserve(seq.size());
    for (const auto& r : seq) {
        if (r.l != r.k + 1) throw DimensionError("pulses only drive neighbouring levels");
        // H = (Omega/2)(e^{i a}|j><j+1| + h.c.) for time theta/Omega gives exp(-i theta/2 G(-a)).
        const double phase = r.theta >= 0.0 ? -r.phi : -(r.phi + std::numbers::pi);
        out.push_back(Pulse{r.k, std::abs(r.theta) / rabi, phase});
    }
    return out;
}

CMatrix rhs(const CMatrix& rho, const std::optional<Pulse>& pulse, const NoiseModel& model) {
    const int d = static_cast<int>(rho.rows());
    CMatrix out = CMatrix::Zero(d, d);
    if (pulse) {
        const int j = pulse->level;
        if (j < 0 || j + 1 >= d) throw DimensionError("pulse level " + std::to_string(j) + " outside dimension");
        CMatrix h = CMatrix::Zero(d, d);
        h(j, j + 1) = 0.5 * model.rabi * std::polar(1.0, pulse->phase);
        h(j + 1, j) = std::conj(h(j, j + 1));
        out = cplx(0, -1) * (h * rho - rho * h);
    }
    add_dissipator(out, rho, lowering(d), rate(model.T1));
    add_dissipator(out, rho, level_number(d), rate(model.T2));
    return out;
}

DensityMatrix evolve_schedule(const DensityMatrix& rho0, const PulseSchedule& schedule, const NoiseModel& model) {
    rho0.check();
    model.check();
    const int d = rho0.dim();
    CVector v = Eigen::Map<const CVector>(rho0.rho.data(), d * d);
    bool moved = false;
    for (const auto& p : schedule) {
        if (p.duration < 0.0 || !std::isfinite(p.duration)) throw std::invalid_argument("pulse duration must be >= 0");
        if (p.duration == 0.0) continue;
        const CMatrix L = generator(d, p, model);
        // Strong dissipation also caps the step, keeping h |L| inside the RK4 stability region.
        const double stiff = 1.0 / L.cwiseAbs().colwise().sum().maxCoeff();
        const double h_max = std::min({p.duration / 200.0, 1.0 / (50.0 * model.rabi), stiff});
        const double n = std::ceil(p.duration / h_max);
        if (!(n >= 1.0) || n > 1e9) throw NumericalError("pulse needs an unreasonable number of steps");
        v = propagate(std::move(v), d, L, p.duration, static_cast<int>(n));
        moved = true;
        (void)from_vec(v, d);
    }
    return moved ? from_vec(v, d) : rho0;
}

DensityMatrix evolve_free(const DensityMatrix& rho0, double duration, int steps, const NoiseModel& model) {
    rho0.check();
    model.check();
    if (steps < 1 || !(duration >= 0.0)) throw std::invalid_argument("free evolution needs steps >= 1 and duration >= 0");
    if (duration == 0.0) return rho0;
    const int d = rho0.dim();
    const CVector v = Eigen::Map<const CVector>(rho0.rho.data(), d * d);
    return from_vec(propagate(v, d, generator(d, std::nullopt, model), duration, steps), d);
}

double noisy_fidelity_to_ground(const DensityMatrix& rho) {
    const cplx p = rho.rho(0, 0);
    if (std::abs(p.imag()) > 1e-10) throw NumericalError("ground-state population has an imaginary part");
    return p.real();
}

}  // namespace qudit
