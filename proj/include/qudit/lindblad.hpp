#pragma once

#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "qudit/state.hpp"

namespace qudit {

/// Raised when an integrated density matrix leaves the physical set.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct DensityMatrix {
    CMatrix rho;

    static DensityMatrix pure(const PureState& psi);
    int dim() const { return static_cast<int>(rho.rows()); }
    /// Hermitian within 1e-10, unit trace within 1e-9, eigenvalues >= -1e-8.
    void check() const;
};

struct NoiseModel {
    static constexpr double kInf = std::numeric_limits<double>::infinity();

    double T1 = kInf;               // seconds; infinity disables decay
    double T2 = kInf;               // seconds; infinity disables dephasing
    double rabi = 2.0 * 3.141592653589793 * 1e7;  // rad/s
    std::vector<double> splittings;  // rad/s; not used in the rotating frame

    static NoiseModel from_rabi_hz(double rabi_hz, double T1, double T2);
    void check() const;
};

/// Resonant drive on levels (level, level + 1).
struct Pulse {
    int level = 0;
    double duration = 0.0;  // seconds
    double phase = 0.0;     // drive phase of H = (Omega/2)(e^{i phase}|j><j+1| + h.c.)
};

using PulseSchedule = std::vector<Pulse>;

/// Pulses realising ladder rotations R_{j,j+1}(theta, phi): duration |theta|/Omega,
/// phase -phi (or -(phi + pi) for theta < 0).
PulseSchedule schedule_from_rotations(const RotationSequence& seq, double rabi);

/// Right-hand side of the master equation; `pulse` is empty between pulses.
CMatrix rhs(const CMatrix& rho, const std::optional<Pulse>& pulse, const NoiseModel& model);

/// Fixed-step fourth-order Runge-Kutta through each pulse in order, with step
/// <= min(t_p/200, 1/(50 Omega), 1/|L|_1). Zero-length pulses are skipped.
DensityMatrix evolve_schedule(const DensityMatrix& rho0, const PulseSchedule& schedule, const NoiseModel& model);

/// Free evolution (no drive) for `duration` seconds using `steps` RK4 steps.
DensityMatrix evolve_free(const DensityMatrix& rho0, double duration, int steps, const NoiseModel& model);

/// Ground-state population rho_00.
double noisy_fidelity_to_ground(const DensityMatrix& rho);

}  // namespace qudit
