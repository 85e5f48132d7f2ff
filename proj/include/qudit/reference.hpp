#pragma once

#include "qudit/state.hpp"

namespace qudit {

/// Ladder rotations R_{k,k+1}(theta_k, phi_k), k = 0..d-2, that take |0> to `target`
/// up to a global phase.
RotationSequence synthesize_reference_unitary(const PureState& target);

/// |<0| U_R^dag |psi>|^2 with U_R given as a rotation sequence.
double ground_state_fidelity(const PureState& psi, const RotationSequence& reference);

}  // namespace qudit
