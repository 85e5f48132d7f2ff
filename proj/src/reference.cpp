#include "qudit/reference.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace qudit {

namespace {
constexpr double kDegenerate = 1e-12;
}

RotationSequence synthesize_reference_unitary(const PureState& target) {
    const int d = target.dim();
    const CVector& a = target.amplitudes();
    // Global phase chosen so that beta_0 = 0.
    const double ref_phase = std::abs(a[0]) > 0.0 ? std::arg(a[0]) : 0.0;

    RotationSequence seq;
    seq.reserve(static_cast<std::size_t>(d - 1));
    double prefix = 1.0;     // P_k
    double phase_sum = 0.0;  // sum_{l<k} phi_l
    for (int k = 0; k + 1 < d; ++k) {
        const double ck = std::abs(a[k]);
        double theta = 0.0;
        if (!(prefix < kDegenerate && ck < kDegenerate)) {
            const double ratio = std::clamp(ck / prefix, 0.0, 1.0);
            theta = 2.0 * std::acos(ratio);
        }
        const double beta_next = std::arg(a[k + 1]) - ref_phase;
        const double phi = beta_next + (k + 1) * std::numbers::pi / 2 - phase_sum;
        seq.push_back({k, k + 1, theta, phi});
        phase_sum += phi;
        prefix *= std::sin(theta / 2);
    }
    return seq;
}

double ground_state_fidelity(const PureState& psi, const RotationSequence& reference) {
    CVector v = psi.amplitudes();
    for (auto it = reference.rbegin(); it != reference.rend(); ++it) {
        it->check(psi.dim());
        detail::rotate(v, it->k, it->l, -it->theta, it->phi);
    }
    return std::norm(v[0]);
}

}  // namespace qudit
