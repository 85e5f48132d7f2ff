#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "qudit/state.hpp"

namespace qudit {

class MetricError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Encoded training points of one class; rho_k = (1/N_k) sum |psi_i><psi_i|.
struct ClassEnsemble {
    int class_id = 0;
    std::vector<PureState> members;

    int size() const { return static_cast<int>(members.size()); }
    int dim() const;
    CMatrix density() const;
    void check() const;
};

/// One center state per class.
struct ReferenceSet {
    std::vector<PureState> centers;

    static ReferenceSet orthonormal(int dim, int classes);
    int size() const { return static_cast<int>(centers.size()); }
    int dim() const;
    void check() const;
};

/// tr(rho_k rho_l) as the mean pairwise squared overlap of the members.
double ensemble_purity_overlap(const ClassEnsemble& a, const ClassEnsemble& b);

/// 1 - (1/K) sum_k tr(rho_k^2) + (2/K) sum_{k<l} tr(rho_k rho_l)
double implicit_loss(std::span<const ClassEnsemble> ensembles);

/// Same value as implicit_loss, evaluated from the class density matrices.
double implicit_loss_from_densities(std::span<const CMatrix> densities);

/// 1 - (1/K) sum_k (1/N_k) sum_i |<psi_k^R|psi_i>|^2; ensembles are matched to
/// centers by class_id.
double explicit_loss(std::span<const ClassEnsemble> ensembles, const ReferenceSet& refs);

/// Index of the largest score. A later index wins only when it beats the current
/// best by more than `tie_tolerance`, so ties go to the lowest index.
int argmax_lowest(std::span<const double> scores, double tie_tolerance = 1e-12);

}  // namespace qudit
