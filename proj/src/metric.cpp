#include "qudit/metric.hpp"

#include <string>

namespace qudit {

int ClassEnsemble::dim() const {
    if (members.empty()) throw MetricError("class " + std::to_string(class_id) + " has an empty ensemble");
    return members.front().dim();
}

void ClassEnsemble::check() const {
    const int d = dim();
    for (const auto& m : members)
        if (m.dim() != d) throw DimensionError("ensemble members differ in dimension");
}

CMatrix ClassEnsemble::density() const {
    check();
    CMatrix rho = CMatrix::Zero(dim(), dim());
    for (const auto& m : members) rho.noalias() += m.amplitudes() * m.amplitudes().adjoint();
    return rho / static_cast<double>(members.size());
}

ReferenceSet ReferenceSet::orthonormal(int dim, int classes) {
    if (classes > dim)
        throw MetricError("cannot place " + std::to_string(classes) + " orthonormal centers in dimension " +
                          std::to_string(dim));
    ReferenceSet r;
    for (int k = 0; k < classes; ++k) r.centers.push_back(PureState::basis(dim, k));
    r.check();
    return r;
}

int ReferenceSet::dim() const {
    if (centers.empty()) throw MetricError("empty reference set");
    return centers.front().dim();
}

void ReferenceSet::check() const {
    if (centers.size() < 2) throw MetricError("a reference set needs at least two centers");
    for (const auto& c : centers)
        if (c.dim() != dim()) throw DimensionError("reference centers differ in dimension");
}

double ensemble_purity_overlap(const ClassEnsemble& a, const ClassEnsemble& b) {
    a.check();
    b.check();
    if (a.dim() != b.dim()) throw DimensionError("ensembles differ in dimension");
    double sum = 0.0;
    for (const auto& p : a.members)
        for (const auto& q : b.members) sum += fidelity(p, q);
    return sum / (static_cast<double>(a.size()) * b.size());
}

double implicit_loss(std::span<const ClassEnsemble> ensembles) {
    const std::size_t K = ensembles.size();
    if (K < 2) throw MetricError("implicit loss needs at least two classes");
    double purity = 0.0, cross = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
        purity += ensemble_purity_overlap(ensembles[k], ensembles[k]);
        for (std::size_t l = k + 1; l < K; ++l) cross += ensemble_purity_overlap(ensembles[k], ensembles[l]);
    }
    return 1.0 - purity / K + 2.0 * cross / K;
}

double implicit_loss_from_densities(std::span<const CMatrix> densities) {
    const std::size_t K = densities.size();
    if (K < 2) throw MetricError("implicit loss needs at least two classes");
    // tr(A B) for Hermitian A, B is sum_ij A_ij conj(B_ij).
    auto tr_prod = [](const CMatrix& a, const CMatrix& b) { return (a.array() * b.conjugate().array()).sum().real(); };
    double purity = 0.0, cross = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
        purity += tr_prod(densities[k], densities[k]);
        for (std::size_t l = k + 1; l < K; ++l) cross += tr_prod(densities[k], densities[l]);
    }
    return 1.0 - purity / K + 2.0 * cross / K;
}

double explicit_loss(std::span<const ClassEnsemble> ensembles, const ReferenceSet& refs) {
    refs.check();
    if (static_cast<int>(ensembles.size()) != refs.size())
        throw MetricError(std::to_string(ensembles.size()) + " classes but " + std::to_string(refs.size()) +
                          " reference centers");
    double total = 0.0;
    for (const auto& e : ensembles) {
        e.check();
        if (e.class_id < 0 || e.class_id >= refs.size()) throw MetricError("ensemble class id has no center");
        double f = 0.0;
        for (const auto& m : e.members) f += fidelity(refs.centers[e.class_id], m);
        total += f / e.size();
    }
    return 1.0 - total / static_cast<double>(ensembles.size());
}

int argmax_lowest(std::span<const double> scores, double tie_tolerance) {
    if (scores.empty()) throw MetricError("no scores to compare");
    int best = 0;
    for (std::size_t k = 1; k < scores.size(); ++k)
        if (scores[k] > scores[best] + tie_tolerance) best = static_cast<int>(k);
    return best;
}

}  // namespace qudit
