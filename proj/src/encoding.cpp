#include "qudit/encoding.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

namespace qudit {

std::string to_string(EncodingVariant v) {
    switch (v) {
        case EncodingVariant::g1: return "g1";
        case EncodingVariant::g2: return "g2";
        case EncodingVariant::g3: return "g3";
    }
    return "?";
}

EncodingVariant parse_encoding(std::string_view name) {
    if (name == "g1") return EncodingVariant::g1;
    if (name == "g2") return EncodingVariant::g2;
    if (name == "g3") return EncodingVariant::g3;
    throw EncodingError("unknown encoding '" + std::string(name) + "' (expected g1, g2 or g3)");
}

int VirtualBasis::dim() const {
    if (states.empty()) throw EncodingError("empty virtual basis");
    return states.front().dim();
}

void VirtualBasis::check() const {
    if (states.size() < 2) throw EncodingError("virtual basis needs at least two states");
    for (const auto& s : states)
        if (s.dim() != dim()) throw DimensionError("virtual basis states differ in dimension");
}

EncodingSpec EncodingSpec::ladder(EncodingVariant v, int dim, int data_dim, int layers) {
    EncodingSpec s{v, dim, data_dim, layers, dim - 1};
    s.validate();
    return s;
}

EncodingSpec EncodingSpec::on_basis(EncodingVariant v, const VirtualBasis& basis, int data_dim, int layers) {
    basis.check();
    EncodingSpec s{v, basis.dim(), data_dim, layers, basis.size() - 1};
    s.validate();
    return s;
}

int EncodingSpec::padded_dim() const {
    const int t = angles_per_sublayer();
    return ((data_dim + t - 1) / t) * t;
}

int EncodingSpec::sublayers_per_layer() const {
    return variant == EncodingVariant::g3 ? 1 : padded_dim() / angles_per_sublayer();
}

int EncodingSpec::layer_parameter_count() const {
    if (variant == EncodingVariant::g3) return angles_per_sublayer() * (data_dim + 1);
    return 2 * data_dim;
}

void EncodingSpec::validate() const {
    if (dim < 2) throw DimensionError("qudit dimension must be at least 2");
    if (data_dim < 1) throw EncodingError("data dimension must be positive");
    if (layers < 1) throw EncodingError("at least one layer is required");
    if (transitions < 1) throw EncodingError("at least one transition per sublayer is required");
}

AnsatzParams AnsatzParams::zeros(const EncodingSpec& spec) {
    spec.validate();
    AnsatzParams p;
    const bool full = spec.variant == EncodingVariant::g3;
    const int rows = full ? spec.angles_per_sublayer() : spec.data_dim;
    for (int l = 0; l < spec.layers; ++l)
        p.layers.push_back({Eigen::MatrixXd::Zero(rows, full ? spec.data_dim : 1), Eigen::VectorXd::Zero(rows)});
    return p;
}

AnsatzParams AnsatzParams::random(const EncodingSpec& spec, std::mt19937_64& rng) {
    AnsatzParams p = zeros(spec);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (auto& layer : p.layers) {
        for (Eigen::Index i = 0; i < layer.weights.size(); ++i) layer.weights.data()[i] = std::numbers::pi * unit(rng);
        for (Eigen::Index i = 0; i < layer.bias.size(); ++i) layer.bias[i] = std::numbers::pi * unit(rng);
    }
    return p;
}

AnsatzParams AnsatzParams::from_flat(const EncodingSpec& spec, std::span<const double> flat) {
    if (static_cast<int>(flat.size()) != spec.parameter_count())
        throw EncodingError("expected " + std::to_string(spec.parameter_count()) + " parameters, got " +
                            std::to_string(flat.size()));
    AnsatzParams p = zeros(spec);
    std::size_t at = 0;
    for (auto& layer : p.layers) {
        for (Eigen::Index i = 0; i < layer.weights.size(); ++i) layer.weights.data()[i] = flat[at++];
        for (Eigen::Index i = 0; i < layer.bias.size(); ++i) layer.bias[i] = flat[at++];
    }
    return p;
}

std::vector<double> AnsatzParams::flatten() const {
    std::vector<double> out;
    for (const auto& layer : layers) {
        out.insert(out.end(), layer.weights.data(), layer.weights.data() + layer.weights.size());
        out.insert(out.end(), layer.bias.data(), layer.bias.data() + layer.bias.size());
    }
    return out;
}

void AnsatzParams::check(const EncodingSpec& spec) const {
    if (static_cast<int>(layers.size()) != spec.layers)
        throw EncodingError("parameter set has " + std::to_string(layers.size()) + " layers, spec expects " +
                            std::to_string(spec.layers));
    const bool full = spec.variant == EncodingVariant::g3;
    const int rows = full ? spec.angles_per_sublayer() : spec.data_dim;
    const int cols = full ? spec.data_dim : 1;
    for (const auto& layer : layers) {
        if (layer.weights.rows() != rows || layer.weights.cols() != cols || layer.bias.size() != rows)
            throw EncodingError("weight/bias shape does not match encoding " + to_string(spec.variant));
    }
}

AngleSchedule encode(const Eigen::Ref<const Eigen::VectorXd>& x, const EncodingSpec& spec,
                     const AnsatzParams& params) {
    if (x.size() != spec.data_dim)
        throw EncodingError("feature vector has dimension " + std::to_string(x.size()) + ", encoding expects " +
                            std::to_string(spec.data_dim));
    params.check(spec);

    const int per = spec.angles_per_sublayer();
    const int width = spec.variant == EncodingVariant::g3 ? per : spec.padded_dim();
    Eigen::VectorXd xp = Eigen::VectorXd::Zero(width);  // zero padding beyond D_x

    AngleSchedule schedule;
    schedule.reserve(static_cast<std::size_t>(spec.layers * spec.sublayers_per_layer()));
    for (const auto& layer : params.layers) {
        if (spec.variant == EncodingVariant::g3) {
            xp = layer.weights * x + layer.bias;
        } else {
            xp.head(spec.data_dim) = layer.weights.col(0).cwiseProduct(x) + layer.bias;
        }
        for (int s = 0; s < width / per; ++s) {
            Sublayer sub(static_cast<std::size_t>(spec.transitions));
            for (int i = 0; i < spec.transitions; ++i) {
                sub[i].theta = xp[s * per + 2 * i];
                sub[i].phi = xp[s * per + 2 * i + 1];
            }
            schedule.push_back(std::move(sub));
        }
    }
    return schedule;
}

PureState initial_state(const EncodingSpec& spec) {
    return spec.variant == EncodingVariant::g1 ? PureState::basis(spec.dim, 0) : PureState::uniform(spec.dim);
}

RotationSequence ladder_rotations(const AngleSchedule& schedule) {
    RotationSequence seq;
    for (const auto& sub : schedule)
        for (std::size_t i = 0; i < sub.size(); ++i)
            seq.push_back({static_cast<int>(i), static_cast<int>(i) + 1, sub[i].theta, sub[i].phi});
    return seq;
}

CMatrix virtual_rotation_matrix(const VirtualBasis& basis, int k, double theta, double phi) {
    if (k < 0 || k + 1 >= basis.size()) throw DimensionError("virtual transition index out of range");
    const CVector& a = basis.states[k].amplitudes();
    const CVector& b = basis.states[k + 1].amplitudes();
    const CMatrix A = a * b.adjoint();
    const CMatrix gen = std::polar(1.0, -phi) * A + std::polar(1.0, phi) * A.adjoint();
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(gen);
    const Eigen::VectorXcd phases =
        (eig.eigenvalues().cast<cplx>() * cplx(0, -theta / 2)).array().exp().matrix();
    return eig.eigenvectors() * phases.asDiagonal() * eig.eigenvectors().adjoint();
}

PureState build_circuit(const Eigen::Ref<const Eigen::VectorXd>& x, const EncodingSpec& spec,
                        const AnsatzParams& params) {
    if (spec.transitions != spec.dim - 1)
        throw EncodingError("encoding was built for a virtual basis; pass the basis to build_circuit");
    const AngleSchedule schedule = encode(x, spec, params);
    CVector v = initial_state(spec).amplitudes();
    for (const auto& sub : schedule)
        for (int i = 0; i < spec.transitions; ++i) detail::rotate(v, i, i + 1, sub[i].theta, sub[i].phi);
    return PureState(std::move(v));
}

PureState build_circuit(const Eigen::Ref<const Eigen::VectorXd>& x, const EncodingSpec& spec,
                        const AnsatzParams& params, const VirtualBasis& basis) {
    basis.check();
    if (basis.dim() != spec.dim || basis.size() - 1 != spec.transitions)
        throw EncodingError("virtual basis does not match the encoding");
    const AngleSchedule schedule = encode(x, spec, params);
    CVector v = initial_state(spec).amplitudes();
    for (const auto& sub : schedule)
        for (int i = 0; i < spec.transitions; ++i) v = virtual_rotation_matrix(basis, i, sub[i].theta, sub[i].phi) * v;
    return PureState::normalized(std::move(v));
}

}  // namespace qudit
