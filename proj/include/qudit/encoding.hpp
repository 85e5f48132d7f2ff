#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qudit/state.hpp"

namespace qudit {

class EncodingError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// How features and trainable parameters become rotation angles.
///  g1: x'_i = w_i x_i + b_i, start in |0>
///  g2: x'_i = w_i x_i + b_i, start in |+>
///  g3: x'   = W x + b with W of shape (2T, D_x), start in |+>
enum class EncodingVariant { g1, g2, g3 };

std::string to_string(EncodingVariant v);
EncodingVariant parse_encoding(std::string_view name);

/// Endpoints used for rotations instead of the computational basis.
struct VirtualBasis {
    std::vector<PureState> states;

    int dim() const;
    int size() const { return static_cast<int>(states.size()); }
    void check() const;
};

struct EncodingSpec {
    EncodingVariant variant = EncodingVariant::g2;
    int dim = 2;          // qudit levels d
    int data_dim = 1;     // D_x
    int layers = 1;       // L
    int transitions = 1;  // rotations per sublayer: d-1 on the ladder, K-1 on a virtual basis

    static EncodingSpec ladder(EncodingVariant v, int dim, int data_dim, int layers);
    static EncodingSpec on_basis(EncodingVariant v, const VirtualBasis& basis, int data_dim, int layers);

    int angles_per_sublayer() const { return 2 * transitions; }
    /// D_x rounded up to a multiple of 2T.
    int padded_dim() const;
    int sublayers_per_layer() const;
    /// Parameters per layer (weights + bias).
    int layer_parameter_count() const;
    int parameter_count() const { return layers * layer_parameter_count(); }
    void validate() const;
};

struct LayerParams {
    // g1/g2: a column of D_x diagonal weights; g3: a (2T, D_x) matrix.
    Eigen::MatrixXd weights;
    Eigen::VectorXd bias;
};

struct AnsatzParams {
    std::vector<LayerParams> layers;

    static AnsatzParams zeros(const EncodingSpec& spec);
    /// Weights ~ pi * U[-1,1], bias ~ U[-pi,pi].
    static AnsatzParams random(const EncodingSpec& spec, std::mt19937_64& rng);
    static AnsatzParams from_flat(const EncodingSpec& spec, std::span<const double> flat);
    std::vector<double> flatten() const;
    void check(const EncodingSpec& spec) const;
};

struct AnglePair {
    double theta = 0.0;
    double phi = 0.0;
};

using Sublayer = std::vector<AnglePair>;
/// Sublayers in application order, all sublayers of layer 0 first.
using AngleSchedule = std::vector<Sublayer>;

AngleSchedule encode(const Eigen::Ref<const Eigen::VectorXd>& x, const EncodingSpec& spec,
                     const AnsatzParams& params);

/// |0> for g1, |+> otherwise.
PureState initial_state(const EncodingSpec& spec);

/// Ladder rotations R_{i,i+1} realising a schedule.
RotationSequence ladder_rotations(const AngleSchedule& schedule);

/// Rotation between basis states k and k+1: exp(-i theta/2 (e^{-i phi} A + e^{i phi} A^dag)),
/// A = |phi_k><phi_{k+1}|.
CMatrix virtual_rotation_matrix(const VirtualBasis& basis, int k, double theta, double phi);

PureState build_circuit(const Eigen::Ref<const Eigen::VectorXd>& x, const EncodingSpec& spec,
                        const AnsatzParams& params);
PureState build_circuit(const Eigen::Ref<const Eigen::VectorXd>& x, const EncodingSpec& spec,
                        const AnsatzParams& params, const VirtualBasis& basis);

}  // namespace qudit
