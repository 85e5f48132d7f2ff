#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qudit/encoding.hpp"
#include "qudit/metric.hpp"
#include "qudit/optimize.hpp"
#include "qudit/samples.hpp"

namespace qudit {

enum class Method { Implicit, Explicit };
enum class OptimizerKind { Adam, Spsa };

std::string to_string(Method m);
Method parse_method(std::string_view name);
std::string to_string(OptimizerKind o);
OptimizerKind parse_optimizer(std::string_view name);

/// Everything that defines a classifier except its trained parameters.
struct Problem {
    EncodingSpec spec;
    Method method = Method::Explicit;
    std::optional<ReferenceSet> refs;   // required for Method::Explicit
    std::optional<VirtualBasis> basis;  // rotations between virtual states when set

    void check(int num_classes) const;
    PureState embed(const Eigen::Ref<const Eigen::VectorXd>& x, const AnsatzParams& params) const;
};

struct TrainConfig {
    Method method = Method::Explicit;
    OptimizerKind optimizer = OptimizerKind::Adam;
    int restarts = 1;
    int max_evals = 500;  // epochs (Adam) or iterations (SPSA)
    AdamConfig adam;
    SpsaConfig spsa;
    std::uint64_t seed = 0;
    int jobs = 1;

    void check() const;
};

struct Model {
    Problem problem;
    AnsatzParams params;
    std::vector<CMatrix> class_densities;  // implicit method: training ensembles per class
    std::uint64_t seed = 0;

    int num_classes() const;
    PureState embed(const Eigen::Ref<const Eigen::VectorXd>& x) const { return problem.embed(x, params); }
    /// Fidelity to each center (explicit) or mean squared overlap with each
    /// training ensemble (implicit).
    std::vector<double> class_scores(const Eigen::Ref<const Eigen::VectorXd>& x) const;
    int classify(const Eigen::Ref<const Eigen::VectorXd>& x) const;
};

struct TrainResult {
    Model model;
    std::vector<double> history;
    double final_loss = 0.0;
    int evaluations = 0;
    bool converged = false;
    std::uint64_t restart_seed = 0;
};

/// Loss of `params` on the training samples under the problem's method.
double training_loss(const Samples& train, const Problem& problem, const AnsatzParams& params);

/// One optimization run. Starts from `initial` when given, otherwise from random
/// parameters drawn with `seed`.
TrainResult train_single(const Samples& train, const Problem& problem, const TrainConfig& cfg, std::uint64_t seed,
                         std::optional<AnsatzParams> initial = std::nullopt);

/// cfg.restarts independent runs, restart r seeded from (cfg.seed, r). Results are
/// in restart order regardless of cfg.jobs.
std::vector<TrainResult> train_restarts(const Samples& train, const Problem& problem, const TrainConfig& cfg);

/// Lowest-loss result over all restarts.
TrainResult train(const Samples& train, const Problem& problem, const TrainConfig& cfg);

double test_accuracy(const Model& model, const Samples& test);

/// Mean fidelity of each sample to its own class center.
double mean_center_fidelity(const Model& model, const Samples& samples);

}  // namespace qudit
