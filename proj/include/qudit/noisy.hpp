#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "qudit/encoding.hpp"
#include "qudit/lindblad.hpp"
#include "qudit/metric.hpp"
#include "qudit/optimize.hpp"
#include "qudit/samples.hpp"

namespace qudit {

/// Explicit classifier whose circuits are integrated as driven, dissipative pulses.
struct NoisyProblem {
    EncodingSpec spec;  // g2 on the computational ladder
    ReferenceSet refs;
    NoiseModel noise;

    void check(int num_classes) const;
};

/// Pulse sequences for each class: U_R^dag of the class center.
std::vector<PulseSchedule> reference_inverse_schedules(const NoisyProblem& problem);

/// rho_00 after |+><+| is driven through U(x) and then `ref_inverse`.
double noisy_point_fidelity(const Eigen::Ref<const Eigen::VectorXd>& x, const AnsatzParams& params,
                            const NoisyProblem& problem, const PulseSchedule& ref_inverse);

/// 1 - (1/K) sum_k (1/N_k) sum_{i in k} rho_00(x_i, k)
double noisy_loss(const Samples& train, const NoisyProblem& problem, const AnsatzParams& params, int jobs = 1);

struct NoisyTrainResult {
    AnsatzParams params;
    double best_loss = 0.0;
    std::vector<double> history;  // loss at every evaluation
    int evaluations = 0;
    bool aborted = false;
    std::string abort_reason;
};

/// SPSA on noisy_loss from `initial`. An integrator failure ends the run early and
/// returns the best parameters seen so far.
NoisyTrainResult spsa_train(const Samples& train, const NoisyProblem& problem, const AnsatzParams& initial,
                            const SpsaConfig& cfg, std::mt19937_64& rng, int jobs = 1);

/// Fraction of test points whose largest rho_00 over the K centers matches the label.
double noisy_test(const AnsatzParams& params, const Samples& test, const NoisyProblem& problem, int jobs = 1);

struct ChainConfig {
    SpsaConfig spsa;  // 30 iterations, two evaluations each
    int runs = 50;
    std::uint64_t seed = 0;
    int jobs = 1;
};

struct RunRecord {
    int run = 0;
    double train_loss = 0.0;
    double test_accuracy = 0.0;
    double wall_seconds = 0.0;
    bool reinitialized = false;  // started from fresh random parameters
    bool aborted = false;
};

/// Sequential runs; each starts from the previous run's parameters when that run
/// improved test accuracy over its own predecessor, and from random parameters otherwise.
std::vector<RunRecord> run_chain(const Samples& train, const Samples& test, const NoisyProblem& problem,
                                 const ChainConfig& cfg);

/// `points` values spaced logarithmically over [lo, hi].
std::vector<double> log_grid(double lo, double hi, int points);

}  // namespace qudit
