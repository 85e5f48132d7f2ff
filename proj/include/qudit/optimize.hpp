#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

namespace qudit {

using Objective = std::function<double(std::span<const double>)>;

/// Central finite-difference gradient with step h.
std::vector<double> central_gradient(const Objective& f, std::span<const double> x, double h);

struct OptimResult {
    std::vector<double> best_x;
    double best_value = 0.0;
    std::vector<double> history;  // objective value per recorded evaluation
    int iterations = 0;
    int evaluations = 0;
    bool converged = false;
};

/// Finite-difference gradient descent with adaptive moment estimates.
struct AdamConfig {
    double step = 0.05;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    double fd_step = 1e-5;
    int max_epochs = 500;
    int patience = 20;         // epochs over which improvement is measured
    double min_improvement = 1e-7;
    double target = 1e-12;     // stop as soon as the objective is this small
};

OptimResult minimize_adam(const Objective& f, std::vector<double> x0, const AdamConfig& cfg);

/// Simultaneous perturbation stochastic approximation with gains
/// a_n = a / (n + 1 + A)^alpha and c_n = c / (n + 1)^gamma.
struct SpsaConfig {
    double a = 0.2;
    double c = 0.1;
    double A = 3.0;
    double alpha = 0.602;
    double gamma = 0.101;
    int iterations = 30;
};

/// Each iteration evaluates f at x + c_n delta and x - c_n delta only; the best
/// evaluated point is returned.
OptimResult minimize_spsa(const Objective& f, std::vector<double> x0, const SpsaConfig& cfg, std::mt19937_64& rng);

}  // namespace qudit
