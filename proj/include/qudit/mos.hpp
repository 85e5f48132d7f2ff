#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "qudit/state.hpp"

namespace qudit {

/// Weighting applied to each overlap modulus |<psi_i|psi_j>|.
using Weighting = std::function<double(double)>;

/// W(x) = x^p
Weighting power_weighting(double exponent);

/// E_W = sum over ordered pairs i != j of W(|<psi_i|psi_j>|).
double mos_energy(std::span<const PureState> states, const Weighting& weight);
double mos_energy(std::span<const PureState> states, double exponent);

/// K x K matrix of |<psi_i|psi_j>|.
Eigen::MatrixXd gram_matrix(std::span<const PureState> states);

/// Rotates the first nonzero amplitude onto the non-negative real axis.
PureState phase_gauge(const PureState& s);

struct GAConfig {
    int population = 64;
    double crossover = 0.7;     // rho_c
    double mutation = 0.2;      // rho_m
    int max_generations = 500;
    int convergence_window = 50;
    double exponent = 2.0;      // W(x) = x^p
    int local_steps = 50;
    double local_step = 0.01;
    double mutation_scale = 0.1;  // epsilon ~ U[0, scale] in exp(-i epsilon H)
    int elites = 2;
    int tournament = 3;
    std::uint64_t seed = 0;
    int jobs = 1;

    void check() const;
};

struct Individual {
    std::vector<PureState> states;
    double fitness = 0.0;  // -E_W
};

struct EvolveResult {
    Individual best;
    std::vector<double> best_fitness;  // initial population, then one per generation; non-decreasing
    int generations = 0;
};

/// Projected gradient descent on E_W with W(x) = x^p, renormalizing after each step.
void local_optimize(std::vector<PureState>& states, double exponent, int steps, double step);

/// Genetic search for K maximally orthogonal states in dimension d.
EvolveResult evolve(const GAConfig& cfg, int dim, int count);

}  // namespace qudit
