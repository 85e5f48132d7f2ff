#include "qudit/mos.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "qudit/parallel.hpp"

namespace qudit {

namespace {

void check_set(std::span<const PureState> states, std::size_t min_size) {
    if (states.size() < min_size)
        throw std::invalid_argument("need at least " + std::to_string(min_size) + " states, got " +
                                    std::to_string(states.size()));
    for (const auto& s : states)
        if (s.dim() != states.front().dim()) throw DimensionError("states differ in dimension");
}

double energy_of(const std::vector<CVector>& v, double p) {
    double e = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = i + 1; j < v.size(); ++j) e += 2.0 * std::pow(std::abs(v[i].dot(v[j])), p);
    return e;
}

PureState random_state(int dim, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    CVector v(dim);
    for (int i = 0; i < dim; ++i) v[i] = cplx(g(rng), g(rng));
    return PureState::normalized(std::move(v));
}

CMatrix random_unitary_step(int dim, double eps, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    CMatrix a(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) a(i, j) = cplx(g(rng), g(rng));
    CMatrix h = (a + a.adjoint()) / 2.0;
    h /= h.norm();
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
    CVector phases = (cplx(0, -eps) * es.eigenvalues().cast<cplx>()).array().exp();
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

std::vector<CVector> raw(const std::vector<PureState>& states) {
    std::vector<CVector> v;
    v.reserve(states.size());
    for (const auto& s : states) v.push_back(s.amplitudes());
    return v;
}

}  // namespace

Weighting power_weighting(double exponent) {
    if (!(exponent > 0.0)) throw std::invalid_argument("weighting exponent must be positive");
    return [exponent](double x) { return std::pow(x, exponent); };
}

double mos_energy(std::span<const PureState> states, const Weighting& weight) {
    check_set(states, 2);
    double e = 0.0;
    for (std::size_t i = 0; i < states.size(); ++i)
        for (std::size_t j = 0; j < states.size(); ++j)
            if (i != j) e += weight(std::abs(inner(states[i], states[j])));
    return e;
}

double mos_energy(std::span<const PureState> states, double exponent) {
    return mos_energy(states, power_weighting(exponent));
}

Eigen::MatrixXd gram_matrix(std::span<const PureState> states) {
    check_set(states, 1);
    const auto K = static_cast<Eigen::Index>(states.size());
    Eigen::MatrixXd g(K, K);
    for (Eigen::Index i = 0; i < K; ++i) {
        g(i, i) = 1.0;
        for (Eigen::Index j = i + 1; j < K; ++j) g(i, j) = g(j, i) = std::min(1.0, std::abs(inner(states[i], states[j])));
    }
    return g;
}

PureState phase_gauge(const PureState& s) {
    CVector v = s.amplitudes();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (std::abs(v[i]) > 1e-12) {
            v *= std::polar(1.0, -std::arg(v[i]));
            v[i] = std::abs(v[i]);
            break;
        }
    }
    return PureState(std::move(v));
}

void GAConfig::check() const {
    if (population < 2) throw std::invalid_argument("population must be at least 2");
    if (crossover < 0.0 || crossover > 1.0) throw std::invalid_argument("crossover probability must be in [0,1]");
    if (mutation < 0.0 || mutation > 1.0) throw std::invalid_argument("mutation probability must be in [0,1]");
    if (!(exponent > 0.0)) throw std::invalid_argument("weighting exponent must be positive");
    if (max_generations < 1) throw std::invalid_argument("max_generations must be at least 1");
    if (convergence_window < 1) throw std::invalid_argument("convergence_window must be at least 1");
    if (local_steps < 0 || local_step < 0.0) throw std::invalid_argument("local optimization budget must be >= 0");
    if (elites < 1 || elites > population) throw std::invalid_argument("elites must be in [1, population]");
    if (tournament < 1) throw std::invalid_argument("tournament size must be at least 1");
}

void local_optimize(std::vector<PureState>& states, double exponent, int steps, double step) {
    if (states.size() < 2 || steps <= 0 || step <= 0.0) return;
    std::vector<CVector> v = raw(states);
    const std::size_t K = v.size();
    double e = energy_of(v, exponent);
    std::vector<CVector> grad(K), trial(K);
    for (int s = 0; s < steps; ++s) {
        // dE/d<psi_i| = p sum_j |o_ij|^(p-2) |psi_j><psi_j|psi_i>, projected onto the tangent space.
        for (std::size_t i = 0; i < K; ++i) {
            grad[i] = CVector::Zero(v[i].size());
            for (std::size_t j = 0; j < K; ++j) {
                if (i == j) continue;
                const cplx o = v[j].dot(v[i]);
                const double m = std::max(std::abs(o), 1e-12);
                grad[i] += exponent * std::pow(m, exponent - 2.0) * o * v[j];
            }
            grad[i] -= v[i].dot(grad[i]) * v[i];
        }
        double eta = step;
        bool accepted = false;
        for (int tries = 0; tries < 8 && !accepted; ++tries, eta /= 2) {
            for (std::size_t i = 0; i < K; ++i) trial[i] = (v[i] - eta * grad[i]).normalized();
            const double et = energy_of(trial, exponent);
            if (et <= e) {
                v.swap(trial);
                e = et;
                accepted = true;
            }
        }
        if (!accepted) break;
    }
    for (std::size_t i = 0; i < K; ++i) states[i] = PureState::normalized(std::move(v[i]));
}

EvolveResult evolve(const GAConfig& cfg, int dim, int count) {
    cfg.check();
    if (dim < 2) throw DimensionError("qudit dimension must be at least 2");
    if (count < 2) throw std::invalid_argument("need at least two states");

    auto rng = make_rng(cfg.seed, 0x6a);
    std::uniform_real_distribution<double> unit;
    std::uniform_int_distribution<int> pick_slot(0, count - 1);
    std::uniform_int_distribution<int> pick_member(0, cfg.population - 1);

    const auto score = [&](std::vector<Individual>& pop) {
        parallel_for(static_cast<int>(pop.size()), cfg.jobs, [&](int i) {
            local_optimize(pop[i].states, cfg.exponent, cfg.local_steps, cfg.local_step);
            pop[i].fitness = -mos_energy(pop[i].states, cfg.exponent);
        });
        std::stable_sort(pop.begin(), pop.end(),
                         [](const Individual& a, const Individual& b) { return a.fitness > b.fitness; });
    };

    std::vector<Individual> pop(static_cast<std::size_t>(cfg.population));
    for (auto& ind : pop)
        for (int k = 0; k < count; ++k) ind.states.push_back(random_state(dim, rng));
    score(pop);

    EvolveResult res;
    res.best = pop.front();
    res.best_fitness.push_back(res.best.fitness);

    const auto tournament = [&]() -> const Individual& {
        int best = pick_member(rng);
        for (int t = 1; t < cfg.tournament; ++t) best = std::min(best, pick_member(rng));  // pop is sorted
        return pop[best];
    };

    for (int gen = 1; gen <= cfg.max_generations; ++gen) {
        std::vector<Individual> next(pop.begin(), pop.begin() + cfg.elites);
        while (static_cast<int>(next.size()) < cfg.population) {
            Individual a = tournament(), b = tournament();
            if (unit(rng) < cfg.crossover) {
                for (int k = 0; k < count; ++k)
                    if (unit(rng) < 0.5) std::swap(a.states[k], b.states[k]);
            }
            for (Individual* child : {&a, &b}) {
                if (unit(rng) < cfg.mutation) {
                    const int k = pick_slot(rng);
                    const CMatrix u = random_unitary_step(dim, cfg.mutation_scale * unit(rng), rng);
                    child->states[k] = PureState::normalized(u * child->states[k].amplitudes());
                }
                if (static_cast<int>(next.size()) < cfg.population) next.push_back(std::move(*child));
            }
        }
        pop = std::move(next);
        score(pop);

        if (pop.front().fitness > res.best.fitness) res.best = pop.front();
        res.best_fitness.push_back(res.best.fitness);
        res.generations = gen;

        const auto n = res.best_fitness.size();
        if (static_cast<int>(n) > cfg.convergence_window &&
            res.best_fitness[n - 1] - res.best_fitness[n - 1 - cfg.convergence_window] < 1e-10)
            break;
        if (res.best.fitness > -1e-14) break;
    }

    for (auto& s : res.best.states) s = phase_gauge(s);
    res.best.fitness = -mos_energy(res.best.states, cfg.exponent);
    return res;
}

}  // namespace qudit
