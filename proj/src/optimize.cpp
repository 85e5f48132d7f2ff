#include "qudit/optimize.hpp"

#include <cmath>
#include <limits>

namespace qudit {

std::vector<double> central_gradient(const Objective& f, std::span<const double> x, double h) {
    std::vector<double> probe(x.begin(), x.end());
    std::vector<double> grad(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        probe[i] = x[i] + h;
        const double up = f(probe);
        probe[i] = x[i] - h;
        const double down = f(probe);
        probe[i] = x[i];
        grad[i] = (up - down) / (2 * h);
    }
    return grad;
}

OptimResult minimize_adam(const Objective& f, std::vector<double> x0, const AdamConfig& cfg) {
    const std::size_t n = x0.size();
    std::vector<double> x = std::move(x0), m(n, 0.0), v(n, 0.0);
    OptimResult res;
    res.best_value = std::numeric_limits<double>::infinity();

    for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
        const double fx = f(x);
        ++res.evaluations;
        res.history.push_back(fx);
        res.iterations = epoch;
        if (!std::isfinite(fx)) return res;  // diverged, best-so-far kept
        if (fx < res.best_value) {
            res.best_value = fx;
            res.best_x = x;
        }
        if (fx <= cfg.target) {
            res.converged = true;
            return res;
        }
        if (epoch >= cfg.patience) {
            const double earlier = res.history[res.history.size() - 1 - cfg.patience];
            if (earlier - fx < cfg.min_improvement) {
                res.converged = true;
                return res;
            }
        }

        const auto g = central_gradient(f, x, cfg.fd_step);
        res.evaluations += static_cast<int>(2 * n);
        const double t = epoch + 1;
        const double c1 = 1.0 - std::pow(cfg.beta1, t), c2 = 1.0 - std::pow(cfg.beta2, t);
        for (std::size_t i = 0; i < n; ++i) {
            m[i] = cfg.beta1 * m[i] + (1 - cfg.beta1) * g[i];
            v[i] = cfg.beta2 * v[i] + (1 - cfg.beta2) * g[i] * g[i];
            x[i] -= cfg.step * (m[i] / c1) / (std::sqrt(v[i] / c2) + cfg.epsilon);
        }
    }
    // Budget exhausted: score the final iterate too.
    const double fx = f(x);
    ++res.evaluations;
    res.history.push_back(fx);
    if (fx < res.best_value) {
        res.best_value = fx;
        res.best_x = x;
    }
    return res;
}

OptimResult minimize_spsa(const Objective& f, std::vector<double> x0, const SpsaConfig& cfg, std::mt19937_64& rng) {
    const std::size_t n = x0.size();
    std::vector<double> x = std::move(x0), plus(n), minus(n), delta(n);
    std::bernoulli_distribution coin(0.5);
    OptimResult res;
    res.best_value = std::numeric_limits<double>::infinity();
    res.best_x = x;

    auto record = [&](const std::vector<double>& p, double value) {
        ++res.evaluations;
        res.history.push_back(value);
        if (value < res.best_value) {
            res.best_value = value;
            res.best_x = p;
        }
    };

    for (int it = 0; it < cfg.iterations; ++it) {
        const double an = cfg.a / std::pow(it + 1 + cfg.A, cfg.alpha);
        const double cn = cfg.c / std::pow(it + 1, cfg.gamma);
        for (std::size_t i = 0; i < n; ++i) {
            delta[i] = coin(rng) ? 1.0 : -1.0;
            plus[i] = x[i] + cn * delta[i];
            minus[i] = x[i] - cn * delta[i];
        }
        const double yp = f(plus);
        record(plus, yp);
        const double ym = f(minus);
        record(minus, ym);
        res.iterations = it + 1;
        if (!std::isfinite(yp) || !std::isfinite(ym)) return res;
        const double slope = (yp - ym) / (2 * cn);
        for (std::size_t i = 0; i < n; ++i) x[i] -= an * slope / delta[i];
    }
    res.converged = true;
    return res;
}

}  // namespace qudit
