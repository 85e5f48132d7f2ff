#include "qudit/noisy.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <optional>

#include "qudit/parallel.hpp"
#include "qudit/reference.hpp"

namespace qudit {

void NoisyProblem::check(int num_classes) const {
    spec.validate();
    if (spec.variant != EncodingVariant::g2) throw EncodingError("noisy training uses the g2 encoding");
    if (spec.transitions != spec.dim - 1) throw EncodingError("noisy training drives the computational ladder");
    refs.check();
    if (refs.dim() != spec.dim) throw DimensionError("reference centers do not match the qudit dimension");
    if (refs.size() != num_classes)
        throw MetricError(std::to_string(num_classes) + " classes but " + std::to_string(refs.size()) + " centers");
    noise.check();
}

std::vector<PulseSchedule> reference_inverse_schedules(const NoisyProblem& problem) {
    std::vector<PulseSchedule> out;
    for (const auto& c : problem.refs.centers)
        out.push_back(schedule_from_rotations(inverse(synthesize_reference_unitary(c)), problem.noise.rabi));
    return out;
}

double noisy_point_fidelity(const Eigen::Ref<const Eigen::VectorXd>& x, const AnsatzParams& params,
                            const NoisyProblem& problem, const PulseSchedule& ref_inverse) {
    PulseSchedule s =
        schedule_from_rotations(ladder_rotations(encode(x, problem.spec, params)), problem.noise.rabi);
    s.insert(s.end(), ref_inverse.begin(), ref_inverse.end());
    const auto rho0 = DensityMatrix::pure(initial_state(problem.spec));
    return noisy_fidelity_to_ground(evolve_schedule(rho0, s, problem.noise));
}

namespace {

double loss_with(const Samples& train, const NoisyProblem& problem, const AnsatzParams& params,
                 const std::vector<PulseSchedule>& refs, int jobs) {
    if (train.empty()) throw MetricError("empty training set");
    std::vector<double> f(static_cast<std::size_t>(train.size()));
    parallel_for(train.size(), jobs, [&](int i) {
        f[i] = noisy_point_fidelity(train.x.row(i).transpose(), params, problem, refs.at(train.y[i]));
    });
    const auto counts = train.class_counts();
    std::vector<double> per_class(counts.size(), 0.0);
    for (int i = 0; i < train.size(); ++i) per_class[train.y[i]] += f[i];
    double total = 0.0;
    for (std::size_t k = 0; k < counts.size(); ++k) {
        if (counts[k] == 0) throw MetricError("class " + std::to_string(k) + " has no training points");
        total += per_class[k] / counts[k];
    }
    return 1.0 - total / static_cast<double>(counts.size());
}

}  // namespace

double noisy_loss(const Samples& train, const NoisyProblem& problem, const AnsatzParams& params, int jobs) {
    problem.check(train.num_classes);
    return loss_with(train, problem, params, reference_inverse_schedules(problem), jobs);
}

NoisyTrainResult spsa_train(const Samples& train, const NoisyProblem& problem, const AnsatzParams& initial,
                            const SpsaConfig& cfg, std::mt19937_64& rng, int jobs) {
    problem.check(train.num_classes);
    initial.check(problem.spec);
    const auto refs = reference_inverse_schedules(problem);

    NoisyTrainResult res;
    res.params = initial;
    res.best_loss = std::numeric_limits<double>::infinity();
    std::optional<std::string> failure;

    const Objective objective = [&](std::span<const double> flat) {
        if (failure) return std::numeric_limits<double>::quiet_NaN();
        const AnsatzParams p = AnsatzParams::from_flat(problem.spec, flat);
        double v;
        try {
            v = loss_with(train, problem, p, refs, jobs);
        } catch (const NumericalError& e) {
            failure = e.what();
            return std::numeric_limits<double>::quiet_NaN();
        }
        res.history.push_back(v);
        if (v < res.best_loss) {
            res.best_loss = v;
            res.params = p;
        }
        return v;
    };

    (void)minimize_spsa(objective, initial.flatten(), cfg, rng);
    res.evaluations = static_cast<int>(res.history.size());
    if (failure) {
        res.aborted = true;
        res.abort_reason = *failure;
    }
    if (res.history.empty()) res.best_loss = std::numeric_limits<double>::quiet_NaN();
    return res;
}

double noisy_test(const AnsatzParams& params, const Samples& test, const NoisyProblem& problem, int jobs) {
    if (test.empty()) throw MetricError("empty test split");
    problem.check(test.num_classes);
    params.check(problem.spec);
    const auto refs = reference_inverse_schedules(problem);
    std::vector<int> hit(static_cast<std::size_t>(test.size()), 0);
    parallel_for(test.size(), jobs, [&](int i) {
        std::vector<double> f;
        for (const auto& r : refs) f.push_back(noisy_point_fidelity(test.x.row(i).transpose(), params, problem, r));
        hit[i] = argmax_lowest(f) == test.y[i];
    });
    int correct = 0;
    for (int h : hit) correct += h;
    return static_cast<double>(correct) / test.size();
}

std::vector<RunRecord> run_chain(const Samples& train, const Samples& test, const NoisyProblem& problem,
                                 const ChainConfig& cfg) {
    if (cfg.runs < 1) throw std::invalid_argument("runs must be at least 1");
    problem.check(train.num_classes);
    auto rng = make_rng(cfg.seed, 0xc4a1);

    std::vector<RunRecord> out;
    std::optional<AnsatzParams> carry;
    double previous_accuracy = -1.0;
    for (int run = 0; run < cfg.runs; ++run) {
        const auto t0 = std::chrono::steady_clock::now();
        RunRecord rec;
        rec.run = run;
        rec.reinitialized = !carry;
        const AnsatzParams start = carry ? *carry : AnsatzParams::random(problem.spec, rng);
        NoisyTrainResult tr = spsa_train(train, problem, start, cfg.spsa, rng, cfg.jobs);
        rec.train_loss = tr.best_loss;
        rec.aborted = tr.aborted;
        rec.test_accuracy = noisy_test(tr.params, test, problem, cfg.jobs);
        rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

        if (rec.test_accuracy > previous_accuracy)
            carry = tr.params;
        else
            carry.reset();
        previous_accuracy = rec.test_accuracy;
        out.push_back(rec);
    }
    return out;
}

std::vector<double> log_grid(double lo, double hi, int points) {
    if (!(lo > 0.0) || !(hi >= lo) || points < 1) throw std::invalid_argument("log grid needs 0 < lo <= hi and points >= 1");
    std::vector<double> g;
    if (points == 1) return {lo};
    const double a = std::log(lo), b = std::log(hi);
    for (int i = 0; i < points; ++i) g.push_back(std::exp(a + (b - a) * i / (points - 1)));
    g.back() = hi;
    g.front() = lo;
    return g;
}

}  // namespace qudit
