#include "qudit/train.hpp"

#include <algorithm>

#include "qudit/parallel.hpp"

namespace qudit {

std::string to_string(Method m) { return m == Method::Implicit ? "implicit" : "explicit"; }

Method parse_method(std::string_view name) {
    if (name == "implicit") return Method::Implicit;
    if (name == "explicit") return Method::Explicit;
    throw std::invalid_argument("unknown method '" + std::string(name) + "' (expected implicit or explicit)");
}

std::string to_string(OptimizerKind o) { return o == OptimizerKind::Adam ? "adam" : "spsa"; }

OptimizerKind parse_optimizer(std::string_view name) {
    if (name == "adam") return OptimizerKind::Adam;
    if (name == "spsa") return OptimizerKind::Spsa;
    throw std::invalid_argument("unknown optimizer '" + std::string(name) + "' (expected adam or spsa)");
}

void Problem::check(int num_classes) const {
    spec.validate();
    if (num_classes < 2) throw MetricError("classification needs at least two classes");
    if (method == Method::Explicit) {
        if (!refs) throw MetricError("the explicit method requires reference centers");
        refs->check();
        if (refs->size() != num_classes)
            throw MetricError(std::to_string(num_classes) + " classes but " + std::to_string(refs->size()) +
                              " reference centers");
        if (refs->dim() != spec.dim) throw DimensionError("reference centers do not match the qudit dimension");
    }
    if (basis && (basis->dim() != spec.dim || basis->size() - 1 != spec.transitions))
        throw EncodingError("virtual basis does not match the encoding");
}

PureState Problem::embed(const Eigen::Ref<const Eigen::VectorXd>& x, const AnsatzParams& params) const {
    return basis ? build_circuit(x, spec, params, *basis) : build_circuit(x, spec, params);
}

void TrainConfig::check() const {
    if (restarts < 1) throw std::invalid_argument("restarts must be at least 1");
    if (max_evals < 1) throw std::invalid_argument("max_evals must be at least 1");
}

int Model::num_classes() const {
    if (problem.method == Method::Explicit) return problem.refs ? problem.refs->size() : 0;
    return static_cast<int>(class_densities.size());
}

std::vector<double> Model::class_scores(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    const PureState psi = embed(x);
    std::vector<double> scores;
    if (problem.method == Method::Explicit) {
        if (!problem.refs) throw MetricError("model has no reference centers");
        for (const auto& c : problem.refs->centers) scores.push_back(fidelity(c, psi));
    } else {
        if (class_densities.empty()) throw MetricError("model has not been trained");
        const CVector& v = psi.amplitudes();
        for (const auto& rho : class_densities) scores.push_back(v.dot(rho * v).real());
    }
    return scores;
}

int Model::classify(const Eigen::Ref<const Eigen::VectorXd>& x) const { return argmax_lowest(class_scores(x)); }

namespace {

std::vector<CMatrix> class_densities(const Samples& train, const Problem& problem, const AnsatzParams& params) {
    const int d = problem.spec.dim;
    std::vector<CMatrix> rho(static_cast<std::size_t>(train.num_classes), CMatrix::Zero(d, d));
    const auto counts = train.class_counts();
    for (int i = 0; i < train.size(); ++i) {
        const PureState psi = problem.embed(train.x.row(i).transpose(), params);
        rho[train.y[i]].noalias() += psi.amplitudes() * psi.amplitudes().adjoint();
    }
    for (int k = 0; k < train.num_classes; ++k) {
        if (counts[k] == 0) throw MetricError("class " + std::to_string(k) + " has no training points");
        rho[k] /= static_cast<double>(counts[k]);
    }
    return rho;
}

}  // namespace

double training_loss(const Samples& train, const Problem& problem, const AnsatzParams& params) {
    if (train.empty()) throw MetricError("empty training set");
    if (problem.method == Method::Implicit) return implicit_loss_from_densities(class_densities(train, problem, params));

    const auto counts = train.class_counts();
    std::vector<double> fid(static_cast<std::size_t>(train.num_classes), 0.0);
    for (int i = 0; i < train.size(); ++i) {
        const PureState psi = problem.embed(train.x.row(i).transpose(), params);
        fid[train.y[i]] += fidelity(problem.refs->centers[train.y[i]], psi);
    }
    double total = 0.0;
    for (int k = 0; k < train.num_classes; ++k) {
        if (counts[k] == 0) throw MetricError("class " + std::to_string(k) + " has no training points");
        total += fid[k] / counts[k];
    }
    return 1.0 - total / train.num_classes;
}

TrainResult train_single(const Samples& train, const Problem& problem_in, const TrainConfig& cfg, std::uint64_t seed,
                         std::optional<AnsatzParams> initial) {
    cfg.check();
    if (train.empty()) throw MetricError("empty training set");
    Problem problem = problem_in;
    problem.method = cfg.method;
    problem.check(train.num_classes);
    if (train.dim() != problem.spec.data_dim) throw EncodingError("training features do not match the encoding");

    auto rng = make_rng(seed);
    AnsatzParams start = initial ? *initial : AnsatzParams::random(problem.spec, rng);
    start.check(problem.spec);

    const Objective objective = [&](std::span<const double> flat) {
        return training_loss(train, problem, AnsatzParams::from_flat(problem.spec, flat));
    };

    OptimResult opt;
    if (cfg.optimizer == OptimizerKind::Adam) {
        AdamConfig adam = cfg.adam;
        adam.max_epochs = cfg.max_evals;
        opt = minimize_adam(objective, start.flatten(), adam);
    } else {
        SpsaConfig spsa = cfg.spsa;
        spsa.iterations = cfg.max_evals;
        opt = minimize_spsa(objective, start.flatten(), spsa, rng);
    }
    if (opt.best_x.empty()) opt.best_x = start.flatten();

    TrainResult res;
    res.model.problem = problem;
    res.model.params = AnsatzParams::from_flat(problem.spec, opt.best_x);
    res.model.seed = seed;
    if (problem.method == Method::Implicit) res.model.class_densities = class_densities(train, problem, res.model.params);
    res.history = std::move(opt.history);
    res.final_loss = opt.best_value;
    res.evaluations = opt.evaluations;
    res.converged = opt.converged;
    res.restart_seed = seed;
    return res;
}

std::vector<TrainResult> train_restarts(const Samples& train, const Problem& problem, const TrainConfig& cfg) {
    cfg.check();
    std::vector<std::optional<TrainResult>> slots(static_cast<std::size_t>(cfg.restarts));
    parallel_for(cfg.restarts, cfg.jobs, [&](int r) {
        const std::uint64_t seed = make_rng(cfg.seed, static_cast<std::uint64_t>(r) + 1)();
        slots[r] = train_single(train, problem, cfg, seed);
    });
    std::vector<TrainResult> out;
    out.reserve(slots.size());
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

TrainResult train(const Samples& train_set, const Problem& problem, const TrainConfig& cfg) {
    auto all = train_restarts(train_set, problem, cfg);
    auto best = std::min_element(all.begin(), all.end(),
                                 [](const TrainResult& a, const TrainResult& b) { return a.final_loss < b.final_loss; });
    return std::move(*best);
}

double test_accuracy(const Model& model, const Samples& test) {
    if (test.empty()) throw MetricError("empty test split");
    int correct = 0;
    for (int i = 0; i < test.size(); ++i)
        if (model.classify(test.x.row(i).transpose()) == test.y[i]) ++correct;
    return static_cast<double>(correct) / test.size();
}

double mean_center_fidelity(const Model& model, const Samples& samples) {
    if (samples.empty()) throw MetricError("empty sample set");
    if (!model.problem.refs) throw MetricError("model has no reference centers");
    double total = 0.0;
    for (int i = 0; i < samples.size(); ++i)
        total += fidelity(model.problem.refs->centers.at(samples.y[i]), model.embed(samples.x.row(i).transpose()));
    return total / samples.size();
}

}  // namespace qudit
