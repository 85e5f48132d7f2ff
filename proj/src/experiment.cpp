#include "qudit/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "json.hpp"
#include "qudit/mos.hpp"
#include "qudit/noisy.hpp"

#ifndef QUDIT_VERSION
#define QUDIT_VERSION "0.0.0"
#endif

namespace qudit {

namespace fs = std::filesystem;
using nlohmann::json;

std::string library_version() { return QUDIT_VERSION; }

Dataset load_dataset(const ExperimentConfig& cfg) {
    const auto& d = cfg.data;
    if (d.dataset == "iris") return load_iris(d.path, d.split_seed);
    if (d.dataset == "breast_cancer") return load_breast_cancer(d.path, d.split_seed, d.feature_columns, d.train_total);
    DigitsSource src;
    src.digits = d.digits;
    src.train_per_class = d.train_per_class;
    src.validation_per_class = d.validation_per_class;
    src.test_per_class = d.test_per_class;
    if (d.dataset == "digits8x8") {
        src.variant = DigitsVariant::Digits8x8;
        src.csv = d.path;
    } else if (d.dataset == "mnist") {
        src.variant = DigitsVariant::MnistIdx;
        src.train_images = d.train_images;
        src.train_labels = d.train_labels;
        src.test_images = d.test_images;
        src.test_labels = d.test_labels;
    } else {
        throw ConfigError("unknown dataset '" + d.dataset + "'");
    }
    return load_digits(src, d.split_seed);
}

ReferenceSet make_centers(const ExperimentConfig& cfg, int dim, int classes) {
    switch (cfg.model.centers) {
        case CenterSource::Orthonormal: return ReferenceSet::orthonormal(dim, classes);
        case CenterSource::Auto:
            if (classes <= dim) return ReferenceSet::orthonormal(dim, classes);
            [[fallthrough]];
        case CenterSource::Mos: {
            GAConfig ga = cfg.mos;
            ga.seed = cfg.seed;
            return ReferenceSet{evolve(ga, dim, classes).best.states};
        }
        case CenterSource::MosFile: {
            const MosFile f = read_mos_file(cfg.model.mos_file);
            if (f.dim != dim || f.count != classes)
                throw ConfigError("MOS file holds K=" + std::to_string(f.count) + " states of d=" +
                                  std::to_string(f.dim) + ", experiment needs K=" + std::to_string(classes) +
                                  ", d=" + std::to_string(dim));
            return ReferenceSet{f.states};
        }
    }
    throw ConfigError("unhandled center source");
}

EncodingVariant default_encoding(Method m) { return m == Method::Explicit ? EncodingVariant::g2 : EncodingVariant::g1; }

Problem make_problem(const ExperimentConfig& cfg, int dim, int data_dim, int classes, EncodingVariant variant,
                     Method method) {
    Problem p;
    p.method = method;
    const bool need_centers = method == Method::Explicit || cfg.model.virtual_basis;
    if (need_centers) p.refs = make_centers(cfg, dim, classes);
    if (cfg.model.virtual_basis) {
        p.basis = VirtualBasis{p.refs->centers};
        p.spec = EncodingSpec::on_basis(variant, *p.basis, data_dim, cfg.model.layers);
    } else {
        p.spec = EncodingSpec::ladder(variant, dim, data_dim, cfg.model.layers);
    }
    if (method == Method::Implicit && !cfg.model.virtual_basis) p.refs.reset();
    return p;
}

std::vector<RestartRow> run_cell(const Samples& train, const Samples& test, const Problem& problem,
                                 const TrainConfig& cfg, Model* best) {
    TrainConfig tc = cfg;
    tc.method = problem.method;
    auto results = train_restarts(train, problem, tc);
    std::vector<RestartRow> rows;
    const TrainResult* lowest = nullptr;
    for (std::size_t r = 0; r < results.size(); ++r) {
        const auto& res = results[r];
        RestartRow row;
        row.restart = static_cast<int>(r);
        row.seed = res.restart_seed;
        row.final_loss = res.final_loss;
        row.train_accuracy = test_accuracy(res.model, train);
        row.test_accuracy = test.empty() ? std::nan("") : test_accuracy(res.model, test);
        if (problem.method == Method::Explicit) {
            row.train_fidelity = mean_center_fidelity(res.model, train);
            row.test_fidelity = test.empty() ? std::nan("") : mean_center_fidelity(res.model, test);
        } else {
            row.train_fidelity = row.test_fidelity = std::nan("");
        }
        row.evaluations = res.evaluations;
        row.converged = res.converged;
        row.loss_curve = res.history;
        rows.push_back(std::move(row));
        if (!lowest || res.final_loss < lowest->final_loss) lowest = &res;
    }
    if (best && lowest) *best = lowest->model;
    return rows;
}

namespace {

std::string num(double v) {
    if (std::isnan(v)) return "";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double median(std::vector<double> v) {
    v.erase(std::remove_if(v.begin(), v.end(), [](double x) { return std::isnan(x); }), v.end());
    if (v.empty()) return std::nan("");
    std::sort(v.begin(), v.end());
    const auto n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double max_of(const std::vector<double>& v) {
    double m = -std::numeric_limits<double>::infinity();
    for (double x : v)
        if (!std::isnan(x)) m = std::max(m, x);
    return std::isinf(m) ? std::nan("") : m;
}

json json_num(double v) { return std::isnan(v) ? json(nullptr) : json(v); }

json config_json(const ExperimentConfig& cfg) {
    json j = json::object();
    for (const auto& [section, keys] : cfg.echo)
        for (const auto& [k, v] : keys) j[section][k] = v;
    return j;
}

class RowWriter {
public:
    RowWriter(const fs::path& path, const ExperimentConfig& cfg, const std::vector<std::string>& header) : out_(path) {
        if (!out_) throw DataError("cannot write " + path.string());
        out_ << "# qudit " << library_version() << " " << to_string(cfg.kind) << "\n";
        for (const auto& [section, keys] : cfg.echo)
            for (const auto& [k, v] : keys) out_ << "# " << section << "." << k << " = " << v << "\n";
        row(header);
    }

    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
        out_ << "\n";
    }

private:
    std::ofstream out_;
};

const std::vector<std::string> kRestartHeader = {"d",         "encoding",       "method",        "pca_dim",
                                                 "restart",   "seed",           "final_loss",    "train_accuracy",
                                                 "test_accuracy", "train_fidelity", "test_fidelity", "evaluations",
                                                 "converged"};

json cell_json(int d, EncodingVariant enc, Method m, std::optional<int> pca, const std::vector<RestartRow>& rows) {
    json restarts = json::array();
    std::vector<double> acc, loss, trf, tef;
    for (const auto& r : rows) {
        restarts.push_back({{"restart", r.restart},
                            {"seed", r.seed},
                            {"final_loss", r.final_loss},
                            {"train_accuracy", r.train_accuracy},
                            {"test_accuracy", json_num(r.test_accuracy)},
                            {"train_fidelity", json_num(r.train_fidelity)},
                            {"test_fidelity", json_num(r.test_fidelity)},
                            {"evaluations", r.evaluations},
                            {"converged", r.converged},
                            {"loss_curve", r.loss_curve}});
        acc.push_back(r.test_accuracy);
        loss.push_back(r.final_loss);
        trf.push_back(r.train_fidelity);
        tef.push_back(r.test_fidelity);
    }
    json cell = {{"d", d}, {"encoding", to_string(enc)}, {"method", to_string(m)}, {"restarts", restarts}};
    if (pca) cell["pca_dim"] = *pca;
    cell["summary"] = {{"median_test_accuracy", json_num(median(acc))},
                       {"max_test_accuracy", json_num(max_of(acc))},
                       {"median_final_loss", json_num(median(loss))},
                       {"median_train_fidelity", json_num(median(trf))},
                       {"median_test_fidelity", json_num(median(tef))}};
    return cell;
}

void write_rows(RowWriter& w, int d, EncodingVariant enc, Method m, std::optional<int> pca,
                const std::vector<RestartRow>& rows) {
    for (const auto& r : rows)
        w.row({std::to_string(d), to_string(enc), to_string(m), pca ? std::to_string(*pca) : "", std::to_string(r.restart),
               std::to_string(r.seed), num(r.final_loss), num(r.train_accuracy), num(r.test_accuracy),
               num(r.train_fidelity), num(r.test_fidelity), std::to_string(r.evaluations), r.converged ? "1" : "0"});
}

void say(std::ostream* log, const std::string& msg) {
    if (log) *log << msg << std::endl;
}

std::string fmt(double v, int prec = 4) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(prec) << v;
    return os.str();
}

struct Cell {
    int d;
    EncodingVariant enc;
    Method method;
};

std::vector<Cell> cells_for(const ExperimentConfig& cfg) {
    std::vector<Cell> cells;
    for (int d : cfg.model.dims) {
        for (Method m : cfg.model.methods) {
            if (cfg.model.encodings.empty()) {
                cells.push_back({d, default_encoding(m), m});
            } else {
                for (auto e : cfg.model.encodings) cells.push_back({d, e, m});
            }
        }
    }
    return cells;
}

json run_training(const ExperimentConfig& cfg, const fs::path& dir, ExperimentOutput& out, std::ostream* log) {
    const Dataset data = load_dataset(cfg);
    json entries = json::array();
    RowWriter w(out.rows_csv, cfg, kRestartHeader);

    std::vector<std::optional<int>> pcas;
    if (cfg.kind == ExperimentKind::PcaSweep)
        for (int p : cfg.pca_dims) pcas.emplace_back(p);
    else
        pcas.push_back(cfg.data.pca_dim);

    std::optional<SavedModel> keep;
    double keep_loss = std::numeric_limits<double>::infinity();
    for (const auto& pca : pcas) {
        const PreparedSplits splits = prepare(data, pca);
        for (const auto& c : cells_for(cfg)) {
            const auto t0 = std::chrono::steady_clock::now();
            const Problem p = make_problem(cfg, c.d, splits.train.dim(), splits.train.num_classes, c.enc, c.method);
            Model best;
            const auto rows = run_cell(splits.train, splits.test, p, cfg.train, &best);
            const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            write_rows(w, c.d, c.enc, c.method, pca, rows);
            json cell = cell_json(c.d, c.enc, c.method, pca, rows);
            cell["wall_seconds"] = secs;
            std::vector<double> acc;
            for (const auto& r : rows) acc.push_back(r.test_accuracy);
            say(log, "d=" + std::to_string(c.d) + " " + to_string(c.enc) + " " + to_string(c.method) +
                         (pca ? " pca=" + std::to_string(*pca) : std::string()) + ": median test accuracy " +
                         fmt(median(acc)) + ", max " + fmt(max_of(acc)) + " (" + fmt(secs, 1) + " s)");
            entries.push_back(std::move(cell));

            const double loss = std::min_element(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
                                    return a.final_loss < b.final_loss;
                                })->final_loss;
            if (cfg.kind == ExperimentKind::TrainEval && loss < keep_loss) {
                keep_loss = loss;
                keep = SavedModel{best, splits.standardizer, splits.pca, cfg.data.dataset};
            }
        }
    }
    if (keep) {
        const fs::path model_path = dir / "model.json";
        save_model(model_path, *keep);
        out.extra.push_back(model_path);
    }
    return entries;
}

json run_mos(const ExperimentConfig& cfg, const fs::path& dir, ExperimentOutput& out, std::ostream* log) {
    GAConfig ga = cfg.mos;
    ga.seed = cfg.seed;
    const EvolveResult res = evolve(ga, cfg.mos_dim, cfg.mos_count);
    const fs::path mos_path = dir / "mos.txt";
    write_mos_file(mos_path, MosFile{cfg.mos_dim, cfg.mos_count, ga.exponent, res.best.states});
    out.extra.push_back(mos_path);

    const Eigen::MatrixXd g = gram_matrix(res.best.states);
    RowWriter w(out.rows_csv, cfg, {"i", "j", "overlap", "overlap_squared"});
    json gram = json::array();
    for (Eigen::Index i = 0; i < g.rows(); ++i) {
        std::vector<double> row;
        for (Eigen::Index j = 0; j < g.cols(); ++j) {
            w.row({std::to_string(i), std::to_string(j), num(g(i, j)), num(g(i, j) * g(i, j))});
            row.push_back(g(i, j));
        }
        gram.push_back(row);
    }
    json states = json::array();
    for (const auto& s : res.best.states) {
        json a = json::array();
        for (int i = 0; i < s.dim(); ++i) a.push_back({s[i].real(), s[i].imag()});
        states.push_back(a);
    }
    say(log, "MOS d=" + std::to_string(cfg.mos_dim) + " K=" + std::to_string(cfg.mos_count) + ": E_W = " +
                 num(-res.best.fitness) + " after " + std::to_string(res.generations) + " generations");
    return json::array({{{"d", cfg.mos_dim},
                         {"K", cfg.mos_count},
                         {"exponent", ga.exponent},
                         {"energy", -res.best.fitness},
                         {"generations", res.generations},
                         {"best_fitness", res.best_fitness},
                         {"gram", gram},
                         {"states", states}}});
}

json run_noise(const ExperimentConfig& cfg, ExperimentOutput& out, std::ostream* log) {
    const Dataset data = load_dataset(cfg);
    const PreparedSplits splits = prepare(data, cfg.data.pca_dim);
    const int d = cfg.model.dims.front();
    const auto t2s = cfg.noise.T2.empty() ? log_grid(cfg.noise.t2_min, cfg.noise.t2_max, cfg.noise.t2_points)
                                          : cfg.noise.T2;
    const ReferenceSet refs = make_centers(cfg, d, splits.train.num_classes);

    RowWriter w(out.rows_csv, cfg,
                {"T2", "run", "train_loss", "test_accuracy", "reinitialized", "aborted", "wall_seconds"});
    json entries = json::array();
    for (std::size_t i = 0; i < t2s.size(); ++i) {
        NoisyProblem p{EncodingSpec::ladder(EncodingVariant::g2, d, splits.train.dim(), cfg.model.layers), refs,
                       NoiseModel::from_rabi_hz(cfg.noise.rabi_hz, cfg.noise.T1, t2s[i])};
        ChainConfig cc;
        cc.spsa = cfg.train.spsa;
        cc.runs = cfg.noise.runs;
        cc.seed = cfg.seed;
        cc.jobs = cfg.jobs;
        const auto recs = run_chain(splits.train, splits.test, p, cc);
        json runs = json::array();
        std::vector<double> acc;
        double secs = 0.0;
        for (const auto& r : recs) {
            w.row({num(t2s[i]), std::to_string(r.run), num(r.train_loss), num(r.test_accuracy),
                   r.reinitialized ? "1" : "0", r.aborted ? "1" : "0", num(r.wall_seconds)});
            runs.push_back({{"run", r.run},
                            {"train_loss", json_num(r.train_loss)},
                            {"test_accuracy", r.test_accuracy},
                            {"reinitialized", r.reinitialized},
                            {"aborted", r.aborted},
                            {"wall_seconds", r.wall_seconds}});
            acc.push_back(r.test_accuracy);
            secs += r.wall_seconds;
        }
        say(log, "T2=" + num(t2s[i]) + " s: max test accuracy " + fmt(max_of(acc)) + ", median " + fmt(median(acc)) +
                     " (" + fmt(secs, 1) + " s)");
        entries.push_back({{"T2", t2s[i]},
                           {"d", d},
                           {"layers", cfg.model.layers},
                           {"runs", runs},
                           {"summary", {{"max_test_accuracy", max_of(acc)}, {"median_test_accuracy", median(acc)}}},
                           {"wall_seconds", secs}});
    }
    return entries;
}

}  // namespace

ExperimentOutput run_experiment(const ExperimentConfig& cfg, std::ostream* log) {
    cfg.validate();
    const fs::path dir = cfg.output;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw DataError("cannot create output directory " + dir.string() + ": " + ec.message());

    ExperimentOutput out;
    out.results_json = dir / "results.json";
    out.rows_csv = dir / "rows.csv";

    const auto t0 = std::chrono::steady_clock::now();
    json entries;
    switch (cfg.kind) {
        case ExperimentKind::MosGenerate: entries = run_mos(cfg, dir, out, log); break;
        case ExperimentKind::NoiseSweep: entries = run_noise(cfg, out, log); break;
        default: entries = run_training(cfg, dir, out, log); break;
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    json doc = {{"library_version", library_version()},
                {"kind", to_string(cfg.kind)},
                {"config", config_json(cfg)},
                {"entries", entries},
                {"wall_seconds", secs}};
    std::ofstream f(out.results_json);
    if (!f) throw DataError("cannot write " + out.results_json.string());
    f << std::setw(2) << doc << "\n";
    return out;
}

std::array<double, 3> bloch_vector(const PureState& s) {
    if (s.dim() != 2) throw DimensionError("Bloch coordinates need a qubit");
    const cplx c = std::conj(s[0]) * s[1];
    return {2.0 * c.real(), 2.0 * c.imag(), std::norm(s[0]) - std::norm(s[1])};
}

void export_bloch(const SavedModel& saved, const Samples& split, const fs::path& out_path) {
    const Model& model = saved.model;
    const int d = model.problem.spec.dim;
    Eigen::MatrixXd x = split.x;
    if (saved.pca) x = apply_pca(*saved.pca, x);
    x = saved.standardizer.apply(x);

    std::ofstream out(out_path);
    if (!out) throw DataError("cannot write " + out_path.string());
    out << "kind,index,label,predicted";
    if (d == 2) {
        out << ",x,y,z";
    } else {
        for (int i = 0; i < d; ++i) out << ",re" << i << ",im" << i;
    }
    out << "\n";
    const auto emit = [&](const char* kind, int index, int label, int predicted, const PureState& s) {
        out << kind << "," << index << "," << label << "," << predicted;
        if (d == 2) {
            for (double c : bloch_vector(s)) out << "," << num(c);
        } else {
            for (int i = 0; i < d; ++i) out << "," << num(s[i].real()) << "," << num(s[i].imag());
        }
        out << "\n";
    };
    for (int i = 0; i < split.size(); ++i) {
        const Eigen::VectorXd xi = x.row(i).transpose();
        emit("point", i, split.y[i], model.classify(xi), model.embed(xi));
    }
    if (model.problem.method == Method::Explicit && model.problem.refs)
        for (int k = 0; k < model.problem.refs->size(); ++k) emit("center", k, k, k, model.problem.refs->centers[k]);
}

}  // namespace qudit
