#include "qudit/config.hpp"
#include "qudit/data.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#ifndef QUDIT_DEFAULT_DATA_DIR
#define QUDIT_DEFAULT_DATA_DIR "data"
#endif

namespace qudit {

namespace fs = std::filesystem;
namespace pt = boost::property_tree;

std::string to_string(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::TrainEval: return "train_eval";
        case ExperimentKind::EncodingSweep: return "encoding_sweep";
        case ExperimentKind::MethodCompare: return "method_compare";
        case ExperimentKind::MosGenerate: return "mos_generate";
        case ExperimentKind::NoiseSweep: return "noise_sweep";
        case ExperimentKind::PcaSweep: return "pca_sweep";
    }
    return "unknown";
}

ExperimentKind parse_experiment_kind(const std::string& name) {
    for (auto k : {ExperimentKind::TrainEval, ExperimentKind::EncodingSweep, ExperimentKind::MethodCompare,
                   ExperimentKind::MosGenerate, ExperimentKind::NoiseSweep, ExperimentKind::PcaSweep})
        if (to_string(k) == name) return k;
    throw ConfigError("unknown experiment kind '" + name + "'");
}

std::string to_string(CenterSource c) {
    switch (c) {
        case CenterSource::Auto: return "auto";
        case CenterSource::Orthonormal: return "orthonormal";
        case CenterSource::Mos: return "mos";
        case CenterSource::MosFile: return "mos_file";
    }
    return "unknown";
}

fs::path default_data_dir() {
    if (const char* env = std::getenv("QUDIT_DATA_DIR"); env && *env) return env;
    return QUDIT_DEFAULT_DATA_DIR;
}

namespace {

const std::map<std::string, std::set<std::string>> kKnownKeys = {
    {"experiment", {"kind", "seed", "jobs", "output"}},
    {"data",
     {"dataset", "path", "data_dir", "train_images", "train_labels", "test_images", "test_labels", "feature_columns",
      "train_total", "digits", "train_per_class", "validation_per_class", "test_per_class", "pca_dim", "split_seed"}},
    {"model", {"d", "layers", "encoding", "method", "centers", "mos_file", "virtual_basis"}},
    {"train",
     {"optimizer", "restarts", "max_evals", "step", "beta1", "beta2", "fd_step", "patience", "min_improvement",
      "target", "spsa_a", "spsa_c", "spsa_A", "spsa_alpha", "spsa_gamma"}},
    {"mos",
     {"d", "K", "exponent", "population", "crossover", "mutation", "generations", "window", "local_steps",
      "local_step", "elites", "tournament"}},
    {"noise", {"T1", "T2", "t2_min", "t2_max", "t2_points", "rabi_hz", "runs", "iterations"}},
    {"pca", {"dims"}},
};

std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

class Reader {
public:
    Reader(const pt::ptree& tree) : tree_(tree) {}

    std::optional<std::string> raw(const std::string& section, const std::string& key) const {
        const auto sec = tree_.get_child_optional(pt::ptree::path_type(section, '\0'));
        if (!sec) return std::nullopt;
        const auto v = sec->get_optional<std::string>(pt::ptree::path_type(key, '\0'));
        if (!v) return std::nullopt;
        return trim(*v);
    }

    template <typename T>
    void get(const std::string& section, const std::string& key, T& out) const {
        const auto v = raw(section, key);
        if (!v) return;
        out = convert<T>(*v, section, key);
    }

    template <typename T>
    void get_list(const std::string& section, const std::string& key, std::vector<T>& out) const {
        const auto v = raw(section, key);
        if (!v) return;
        out.clear();
        for (const auto& item : split_list(*v)) out.push_back(convert<T>(item, section, key));
        if (out.empty()) throw ConfigError("[" + section + "] " + key + " must not be empty");
    }

    template <typename T>
    static T convert(const std::string& v, const std::string& section, const std::string& key) {
        const auto fail = [&]() -> T { throw ConfigError("[" + section + "] " + key + ": cannot parse '" + v + "'"); };
        if constexpr (std::is_same_v<T, std::string>) {
            return v;
        } else if constexpr (std::is_same_v<T, bool>) {
            if (v == "true" || v == "1" || v == "yes") return true;
            if (v == "false" || v == "0" || v == "no") return false;
            return fail();
        } else if constexpr (std::is_same_v<T, fs::path>) {
            return fs::path(v);
        } else {
            std::istringstream is(v);
            T x{};
            is >> x;
            if (is.fail() || !is.eof()) return fail();
            return x;
        }
    }

private:
    const pt::ptree& tree_;
};

fs::path resolve(const fs::path& p, const fs::path& base) {
    if (p.empty() || p.is_absolute()) return p;
    return base / p;
}

template <typename T>
std::string str(const T& v);

template <typename T>
std::string join(const std::vector<T>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + str(v[i]);
    return out;
}

template <typename T>
std::string str(const T& v) {
    if constexpr (std::is_same_v<T, std::string>) {
        return v;
    } else if constexpr (std::is_floating_point_v<T>) {
        char buf[32];
        const auto r = std::to_chars(buf, buf + sizeof buf, v);
        return std::string(buf, r.ptr);
    } else {
        return std::to_string(v);
    }
}

void fill_echo(ExperimentConfig& c) {
    auto& e = c.echo;
    e["experiment"] = {{"kind", to_string(c.kind)}, {"seed", str(c.seed)}, {"jobs", str(c.jobs)},
                       {"output", c.output.string()}};
    auto& d = e["data"];
    d = {{"dataset", c.data.dataset}, {"split_seed", str(c.data.split_seed)}};
    if (c.data.dataset == "mnist") {
        d["train_images"] = c.data.train_images.string();
        d["train_labels"] = c.data.train_labels.string();
        d["test_images"] = c.data.test_images.string();
        d["test_labels"] = c.data.test_labels.string();
    } else {
        d["path"] = c.data.path.string();
    }
    if (c.data.dataset == "breast_cancer") {
        d["feature_columns"] = str(c.data.feature_columns);
        d["train_total"] = str(c.data.train_total);
    }
    if (c.data.dataset == "digits8x8" || c.data.dataset == "mnist") {
        d["digits"] = join(c.data.digits);
        d["train_per_class"] = str(c.data.train_per_class);
        d["validation_per_class"] = str(c.data.validation_per_class);
        d["test_per_class"] = str(c.data.test_per_class);
    }
    if (c.data.pca_dim) d["pca_dim"] = str(*c.data.pca_dim);

    std::vector<std::string> enc, meth;
    for (auto v : c.model.encodings) enc.push_back(to_string(v));
    for (auto m : c.model.methods) meth.push_back(to_string(m));
    e["model"] = {{"d", join(c.model.dims)},
                  {"layers", str(c.model.layers)},
                  {"encoding", enc.empty() ? "default" : join(enc)},
                  {"method", join(meth)},
                  {"centers", to_string(c.model.centers)},
                  {"virtual_basis", c.model.virtual_basis ? "true" : "false"}};
    if (c.model.centers == CenterSource::MosFile) e["model"]["mos_file"] = c.model.mos_file.string();

    const auto& t = c.train;
    e["train"] = {{"optimizer", to_string(t.optimizer)},  {"restarts", str(t.restarts)},
                  {"max_evals", str(t.max_evals)},        {"step", str(t.adam.step)},
                  {"beta1", str(t.adam.beta1)},           {"beta2", str(t.adam.beta2)},
                  {"fd_step", str(t.adam.fd_step)},       {"patience", str(t.adam.patience)},
                  {"min_improvement", str(t.adam.min_improvement)}, {"target", str(t.adam.target)},
                  {"spsa_a", str(t.spsa.a)},              {"spsa_c", str(t.spsa.c)},
                  {"spsa_A", str(t.spsa.A)},              {"spsa_alpha", str(t.spsa.alpha)},
                  {"spsa_gamma", str(t.spsa.gamma)}};

    const auto& g = c.mos;
    e["mos"] = {{"d", str(c.mos_dim)},          {"K", str(c.mos_count)},
                {"exponent", str(g.exponent)},  {"population", str(g.population)},
                {"crossover", str(g.crossover)}, {"mutation", str(g.mutation)},
                {"generations", str(g.max_generations)}, {"window", str(g.convergence_window)},
                {"local_steps", str(g.local_steps)}, {"local_step", str(g.local_step)},
                {"elites", str(g.elites)},      {"tournament", str(g.tournament)}};

    const auto& n = c.noise;
    e["noise"] = {{"T1", str(n.T1)},         {"rabi_hz", str(n.rabi_hz)},
                  {"runs", str(n.runs)},     {"iterations", str(c.train.spsa.iterations)}};
    if (n.T2.empty()) {
        e["noise"]["t2_min"] = str(n.t2_min);
        e["noise"]["t2_max"] = str(n.t2_max);
        e["noise"]["t2_points"] = str(n.t2_points);
    } else {
        e["noise"]["T2"] = join(n.T2);
    }
    if (!c.pca_dims.empty()) e["pca"] = {{"dims", join(c.pca_dims)}};
}

}  // namespace

ExperimentConfig parse_config(const std::string& text, const fs::path& origin) {
    pt::ptree tree;
    try {
        std::istringstream is(text);
        pt::read_ini(is, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("malformed config: ") + e.message() + " (line " + std::to_string(e.line()) + ")");
    }

    for (const auto& [section, body] : tree) {
        const auto known = kKnownKeys.find(section);
        if (known == kKnownKeys.end()) throw ConfigError("unknown section [" + section + "]");
        if (!body.data().empty()) throw ConfigError("key '" + section + "' outside any section");
        for (const auto& [key, _] : body)
            if (!known->second.count(key)) throw ConfigError("unknown key '" + key + "' in [" + section + "]");
    }

    const Reader r(tree);
    ExperimentConfig c;
    c.source = origin;
    const fs::path base = origin.empty() ? fs::current_path() : origin.parent_path();

    const auto kind = r.raw("experiment", "kind");
    if (!kind) throw ConfigError("[experiment] kind is required");
    c.kind = parse_experiment_kind(*kind);
    r.get("experiment", "seed", c.seed);
    r.get("experiment", "jobs", c.jobs);
    r.get("experiment", "output", c.output);

    auto& d = c.data;
    r.get("data", "dataset", d.dataset);
    fs::path data_dir = default_data_dir();
    if (auto dd = r.raw("data", "data_dir")) data_dir = resolve(*dd, base);
    r.get("data", "path", d.path);
    r.get("data", "train_images", d.train_images);
    r.get("data", "train_labels", d.train_labels);
    r.get("data", "test_images", d.test_images);
    r.get("data", "test_labels", d.test_labels);
    r.get("data", "feature_columns", d.feature_columns);
    r.get("data", "train_total", d.train_total);
    r.get_list("data", "digits", d.digits);
    r.get("data", "train_per_class", d.train_per_class);
    r.get("data", "validation_per_class", d.validation_per_class);
    r.get("data", "test_per_class", d.test_per_class);
    d.split_seed = c.seed;
    r.get("data", "split_seed", d.split_seed);
    if (auto p = r.raw("data", "pca_dim")) d.pca_dim = Reader::convert<int>(*p, "data", "pca_dim");

    if (d.dataset == "iris") {
        if (d.path.empty()) d.path = "iris.csv";
    } else if (d.dataset == "breast_cancer") {
        if (d.path.empty()) d.path = "breast_cancer.csv";
    } else if (d.dataset == "digits8x8") {
        if (d.path.empty()) d.path = "digits.csv";
    } else if (d.dataset == "mnist") {
        if (d.train_images.empty()) d.train_images = "train-images-idx3-ubyte";
        if (d.train_labels.empty()) d.train_labels = "train-labels-idx1-ubyte";
        if (d.test_images.empty()) d.test_images = "t10k-images-idx3-ubyte";
        if (d.test_labels.empty()) d.test_labels = "t10k-labels-idx1-ubyte";
    } else {
        throw ConfigError("unknown dataset '" + d.dataset + "' (expected iris, breast_cancer, digits8x8 or mnist)");
    }
    for (fs::path* p : {&d.path, &d.train_images, &d.train_labels, &d.test_images, &d.test_labels})
        *p = resolve(*p, data_dir);

    auto& m = c.model;
    r.get_list("model", "d", m.dims);
    r.get("model", "layers", m.layers);
    std::vector<std::string> names;
    r.get_list("model", "encoding", names);
    for (const auto& n : names) {
        try {
            m.encodings.push_back(parse_encoding(n));
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    }
    names.clear();
    r.get_list("model", "method", names);
    if (!names.empty()) m.methods.clear();
    for (const auto& n : names) {
        try {
            m.methods.push_back(parse_method(n));
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    }
    std::string centers = "auto";
    r.get("model", "centers", centers);
    if (centers == "auto") m.centers = CenterSource::Auto;
    else if (centers == "orthonormal") m.centers = CenterSource::Orthonormal;
    else if (centers == "mos") m.centers = CenterSource::Mos;
    else if (centers == "mos_file") m.centers = CenterSource::MosFile;
    else throw ConfigError("unknown center source '" + centers + "' (expected auto, orthonormal, mos or mos_file)");
    r.get("model", "mos_file", m.mos_file);
    m.mos_file = resolve(m.mos_file, base);
    r.get("model", "virtual_basis", m.virtual_basis);

    auto& t = c.train;
    std::string opt = "adam";
    r.get("train", "optimizer", opt);
    try {
        t.optimizer = parse_optimizer(opt);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    r.get("train", "restarts", t.restarts);
    r.get("train", "max_evals", t.max_evals);
    r.get("train", "step", t.adam.step);
    r.get("train", "beta1", t.adam.beta1);
    r.get("train", "beta2", t.adam.beta2);
    r.get("train", "fd_step", t.adam.fd_step);
    r.get("train", "patience", t.adam.patience);
    r.get("train", "min_improvement", t.adam.min_improvement);
    r.get("train", "target", t.adam.target);
    r.get("train", "spsa_a", t.spsa.a);
    r.get("train", "spsa_c", t.spsa.c);
    r.get("train", "spsa_A", t.spsa.A);
    r.get("train", "spsa_alpha", t.spsa.alpha);
    r.get("train", "spsa_gamma", t.spsa.gamma);
    t.seed = c.seed;
    t.jobs = c.jobs;

    r.get("mos", "d", c.mos_dim);
    r.get("mos", "K", c.mos_count);
    r.get("mos", "exponent", c.mos.exponent);
    r.get("mos", "population", c.mos.population);
    r.get("mos", "crossover", c.mos.crossover);
    r.get("mos", "mutation", c.mos.mutation);
    r.get("mos", "generations", c.mos.max_generations);
    r.get("mos", "window", c.mos.convergence_window);
    r.get("mos", "local_steps", c.mos.local_steps);
    r.get("mos", "local_step", c.mos.local_step);
    r.get("mos", "elites", c.mos.elites);
    r.get("mos", "tournament", c.mos.tournament);
    c.mos.seed = c.seed;
    c.mos.jobs = c.jobs;

    auto& n = c.noise;
    r.get("noise", "T1", n.T1);
    r.get_list("noise", "T2", n.T2);
    r.get("noise", "t2_min", n.t2_min);
    r.get("noise", "t2_max", n.t2_max);
    r.get("noise", "t2_points", n.t2_points);
    r.get("noise", "rabi_hz", n.rabi_hz);
    r.get("noise", "runs", n.runs);
    r.get("noise", "iterations", t.spsa.iterations);

    r.get_list("pca", "dims", c.pca_dims);

    fill_echo(c);
    return c;
}

ExperimentConfig load_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), fs::absolute(path));
}

void ExperimentConfig::validate() const {
    const auto require = [](bool ok, const std::string& msg) {
        if (!ok) throw ConfigError(msg);
    };
    require(jobs >= 1, "[experiment] jobs must be at least 1");
    for (int d : model.dims) require(d >= 2, "[model] d must be at least 2");
    require(model.layers >= 1, "[model] layers must be at least 1");
    require(train.restarts >= 1, "[train] restarts must be at least 1");
    require(train.max_evals >= 1, "[train] max_evals must be at least 1");
    require(mos_dim >= 2 && mos_count >= 2, "[mos] d and K must be at least 2");
    try {
        mos.check();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("[mos] ") + e.what());
    }
    require(noise.T1 > 0.0 && noise.rabi_hz > 0.0, "[noise] T1 and rabi_hz must be positive");
    for (double t : noise.T2) require(t > 0.0, "[noise] T2 values must be positive");
    require(noise.t2_min > 0.0 && noise.t2_max >= noise.t2_min && noise.t2_points >= 1,
            "[noise] need 0 < t2_min <= t2_max and t2_points >= 1");
    require(noise.runs >= 1, "[noise] runs must be at least 1");
    if (data.pca_dim) require(*data.pca_dim >= 1, "[data] pca_dim must be at least 1");
    for (int p : pca_dims) require(p >= 1, "[pca] dims must be at least 1");
    if (kind == ExperimentKind::PcaSweep) require(!pca_dims.empty(), "pca_sweep needs [pca] dims");

    const auto exists = [](const fs::path& p, const std::string& what) {
        if (!fs::exists(p)) throw DataError(what + " not found: " + p.string());
    };
    if (kind != ExperimentKind::MosGenerate) {
        if (data.dataset == "mnist") {
            for (const auto* p : {&data.train_images, &data.train_labels, &data.test_images, &data.test_labels})
                exists(*p, "MNIST file");
        } else {
            exists(data.path, "data file");
        }
    }
    if (model.centers == CenterSource::MosFile) {
        require(!model.mos_file.empty(), "[model] centers = mos_file needs mos_file");
        exists(model.mos_file, "MOS file");
    }
}

}  // namespace qudit
