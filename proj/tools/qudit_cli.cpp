#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "qudit/config.hpp"
#include "qudit/experiment.hpp"
#include "qudit/lindblad.hpp"
#include "qudit/model_io.hpp"
#include "qudit/mos.hpp"

namespace fs = std::filesystem;
using namespace qudit;

namespace {

enum Exit { kOk = 0, kGeneric = 1, kConfig = 2, kData = 3, kNumerical = 4 };

ExperimentConfig configure(const fs::path& path, std::optional<std::uint64_t> seed, std::optional<int> jobs,
                           std::optional<fs::path> out) {
    ExperimentConfig cfg = load_config(path);
    if (seed) {
        cfg.seed = *seed;
        cfg.train.seed = *seed;
        cfg.mos.seed = *seed;
        cfg.data.split_seed = *seed;
        cfg.echo["experiment"]["seed"] = std::to_string(*seed);
        cfg.echo["data"]["split_seed"] = std::to_string(*seed);
    }
    if (jobs) {
        cfg.jobs = *jobs;
        cfg.train.jobs = *jobs;
        cfg.mos.jobs = *jobs;
        cfg.echo["experiment"]["jobs"] = std::to_string(*jobs);
    }
    if (out) {
        cfg.output = *out;
        cfg.echo["experiment"]["output"] = out->string();
    }
    cfg.validate();
    return cfg;
}

Samples split_of(const Dataset& data, const std::string& name) {
    if (name == "train") return data.subset(Split::Train);
    if (name == "validation") return data.subset(Split::Validation);
    if (name == "test") return data.subset(Split::Test);
    throw ConfigError("unknown split '" + name + "' (expected train, validation or test)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Qudit metric-learning classifier experiments"};
    app.require_subcommand(1);
    app.set_version_flag("--version", library_version());

    fs::path config_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> jobs;
    std::optional<fs::path> out;

    auto* run = app.add_subcommand("run", "Run the experiment described by a config file");
    run->add_option("--config", config_path, "Experiment config")->required()->check(CLI::ExistingFile);
    run->add_option("--seed", seed, "Override the config seed");
    run->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
    run->add_option("--out", out, "Output directory");

    auto* validate = app.add_subcommand("validate-config", "Parse and check a config without running it");
    validate->add_option("--config", config_path, "Experiment config")->required()->check(CLI::ExistingFile);

    int mos_d = 2, mos_k = 3;
    GAConfig ga;
    std::uint64_t mos_seed = 1;
    fs::path mos_out = "mos.txt";
    auto* mos = app.add_subcommand("mos", "Search for maximally orthogonal states and write a MOS file");
    mos->add_option("-d,--dim", mos_d, "Qudit dimension")->check(CLI::Range(2, 64));
    mos->add_option("-K,--count", mos_k, "Number of states")->check(CLI::Range(2, 1024));
    mos->add_option("--exponent", ga.exponent, "Weighting exponent p in W(x) = x^p");
    mos->add_option("--population", ga.population, "Population size");
    mos->add_option("--generations", ga.max_generations, "Maximum generations");
    mos->add_option("--seed", mos_seed, "Random seed");
    mos->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
    mos->add_option("--out", mos_out, "Output MOS file");

    fs::path model_path, bloch_out = "bloch.csv";
    std::string split = "test";
    auto* bloch = app.add_subcommand("bloch-export", "Write embedded states of a dataset split");
    bloch->add_option("--model", model_path, "Model file written by a train_eval run")->required()->check(CLI::ExistingFile);
    bloch->add_option("--config", config_path, "Config describing the dataset")->required()->check(CLI::ExistingFile);
    bloch->add_option("--split", split, "train, validation or test");
    bloch->add_option("--seed", seed, "Override the config seed");
    bloch->add_option("--out", bloch_out, "Output CSV");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            const ExperimentConfig cfg = configure(config_path, seed, jobs, out);
            const ExperimentOutput res = run_experiment(cfg, &std::cerr);
            std::cout << res.results_json.string() << "\n" << res.rows_csv.string() << "\n";
            for (const auto& p : res.extra) std::cout << p.string() << "\n";
        } else if (*validate) {
            const ExperimentConfig cfg = configure(config_path, std::nullopt, std::nullopt, std::nullopt);
            std::cout << "ok: " << to_string(cfg.kind) << "\n";
            for (const auto& [section, keys] : cfg.echo)
                for (const auto& [k, v] : keys) std::cout << "  " << section << "." << k << " = " << v << "\n";
        } else if (*mos) {
            ga.seed = mos_seed;
            if (jobs) ga.jobs = *jobs;
            const EvolveResult res = evolve(ga, mos_d, mos_k);
            write_mos_file(mos_out, MosFile{mos_d, mos_k, ga.exponent, res.best.states});
            std::cout << "E_W = " << -res.best.fitness << " after " << res.generations << " generations\n";
            std::cout << "|<psi_i|psi_j>|:\n" << gram_matrix(res.best.states) << "\n";
        } else if (*bloch) {
            const ExperimentConfig cfg = configure(config_path, seed, std::nullopt, std::nullopt);
            const SavedModel m = load_model(model_path);
            export_bloch(m, split_of(load_dataset(cfg), split), bloch_out);
            std::cout << bloch_out.string() << "\n";
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfig;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kData;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return kNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kGeneric;
    }
    return kOk;
}
