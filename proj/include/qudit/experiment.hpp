#pragma once

#include <array>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "qudit/config.hpp"
#include "qudit/data.hpp"
#include "qudit/model_io.hpp"

namespace qudit {

std::string library_version();

/// Loads the configured dataset with its train/validation/test assignment.
Dataset load_dataset(const ExperimentConfig& cfg);

/// Class centers for K classes in dimension d according to the configured source.
ReferenceSet make_centers(const ExperimentConfig& cfg, int dim, int classes);

/// Classifier definition for one (d, encoding, method) cell.
Problem make_problem(const ExperimentConfig& cfg, int dim, int data_dim, int classes, EncodingVariant variant,
                     Method method);

/// Encoding used when the config does not list one: g2 for explicit, g1 for implicit.
EncodingVariant default_encoding(Method m);

struct RestartRow {
    int restart = 0;
    std::uint64_t seed = 0;
    double final_loss = 0.0;
    double train_accuracy = 0.0;
    double test_accuracy = 0.0;
    double train_fidelity = 0.0;  // mean fidelity to own center (explicit only)
    double test_fidelity = 0.0;
    int evaluations = 0;
    bool converged = false;
    std::vector<double> loss_curve;
};

/// Trains every restart of one cell and scores it on both splits.
std::vector<RestartRow> run_cell(const Samples& train, const Samples& test, const Problem& problem,
                                 const TrainConfig& cfg, Model* best = nullptr);

struct ExperimentOutput {
    std::filesystem::path results_json;
    std::filesystem::path rows_csv;
    std::vector<std::filesystem::path> extra;
};

/// Runs the configured experiment and writes results.json plus rows.csv (and
/// kind-specific extras) into cfg.output.
ExperimentOutput run_experiment(const ExperimentConfig& cfg, std::ostream* log = nullptr);

/// (x, y, z) with x = 2 Re(a0* a1), y = 2 Im(a0* a1), z = |a0|^2 - |a1|^2.
std::array<double, 3> bloch_vector(const PureState& s);

/// One row per sample (label, predicted class, Bloch coordinates for d = 2 or raw
/// amplitudes otherwise), followed by one flagged row per center for explicit models.
/// `split` holds raw features; the model's preprocessing is applied here.
void export_bloch(const SavedModel& model, const Samples& split, const std::filesystem::path& out);

}  // namespace qudit
