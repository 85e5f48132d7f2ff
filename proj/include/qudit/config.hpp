#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qudit/encoding.hpp"
#include "qudit/mos.hpp"
#include "qudit/optimize.hpp"
#include "qudit/train.hpp"

namespace qudit {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class ExperimentKind { TrainEval, EncodingSweep, MethodCompare, MosGenerate, NoiseSweep, PcaSweep };

std::string to_string(ExperimentKind k);
ExperimentKind parse_experiment_kind(const std::string& name);

/// Where class centers come from. Auto uses the computational basis when K <= d
/// and generated maximally orthogonal states otherwise.
enum class CenterSource { Auto, Orthonormal, Mos, MosFile };

std::string to_string(CenterSource c);

struct DataSection {
    std::string dataset = "iris";  // iris | breast_cancer | digits8x8 | mnist
    std::filesystem::path path;    // csv for iris, breast_cancer, digits8x8
    std::filesystem::path train_images, train_labels, test_images, test_labels;
    int feature_columns = 10;
    int train_total = 113;
    std::vector<int> digits{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
    int train_per_class = 300;
    int validation_per_class = 0;
    int test_per_class = -1;
    std::optional<int> pca_dim;
    std::uint64_t split_seed = 1;
};

struct ModelSection {
    std::vector<int> dims{3};
    int layers = 1;
    std::vector<EncodingVariant> encodings;  // empty: default per method
    std::vector<Method> methods{Method::Explicit};
    CenterSource centers = CenterSource::Auto;
    std::filesystem::path mos_file;
    bool virtual_basis = false;  // rotate between the class centers instead of basis levels
};

struct NoiseSection {
    double T1 = 0.1;
    std::vector<double> T2;  // explicit values; otherwise the log grid below
    double t2_min = 100e-9;
    double t2_max = 100e-6;
    int t2_points = 12;
    double rabi_hz = 1e7;
    int runs = 50;
};

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::TrainEval;
    std::uint64_t seed = 1;
    int jobs = 1;
    std::filesystem::path output = "results";

    DataSection data;
    ModelSection model;
    TrainConfig train;  // method is taken from the model section per cell
    GAConfig mos;
    int mos_dim = 2;
    int mos_count = 3;
    NoiseSection noise;
    std::vector<int> pca_dims;

    std::filesystem::path source;
    /// Every key as read, after defaults are resolved, by section.
    std::map<std::string, std::map<std::string, std::string>> echo;

    /// Invariants: d >= 2, L >= 1 (ConfigError); referenced files exist (DataError).
    void validate() const;
};

/// Directory used for relative data paths: $QUDIT_DATA_DIR when set, otherwise the
/// directory the project was built with.
std::filesystem::path default_data_dir();

/// INI-style file: `[section]` headers and `key = value` lines, `#` or `;` comments.
ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& origin = {});

}  // namespace qudit
