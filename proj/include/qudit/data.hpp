#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qudit/samples.hpp"

namespace qudit {

class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Split : std::uint8_t { Train, Validation, Test };

/// Labelled feature matrix plus a seeded train/validation/test assignment.
struct Dataset {
    Eigen::MatrixXd features;  // N x D_x
    std::vector<int> labels;   // in [0, K)
    std::vector<std::string> class_names;
    std::vector<Split> split;
    std::uint64_t seed = 0;

    int size() const { return static_cast<int>(labels.size()); }
    int dim() const { return static_cast<int>(features.cols()); }
    int num_classes() const { return static_cast<int>(class_names.size()); }
    int count(Split s) const;
    Samples subset(Split s) const;
    void check() const;
};

/// Rows of a comma-separated file: numeric features followed by one label column.
/// Labels may be integers or names. A leading header line is skipped; an
/// sklearn-style header ("N,D,name0,name1,...") also supplies class names.
struct LabeledTable {
    Eigen::MatrixXd features;
    std::vector<int> labels;
    std::vector<std::string> class_names;
};

LabeledTable read_labeled_csv(const std::filesystem::path& path);

/// Stratified assignment. Each class contributes exactly train[k] training rows,
/// validation[k] validation rows and test[k] test rows (-1: all remaining rows).
std::vector<Split> stratified_split(const std::vector<int>& labels, int num_classes, const std::vector<int>& train,
                                    const std::vector<int>& validation, const std::vector<int>& test,
                                    std::uint64_t seed);

/// 150 rows, 4 features, 3 classes; 10 training rows per class, the rest test.
Dataset load_iris(const std::filesystem::path& path, std::uint64_t seed);

/// Breast cancer (diagnostic): the first `feature_columns` features, 2 classes,
/// `train_total` stratified training rows (113 by default), the rest test.
Dataset load_breast_cancer(const std::filesystem::path& path, std::uint64_t seed, int feature_columns = 10,
                           int train_total = 113);

enum class DigitsVariant { MnistIdx, Digits8x8 };

struct DigitsSource {
    DigitsVariant variant = DigitsVariant::Digits8x8;
    std::filesystem::path csv;  // digits8x8
    std::filesystem::path train_images, train_labels, test_images, test_labels;  // mnist_idx
    std::vector<int> digits{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
    int train_per_class = 300;
    int validation_per_class = 0;  // carved out of train_per_class
    int test_per_class = -1;       // -1: every remaining row
};

/// Pixels scaled to [0, 1] (255 for MNIST, 16 for the 8x8 set). Labels are
/// re-indexed in the order of `digits`.
Dataset load_digits(const DigitsSource& src, std::uint64_t seed);

struct IdxImages {
    int count = 0, rows = 0, cols = 0;
    std::vector<std::uint8_t> pixels;
};

/// Big-endian IDX readers (magic 0x00000803 for images, 0x00000801 for labels).
IdxImages read_idx_images(const std::filesystem::path& path);
std::vector<std::uint8_t> read_idx_labels(const std::filesystem::path& path);

/// Per-column affine transform fitted on training rows.
struct Standardizer {
    Eigen::RowVectorXd mean;
    Eigen::RowVectorXd scale;

    static Standardizer fit(const Eigen::MatrixXd& train);
    Eigen::MatrixXd apply(const Eigen::MatrixXd& x) const;
};

struct PCAModel {
    Eigen::RowVectorXd mean;
    Eigen::MatrixXd components;          // target_dim x D_x, orthonormal rows
    Eigen::VectorXd explained_variance;  // non-increasing
    double total_variance = 0.0;

    Eigen::VectorXd explained_variance_ratio() const { return explained_variance / total_variance; }
};

PCAModel fit_pca(const Eigen::MatrixXd& train, int target_dim);
Eigen::MatrixXd apply_pca(const PCAModel& model, const Eigen::MatrixXd& x);

struct PreparedSplits {
    Samples train, validation, test;
    Standardizer standardizer;
    std::optional<PCAModel> pca;
};

/// Optional PCA followed by standardization, both fitted on the training split only.
PreparedSplits prepare(const Dataset& data, std::optional<int> pca_dim = std::nullopt);

}  // namespace qudit
