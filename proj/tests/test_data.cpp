#include <fstream>
#include <random>
#include <set>

#include "doctest.h"
#include "helpers.hpp"
#include "qudit/data.hpp"

using namespace qudit;
namespace fs = std::filesystem;

namespace {

void write_be32(std::ofstream& out, std::uint32_t v) {
    const char b[4] = {static_cast<char>(v >> 24), static_cast<char>(v >> 16), static_cast<char>(v >> 8),
                       static_cast<char>(v)};
    out.write(b, 4);
}

// Synthetic IDX pair: `per_digit` images of every digit 0..9, pixel value (digit * 20 + i) % 256.
void write_idx(const fs::path& images, const fs::path& labels, int per_digit, int side = 28) {
    std::ofstream im(images, std::ios::binary), lb(labels, std::ios::binary);
    const int n = 10 * per_digit;
    write_be32(im, 0x00000803);
    write_be32(im, static_cast<std::uint32_t>(n));
    write_be32(im, static_cast<std::uint32_t>(side));
    write_be32(im, static_cast<std::uint32_t>(side));
    write_be32(lb, 0x00000801);
    write_be32(lb, static_cast<std::uint32_t>(n));
    for (int i = 0; i < n; ++i) {
        const int digit = i % 10;
        for (int p = 0; p < side * side; ++p) im.put(static_cast<char>((digit * 20 + p) % 256));
        lb.put(static_cast<char>(digit));
    }
}

fs::path write_text(const fs::path& dir, const std::string& name, const std::string& body) {
    const auto p = dir / name;
    std::ofstream(p) << body;
    return p;
}

bool same_split(const Dataset& a, const Dataset& b) { return a.split == b.split && a.labels == b.labels; }

}  // namespace

TEST_SUITE("data") {

TEST_CASE("iris counts and determinism") {
    const auto path = testutil::data_dir() / "iris.csv";
    const auto a = load_iris(path, 3);
    CHECK(a.size() == 150);
    CHECK(a.dim() == 4);
    CHECK(a.num_classes() == 3);
    CHECK(a.count(Split::Train) == 30);
    CHECK(a.count(Split::Test) == 120);
    CHECK(a.subset(Split::Train).class_counts() == std::vector<int>{10, 10, 10});
    CHECK(same_split(a, load_iris(path, 3)));
    CHECK_FALSE(same_split(a, load_iris(path, 4)));
}

TEST_CASE("malformed rows are reported with their line number") {
    const auto dir = testutil::scratch_dir("data_csv");
    const auto p = write_text(dir, "bad.csv", "150,4,a,b,c\n5.1,3.5,1.4,0.2,0\n4.9,3.0,,0.2,0\n");
    try {
        read_labeled_csv(p);
        FAIL("expected a parse error");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find(":3:") != std::string::npos);
    }
    const auto q = write_text(dir, "short.csv", "1,2,3,0\n1,2,0\n");
    CHECK_THROWS_WITH_AS(read_labeled_csv(q), doctest::Contains(":2:"), DataError);
    CHECK_THROWS_AS(read_labeled_csv(dir / "missing.csv"), DataError);
}

TEST_CASE("named labels") {
    const auto dir = testutil::scratch_dir("data_names");
    const auto p = write_text(dir, "named.csv", "x,y,label\n1,2,cat\n3,4,dog\n5,6,cat\n");
    const auto t = read_labeled_csv(p);
    CHECK(t.features.rows() == 3);
    CHECK(t.labels == std::vector<int>{0, 1, 0});
    CHECK(t.class_names == std::vector<std::string>{"cat", "dog"});
}

TEST_CASE("breast cancer split") {
    const auto path = testutil::data_dir() / "breast_cancer.csv";
    const auto a = load_breast_cancer(path, 1);
    CHECK(a.size() == 569);
    CHECK(a.dim() == 10);
    CHECK(a.num_classes() == 2);
    CHECK(a.count(Split::Train) == 113);
    CHECK(a.count(Split::Test) == 456);
    CHECK(same_split(a, load_breast_cancer(path, 1)));
    CHECK(load_breast_cancer(path, 1, 30).dim() == 30);
    CHECK_THROWS_AS(load_breast_cancer(path, 1, 31), DataError);
}

TEST_CASE("stratified split honours the requested counts") {
    std::vector<int> labels;
    for (int i = 0; i < 40; ++i) labels.push_back(i % 4 == 0 ? 1 : 0);  // 30 of class 0, 10 of class 1
    const auto s = stratified_split(labels, 2, {5, 3}, {2, 1}, {-1, -1}, 7);
    std::vector<std::array<int, 3>> c(2, {0, 0, 0});
    for (std::size_t i = 0; i < labels.size(); ++i) ++c[labels[i]][static_cast<int>(s[i])];
    CHECK(c[0] == std::array<int, 3>{5, 2, 23});
    CHECK(c[1] == std::array<int, 3>{3, 1, 6});
    CHECK_THROWS_AS(stratified_split(labels, 2, {5, 11}, {0, 0}, {-1, -1}, 7), DataError);
}

TEST_CASE("8x8 digits") {
    DigitsSource src;
    src.csv = testutil::data_dir() / "digits.csv";
    src.train_per_class = 100;
    const auto all = load_digits(src, 1);
    CHECK(all.dim() == 64);
    CHECK(all.num_classes() == 10);
    CHECK(all.features.maxCoeff() <= 1.0);
    CHECK(all.features.minCoeff() >= 0.0);

    src.digits = {0, 1, 2, 3, 4};
    src.train_per_class = 50;
    src.test_per_class = 100;
    const auto five = load_digits(src, 1);
    CHECK(five.num_classes() == 5);
    CHECK(five.subset(Split::Train).class_counts() == std::vector<int>(5, 50));
    CHECK(five.subset(Split::Test).class_counts() == std::vector<int>(5, 100));
    CHECK(same_split(five, load_digits(src, 1)));

    src.digits = {7};
    CHECK_THROWS_AS(load_digits(src, 1), DataError);
    src.digits = {3, 3};
    CHECK_THROWS_AS(load_digits(src, 1), DataError);
}

TEST_CASE("MNIST IDX files") {
    const auto dir = testutil::scratch_dir("data_idx");
    write_idx(dir / "train-images", dir / "train-labels", 320);
    write_idx(dir / "test-images", dir / "test-labels", 650);
    DigitsSource src;
    src.variant = DigitsVariant::MnistIdx;
    src.train_images = dir / "train-images";
    src.train_labels = dir / "train-labels";
    src.test_images = dir / "test-images";
    src.test_labels = dir / "test-labels";
    src.digits = {0, 1};
    src.train_per_class = 300;
    src.validation_per_class = 60;
    src.test_per_class = 600;
    const auto d = load_digits(src, 5);
    CHECK(d.dim() == 784);
    CHECK(d.count(Split::Train) == 480);
    CHECK(d.count(Split::Validation) == 120);
    CHECK(d.count(Split::Test) == 1200);
    CHECK(d.features.maxCoeff() <= 1.0);
    // Pixel 0 of a digit-1 image is 20/255.
    for (int i = 0; i < d.size(); ++i)
        if (d.labels[i] == 1) {
            CHECK(d.features(i, 0) == doctest::Approx(20.0 / 255.0));
            break;
        }

    const auto img = read_idx_images(src.train_images);
    CHECK(img.count == 3200);
    CHECK(img.rows == 28);
    CHECK(read_idx_labels(src.train_labels).size() == 3200u);
}

TEST_CASE("IDX errors") {
    const auto dir = testutil::scratch_dir("data_idx_bad");
    write_idx(dir / "img", dir / "lab", 2, 4);
    // Swapped files carry the wrong magic numbers.
    CHECK_THROWS_WITH_AS(read_idx_images(dir / "lab"), doctest::Contains("magic"), DataError);
    CHECK_THROWS_WITH_AS(read_idx_labels(dir / "img"), doctest::Contains("magic"), DataError);
    const auto full = fs::file_size(dir / "img");
    fs::resize_file(dir / "img", full - 5);
    CHECK_THROWS_WITH_AS(read_idx_images(dir / "img"), doctest::Contains("truncated"), DataError);
    fs::resize_file(dir / "lab", 6);
    CHECK_THROWS_WITH_AS(read_idx_labels(dir / "lab"), doctest::Contains("truncated"), DataError);
}

TEST_CASE("standardizer") {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> g(3.0, 2.0);
    Eigen::MatrixXd x(50, 3);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = g(rng);
    x.col(2).setConstant(4.0);
    const auto s = Standardizer::fit(x);
    const Eigen::MatrixXd z = s.apply(x);
    for (int c = 0; c < 2; ++c) {
        CHECK(std::abs(z.col(c).mean()) < 1e-10);
        CHECK(std::abs(z.col(c).squaredNorm() / 50 - 1.0) < 1e-10);
    }
    CHECK(s.scale[2] == 1.0);
    CHECK(z.col(2).cwiseAbs().maxCoeff() == 0.0);
    const auto again = Standardizer::fit(z.leftCols(2));
    CHECK((again.apply(z.leftCols(2)) - z.leftCols(2)).cwiseAbs().maxCoeff() < 1e-10);
    Eigen::MatrixXd shifted = x.array() + 1.0;
    CHECK(std::abs(s.apply(shifted).col(0).mean()) > 0.1);
}

TEST_CASE("PCA properties") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g;
    Eigen::MatrixXd x(80, 6);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = g(rng);
    x.col(1) += 2 * x.col(0);
    const auto full = fit_pca(x, 6);
    CHECK((full.components * full.components.transpose() - Eigen::MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-10);
    for (int i = 1; i < 6; ++i) CHECK(full.explained_variance[i] <= full.explained_variance[i - 1]);
    const Eigen::MatrixXd proj = apply_pca(full, x);
    const Eigen::MatrixXd back = (proj * full.components).rowwise() + full.mean;
    CHECK((back - x).cwiseAbs().maxCoeff() < 1e-8);
    const Eigen::MatrixXd centered = proj.rowwise() - proj.colwise().mean();
    const Eigen::MatrixXd cov = centered.transpose() * centered / 79.0;
    for (int i = 0; i < 6; ++i) {
        CHECK(cov(i, i) == doctest::Approx(full.explained_variance[i]).epsilon(1e-9));
        for (int j = 0; j < 6; ++j)
            if (i != j) CHECK(std::abs(cov(i, j)) < 1e-8);
    }
    CHECK_THROWS_AS(fit_pca(x, 7), DataError);
}

TEST_CASE("PCA on a planar cloud") {
    std::mt19937_64 rng(4);
    std::normal_distribution<double> g;
    Eigen::MatrixXd x(40, 5);
    const Eigen::RowVectorXd u = Eigen::RowVectorXd::LinSpaced(5, 1, 5).normalized();
    Eigen::RowVectorXd v(5);
    v << 1, -1, 0, 2, 0.5;
    for (int i = 0; i < 40; ++i) x.row(i) = Eigen::RowVectorXd::Constant(5, 0.3) + g(rng) * u + g(rng) * v;
    const auto m = fit_pca(x, 2);
    CHECK(m.explained_variance_ratio().sum() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("prepare fits on the training split only") {
    const auto data = load_iris(testutil::data_dir() / "iris.csv", 1);
    const auto sp = prepare(data, 3);
    REQUIRE(sp.pca.has_value());
    CHECK(sp.train.dim() == 3);
    CHECK(sp.test.dim() == 3);
    for (int c = 0; c < 3; ++c) CHECK(std::abs(sp.train.x.col(c).mean()) < 1e-10);
    CHECK(sp.test.size() == 120);
    CHECK(sp.validation.empty());
}

}
