#include "qudit/data.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "qudit/parallel.hpp"

namespace qudit {

namespace {

std::string trim(std::string s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) out.push_back(trim(field));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

std::optional<double> parse_double(const std::string& s) {
    if (s.empty()) return std::nullopt;
    double v = 0.0;
    const char* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || ptr != end) return std::nullopt;
    return v;
}

std::optional<int> parse_int(const std::string& s) {
    if (s.empty()) return std::nullopt;
    int v = 0;
    const char* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || ptr != end) return std::nullopt;
    return v;
}

bool numeric_prefix(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i + 1 < fields.size(); ++i)
        if (!parse_double(fields[i])) return false;
    return fields.size() >= 2;
}

std::vector<int> per_class(int num_classes, int value) { return std::vector<int>(static_cast<std::size_t>(num_classes), value); }

}  // namespace

int Dataset::count(Split s) const { return static_cast<int>(std::count(split.begin(), split.end(), s)); }

Samples Dataset::subset(Split s) const {
    Samples out;
    out.num_classes = num_classes();
    const int n = count(s);
    out.x.resize(n, dim());
    int at = 0;
    for (int i = 0; i < size(); ++i) {
        if (split[i] != s) continue;
        out.x.row(at++) = features.row(i);
        out.y.push_back(labels[i]);
    }
    return out;
}

void Dataset::check() const {
    if (features.rows() != static_cast<Eigen::Index>(labels.size()) || split.size() != labels.size())
        throw DataError("dataset columns disagree on the number of rows");
    for (int y : labels)
        if (y < 0 || y >= num_classes()) throw DataError("label " + std::to_string(y) + " outside class range");
}

LabeledTable read_labeled_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());

    LabeledTable table;
    std::vector<std::vector<double>> rows;
    std::vector<std::string> raw_labels;
    std::vector<std::string> header_names;
    std::size_t width = 0;
    std::string line;
    int lineno = 0;
    bool first = true;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        const auto fields = split_fields(line);
        if (first) {
            first = false;
            if (!numeric_prefix(fields)) {
                // Header. sklearn's bundled files start with "N,D,class names...".
                if (fields.size() > 2 && parse_int(fields[0]) && parse_int(fields[1]))
                    header_names.assign(fields.begin() + 2, fields.end());
                continue;
            }
        }
        if (width == 0) width = fields.size();
        if (fields.size() != width)
            throw DataError(path.string() + ":" + std::to_string(lineno) + ": expected " + std::to_string(width) +
                            " fields, found " + std::to_string(fields.size()));
        std::vector<double> row;
        for (std::size_t i = 0; i + 1 < fields.size(); ++i) {
            const auto v = parse_double(fields[i]);
            if (!v)
                throw DataError(path.string() + ":" + std::to_string(lineno) + ": field " + std::to_string(i + 1) +
                                " is not a number ('" + fields[i] + "')");
            row.push_back(*v);
        }
        if (fields.back().empty())
            throw DataError(path.string() + ":" + std::to_string(lineno) + ": missing label");
        rows.push_back(std::move(row));
        raw_labels.push_back(fields.back());
    }
    if (rows.empty()) throw DataError(path.string() + ": no data rows");

    table.features.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width - 1));
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < rows[r].size(); ++c) table.features(r, c) = rows[r][c];

    const bool integer_labels = std::all_of(raw_labels.begin(), raw_labels.end(), [](const std::string& s) {
        return parse_int(s).has_value();
    });
    if (integer_labels) {
        int max_label = 0;
        for (const auto& s : raw_labels) {
            const int y = *parse_int(s);
            if (y < 0) throw DataError(path.string() + ": negative class label " + s);
            table.labels.push_back(y);
            max_label = std::max(max_label, y);
        }
        table.class_names = header_names;
        if (static_cast<int>(table.class_names.size()) <= max_label) {
            table.class_names.clear();
            for (int k = 0; k <= max_label; ++k) table.class_names.push_back(std::to_string(k));
        }
    } else {
        std::map<std::string, int> index;
        for (const auto& s : raw_labels) {
            auto [it, inserted] = index.emplace(s, static_cast<int>(table.class_names.size()));
            if (inserted) table.class_names.push_back(s);
            table.labels.push_back(it->second);
        }
    }
    return table;
}

std::vector<Split> stratified_split(const std::vector<int>& labels, int num_classes, const std::vector<int>& train,
                                    const std::vector<int>& validation, const std::vector<int>& test,
                                    std::uint64_t seed) {
    if (static_cast<int>(train.size()) != num_classes || static_cast<int>(validation.size()) != num_classes ||
        static_cast<int>(test.size()) != num_classes)
        throw DataError("split counts must be given for every class");
    std::vector<std::vector<int>> members(static_cast<std::size_t>(num_classes));
    for (int i = 0; i < static_cast<int>(labels.size()); ++i) members.at(labels[i]).push_back(i);

    // Rows not drawn into any split are dropped (marked by the sentinel below).
    std::vector<Split> split(labels.size(), Split::Test);
    std::vector<bool> used(labels.size(), false);
    auto rng = make_rng(seed, 0x5eed);
    for (int k = 0; k < num_classes; ++k) {
        auto& rows = members[k];
        std::shuffle(rows.begin(), rows.end(), rng);
        const int n = static_cast<int>(rows.size());
        const int want_test = test[k] < 0 ? n - train[k] - validation[k] : test[k];
        if (train[k] < 0 || validation[k] < 0 || want_test < 0 || train[k] + validation[k] + want_test > n)
            throw DataError("class " + std::to_string(k) + " has " + std::to_string(n) + " rows, cannot draw " +
                            std::to_string(train[k]) + " train / " + std::to_string(validation[k]) +
                            " validation / " + std::to_string(std::max(want_test, 0)) + " test");
        int at = 0;
        for (int i = 0; i < train[k]; ++i, ++at) { split[rows[at]] = Split::Train; used[rows[at]] = true; }
        for (int i = 0; i < validation[k]; ++i, ++at) { split[rows[at]] = Split::Validation; used[rows[at]] = true; }
        for (int i = 0; i < want_test; ++i, ++at) { split[rows[at]] = Split::Test; used[rows[at]] = true; }
    }
    if (std::find(used.begin(), used.end(), false) != used.end())
        throw DataError("internal: stratified split left rows unassigned; subset the rows first");
    return split;
}

namespace {

Dataset finish(LabeledTable t, std::vector<Split> split, std::uint64_t seed) {
    Dataset d{std::move(t.features), std::move(t.labels), std::move(t.class_names), std::move(split), seed};
    d.check();
    return d;
}

// Keep only rows selected by `keep`, in order.
LabeledTable select_rows(const LabeledTable& t, const std::vector<int>& keep) {
    LabeledTable out;
    out.class_names = t.class_names;
    out.features.resize(static_cast<Eigen::Index>(keep.size()), t.features.cols());
    for (std::size_t i = 0; i < keep.size(); ++i) {
        out.features.row(static_cast<Eigen::Index>(i)) = t.features.row(keep[i]);
        out.labels.push_back(t.labels[keep[i]]);
    }
    return out;
}

}  // namespace

Dataset load_iris(const std::filesystem::path& path, std::uint64_t seed) {
    LabeledTable t = read_labeled_csv(path);
    if (t.features.cols() != 4)
        throw DataError(path.string() + ": iris needs 4 feature columns, found " + std::to_string(t.features.cols()));
    if (t.class_names.size() != 3)
        throw DataError(path.string() + ": iris needs 3 classes, found " + std::to_string(t.class_names.size()));
    auto split = stratified_split(t.labels, 3, per_class(3, 10), per_class(3, 0), per_class(3, -1), seed);
    return finish(std::move(t), std::move(split), seed);
}

Dataset load_breast_cancer(const std::filesystem::path& path, std::uint64_t seed, int feature_columns,
                           int train_total) {
    LabeledTable t = read_labeled_csv(path);
    if (feature_columns < 1 || feature_columns > t.features.cols())
        throw DataError(path.string() + ": requested " + std::to_string(feature_columns) + " feature columns, file has " +
                        std::to_string(t.features.cols()));
    if (t.class_names.size() != 2)
        throw DataError(path.string() + ": breast cancer data needs 2 classes, found " +
                        std::to_string(t.class_names.size()));
    t.features = t.features.leftCols(feature_columns).eval();

    // Proportional allocation with largest remainders.
    std::vector<int> counts(2, 0);
    for (int y : t.labels) ++counts[y];
    const int n = static_cast<int>(t.labels.size());
    if (train_total < 2 || train_total > n) throw DataError("training size must lie in [2, N]");
    std::vector<int> train(2);
    std::vector<double> remainder(2);
    for (int k = 0; k < 2; ++k) {
        const double exact = static_cast<double>(train_total) * counts[k] / n;
        train[k] = static_cast<int>(exact);
        remainder[k] = exact - train[k];
    }
    if (train[0] + train[1] < train_total) ++train[remainder[0] >= remainder[1] ? 0 : 1];
    auto split = stratified_split(t.labels, 2, train, per_class(2, 0), per_class(2, -1), seed);
    return finish(std::move(t), std::move(split), seed);
}

namespace {

std::uint32_t read_be32(std::istream& in, const std::filesystem::path& path) {
    unsigned char b[4];
    if (!in.read(reinterpret_cast<char*>(b), 4)) throw DataError(path.string() + ": truncated IDX header");
    return (std::uint32_t{b[0]} << 24) | (std::uint32_t{b[1]} << 16) | (std::uint32_t{b[2]} << 8) | std::uint32_t{b[3]};
}

}  // namespace

IdxImages read_idx_images(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    const auto magic = read_be32(in, path);
    if (magic != 0x00000803) throw DataError(path.string() + ": bad IDX image magic number");
    IdxImages img;
    img.count = static_cast<int>(read_be32(in, path));
    img.rows = static_cast<int>(read_be32(in, path));
    img.cols = static_cast<int>(read_be32(in, path));
    img.pixels.resize(static_cast<std::size_t>(img.count) * img.rows * img.cols);
    if (!in.read(reinterpret_cast<char*>(img.pixels.data()), static_cast<std::streamsize>(img.pixels.size())))
        throw DataError(path.string() + ": truncated IDX image data");
    return img;
}

std::vector<std::uint8_t> read_idx_labels(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    if (read_be32(in, path) != 0x00000801) throw DataError(path.string() + ": bad IDX label magic number");
    std::vector<std::uint8_t> labels(read_be32(in, path));
    if (!in.read(reinterpret_cast<char*>(labels.data()), static_cast<std::streamsize>(labels.size())))
        throw DataError(path.string() + ": truncated IDX label data");
    return labels;
}

Dataset load_digits(const DigitsSource& src, std::uint64_t seed) {
    const int K = static_cast<int>(src.digits.size());
    if (K < 2) throw DataError("digit classification needs at least two digits");
    std::vector<int> remap(10, -1);
    for (int k = 0; k < K; ++k) {
        const int digit = src.digits[k];
        if (digit < 0 || digit > 9 || remap[digit] >= 0) throw DataError("invalid or repeated digit in subset");
        remap[digit] = k;
    }
    if (src.validation_per_class > src.train_per_class)
        throw DataError("validation rows are carved from the training rows and cannot exceed them");
    const int train_only = src.train_per_class - src.validation_per_class;

    auto relabel = [&](LabeledTable& t) {
        std::vector<int> keep;
        for (int i = 0; i < static_cast<int>(t.labels.size()); ++i)
            if (t.labels[i] >= 0 && t.labels[i] < 10 && remap[t.labels[i]] >= 0) keep.push_back(i);
        t = select_rows(t, keep);
        for (auto& y : t.labels) y = remap[y];
        t.class_names.clear();
        for (int digit : src.digits) t.class_names.push_back(std::to_string(digit));
    };

    if (src.variant == DigitsVariant::Digits8x8) {
        LabeledTable t = read_labeled_csv(src.csv);
        if (t.features.cols() != 64)
            throw DataError(src.csv.string() + ": 8x8 digits need 64 pixel columns, found " +
                            std::to_string(t.features.cols()));
        relabel(t);
        t.features /= 16.0;
        // Drop rows beyond the requested test count before splitting.
        std::vector<int> counts(static_cast<std::size_t>(K), 0);
        for (int y : t.labels) ++counts[y];
        std::vector<int> test(static_cast<std::size_t>(K));
        for (int k = 0; k < K; ++k) test[k] = src.test_per_class < 0 ? -1 : src.test_per_class;
        if (src.test_per_class >= 0) {
            auto rng = make_rng(seed, 0xd1);
            std::vector<int> keep;
            std::vector<std::vector<int>> by_class(static_cast<std::size_t>(K));
            for (int i = 0; i < static_cast<int>(t.labels.size()); ++i) by_class[t.labels[i]].push_back(i);
            for (auto& rows : by_class) {
                std::shuffle(rows.begin(), rows.end(), rng);
                const int want = std::min<int>(static_cast<int>(rows.size()), src.train_per_class + src.test_per_class);
                keep.insert(keep.end(), rows.begin(), rows.begin() + want);
            }
            std::sort(keep.begin(), keep.end());
            t = select_rows(t, keep);
        }
        auto split = stratified_split(t.labels, K, per_class(K, train_only), per_class(K, src.validation_per_class),
                                      test, seed);
        return finish(std::move(t), std::move(split), seed);
    }

    // MNIST: training rows come from the training files, test rows from the test files.
    auto load_part = [&](const std::filesystem::path& images, const std::filesystem::path& labels) {
        const IdxImages img = read_idx_images(images);
        const auto lab = read_idx_labels(labels);
        if (static_cast<int>(lab.size()) != img.count) throw DataError("IDX image and label counts differ");
        LabeledTable t;
        const int px = img.rows * img.cols;
        t.features.resize(img.count, px);
        for (int i = 0; i < img.count; ++i)
            for (int p = 0; p < px; ++p) t.features(i, p) = img.pixels[static_cast<std::size_t>(i) * px + p] / 255.0;
        t.labels.assign(lab.begin(), lab.end());
        relabel(t);
        return t;
    };
    auto pick = [&](const LabeledTable& t, int per, std::uint64_t stream) {
        auto rng = make_rng(seed, stream);
        std::vector<std::vector<int>> by_class(static_cast<std::size_t>(K));
        for (int i = 0; i < static_cast<int>(t.labels.size()); ++i) by_class[t.labels[i]].push_back(i);
        std::vector<int> keep;
        for (int k = 0; k < K; ++k) {
            auto& rows = by_class[k];
            const int want = per < 0 ? static_cast<int>(rows.size()) : per;
            if (want > static_cast<int>(rows.size()))
                throw DataError("digit " + std::to_string(src.digits[k]) + " has only " + std::to_string(rows.size()) +
                                " rows, " + std::to_string(want) + " requested");
            std::shuffle(rows.begin(), rows.end(), rng);
            keep.insert(keep.end(), rows.begin(), rows.begin() + want);
        }
        std::sort(keep.begin(), keep.end());
        return select_rows(t, keep);
    };
    LabeledTable train = pick(load_part(src.train_images, src.train_labels), src.train_per_class, 0x7a);
    LabeledTable test = pick(load_part(src.test_images, src.test_labels), src.test_per_class, 0x7e);

    auto train_split = stratified_split(train.labels, K, per_class(K, train_only), per_class(K, src.validation_per_class),
                                        per_class(K, 0), seed);
    LabeledTable all;
    all.class_names = train.class_names;
    all.features.resize(train.features.rows() + test.features.rows(), train.features.cols());
    all.features << train.features, test.features;
    all.labels = train.labels;
    all.labels.insert(all.labels.end(), test.labels.begin(), test.labels.end());
    train_split.resize(all.labels.size(), Split::Test);
    return finish(std::move(all), std::move(train_split), seed);
}

Standardizer Standardizer::fit(const Eigen::MatrixXd& train) {
    if (train.rows() == 0) throw DataError("cannot standardize an empty training split");
    Standardizer s;
    s.mean = train.colwise().mean();
    const Eigen::MatrixXd centered = train.rowwise() - s.mean;
    s.scale = (centered.array().square().colwise().sum() / static_cast<double>(train.rows())).sqrt().matrix();
    for (Eigen::Index c = 0; c < s.scale.size(); ++c)
        if (!(s.scale[c] > 1e-12)) s.scale[c] = 1.0;
    return s;
}

Eigen::MatrixXd Standardizer::apply(const Eigen::MatrixXd& x) const {
    if (x.cols() != mean.size()) throw DataError("standardizer fitted on a different number of columns");
    return ((x.rowwise() - mean).array().rowwise() / scale.array()).matrix();
}

PCAModel fit_pca(const Eigen::MatrixXd& train, int target_dim) {
    const auto n = train.rows(), dx = train.cols();
    if (target_dim < 1 || target_dim > std::min<Eigen::Index>(n, dx))
        throw DataError("PCA target dimension " + std::to_string(target_dim) + " exceeds min(N_train, D_x) = " +
                        std::to_string(std::min<Eigen::Index>(n, dx)));
    if (n < 2) throw DataError("PCA needs at least two training rows");
    PCAModel m;
    m.mean = train.colwise().mean();
    const Eigen::MatrixXd centered = train.rowwise() - m.mean;
    const Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(n - 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    if (eig.info() != Eigen::Success) throw DataError("covariance eigendecomposition failed");
    // Eigen returns ascending eigenvalues.
    m.components.resize(target_dim, dx);
    m.explained_variance.resize(target_dim);
    for (int i = 0; i < target_dim; ++i) {
        const Eigen::Index src = dx - 1 - i;
        Eigen::VectorXd v = eig.eigenvectors().col(src);
        Eigen::Index at = 0;
        v.cwiseAbs().maxCoeff(&at);
        if (v[at] < 0) v = -v;  // deterministic sign
        m.components.row(i) = v.transpose();
        m.explained_variance[i] = std::max(eig.eigenvalues()[src], 0.0);
    }
    m.total_variance = std::max(eig.eigenvalues().sum(), 0.0);
    return m;
}

Eigen::MatrixXd apply_pca(const PCAModel& model, const Eigen::MatrixXd& x) {
    if (x.cols() != model.mean.size()) throw DataError("PCA fitted on a different number of columns");
    return (x.rowwise() - model.mean) * model.components.transpose();
}

PreparedSplits prepare(const Dataset& data, std::optional<int> pca_dim) {
    data.check();
    PreparedSplits out;
    out.train = data.subset(Split::Train);
    out.validation = data.subset(Split::Validation);
    out.test = data.subset(Split::Test);
    if (out.train.empty()) throw DataError("dataset has an empty training split");
    if (pca_dim) {
        out.pca = fit_pca(out.train.x, *pca_dim);
        out.train.x = apply_pca(*out.pca, out.train.x);
        out.validation.x = apply_pca(*out.pca, out.validation.x);
        out.test.x = apply_pca(*out.pca, out.test.x);
    }
    out.standardizer = Standardizer::fit(out.train.x);
    out.train.x = out.standardizer.apply(out.train.x);
    out.validation.x = out.standardizer.apply(out.validation.x);
    out.test.x = out.standardizer.apply(out.test.x);
    return out;
}

}  // namespace qudit
