#include "qudit/model_io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include "json.hpp"

namespace qudit {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kModelFormat = 1;

json state_json(const PureState& s) {
    json a = json::array();
    for (int i = 0; i < s.dim(); ++i) a.push_back({s[i].real(), s[i].imag()});
    return a;
}

PureState state_from(const json& a) {
    CVector v(static_cast<Eigen::Index>(a.size()));
    for (std::size_t i = 0; i < a.size(); ++i) v[static_cast<Eigen::Index>(i)] = cplx(a[i].at(0), a[i].at(1));
    return PureState::normalized(std::move(v));
}

json matrix_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(row);
    }
    return rows;
}

Eigen::MatrixXd matrix_from(const json& rows) {
    const auto R = static_cast<Eigen::Index>(rows.size());
    const auto C = R ? static_cast<Eigen::Index>(rows[0].size()) : 0;
    Eigen::MatrixXd m(R, C);
    for (Eigen::Index r = 0; r < R; ++r) {
        if (static_cast<Eigen::Index>(rows[r].size()) != C) throw DataError("ragged matrix in model file");
        for (Eigen::Index c = 0; c < C; ++c) m(r, c) = rows[r][c].get<double>();
    }
    return m;
}

json vector_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Eigen::VectorXd vector_from(const json& a) {
    const auto v = a.get<std::vector<double>>();
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

json cmatrix_json(const CMatrix& m) { return {{"re", matrix_json(m.real())}, {"im", matrix_json(m.imag())}}; }

CMatrix cmatrix_from(const json& j) {
    const Eigen::MatrixXd re = matrix_from(j.at("re")), im = matrix_from(j.at("im"));
    CMatrix m(re.rows(), re.cols());
    m.real() = re;
    m.imag() = im;
    return m;
}

}  // namespace

void write_mos_file(const fs::path& path, const MosFile& mos) {
    if (mos.states.empty()) throw std::invalid_argument("no states to write");
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    out << "# maximally orthogonal states\n";
    out << "d " << mos.states.front().dim() << "\n";
    out << "K " << mos.states.size() << "\n";
    out << "exponent " << std::setprecision(17) << mos.exponent << "\n";
    for (std::size_t k = 0; k < mos.states.size(); ++k) {
        out << "# state " << k << "\n";
        for (int i = 0; i < mos.states[k].dim(); ++i)
            out << std::setprecision(17) << mos.states[k][i].real() << " " << mos.states[k][i].imag() << "\n";
    }
    if (!out) throw DataError("failed writing " + path.string());
}

MosFile read_mos_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open MOS file " + path.string());
    MosFile mos;
    std::vector<cplx> amps;
    std::string line;
    int lineno = 0;
    const auto fail = [&](const std::string& what) {
        throw DataError(path.string() + ":" + std::to_string(lineno) + ": " + what);
    };
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream is(line);
        std::string head;
        is >> head;
        if (head == "d" || head == "K" || head == "exponent") {
            double v;
            if (!(is >> v)) fail("missing value for " + head);
            if (head == "d") mos.dim = static_cast<int>(v);
            else if (head == "K") mos.count = static_cast<int>(v);
            else mos.exponent = v;
            continue;
        }
        std::istringstream nums(line);
        double re, im;
        if (!(nums >> re >> im)) fail("expected a 're im' amplitude pair");
        std::string rest;
        if (nums >> rest) fail("trailing text after amplitude pair");
        amps.emplace_back(re, im);
    }
    if (mos.dim < 2 || mos.count < 1) throw DataError(path.string() + ": missing or invalid d/K header");
    if (amps.size() != static_cast<std::size_t>(mos.dim) * mos.count)
        throw DataError(path.string() + ": expected " + std::to_string(mos.dim * mos.count) + " amplitudes, found " +
                        std::to_string(amps.size()));
    for (int k = 0; k < mos.count; ++k) {
        CVector v(mos.dim);
        for (int i = 0; i < mos.dim; ++i) v[i] = amps[static_cast<std::size_t>(k * mos.dim + i)];
        const double n2 = v.squaredNorm();
        if (std::abs(n2 - 1.0) > 1e-6) throw DataError(path.string() + ": state " + std::to_string(k) + " is not normalized");
        mos.states.push_back(PureState::normalized(std::move(v)));
    }
    return mos;
}

void save_model(const fs::path& path, const SavedModel& m) {
    const auto& p = m.model.problem;
    json j;
    j["format"] = kModelFormat;
    j["dataset"] = m.dataset;
    j["encoding"] = {{"variant", to_string(p.spec.variant)},
                     {"d", p.spec.dim},
                     {"data_dim", p.spec.data_dim},
                     {"layers", p.spec.layers},
                     {"transitions", p.spec.transitions}};
    j["method"] = to_string(p.method);
    j["seed"] = m.model.seed;
    if (p.refs) {
        json c = json::array();
        for (const auto& s : p.refs->centers) c.push_back(state_json(s));
        j["centers"] = c;
    }
    if (p.basis) {
        json b = json::array();
        for (const auto& s : p.basis->states) b.push_back(state_json(s));
        j["virtual_basis"] = b;
    }
    j["parameters"] = m.model.params.flatten();
    json dens = json::array();
    for (const auto& rho : m.model.class_densities) dens.push_back(cmatrix_json(rho));
    j["class_densities"] = dens;
    j["standardizer"] = {{"mean", vector_json(m.standardizer.mean.transpose())},
                         {"scale", vector_json(m.standardizer.scale.transpose())}};
    if (m.pca) {
        j["pca"] = {{"mean", vector_json(m.pca->mean.transpose())},
                    {"components", matrix_json(m.pca->components)},
                    {"explained_variance", vector_json(m.pca->explained_variance)},
                    {"total_variance", m.pca->total_variance}};
    }
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    out << std::setw(2) << j << "\n";
}

SavedModel load_model(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open model file " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw DataError(path.string() + ": " + e.what());
    }
    try {
        if (j.at("format").get<int>() != kModelFormat)
            throw DataError(path.string() + ": unsupported model format " + j.at("format").dump());
        SavedModel m;
        m.dataset = j.value("dataset", "");
        auto& p = m.model.problem;
        const auto& e = j.at("encoding");
        p.spec.variant = parse_encoding(e.at("variant").get<std::string>());
        p.spec.dim = e.at("d");
        p.spec.data_dim = e.at("data_dim");
        p.spec.layers = e.at("layers");
        p.spec.transitions = e.at("transitions");
        p.method = parse_method(j.at("method").get<std::string>());
        m.model.seed = j.value("seed", std::uint64_t{0});
        if (j.contains("centers")) {
            ReferenceSet r;
            for (const auto& s : j["centers"]) r.centers.push_back(state_from(s));
            p.refs = r;
        }
        if (j.contains("virtual_basis")) {
            VirtualBasis b;
            for (const auto& s : j["virtual_basis"]) b.states.push_back(state_from(s));
            p.basis = b;
        }
        const auto flat = j.at("parameters").get<std::vector<double>>();
        m.model.params = AnsatzParams::from_flat(p.spec, flat);
        for (const auto& d : j.at("class_densities")) m.model.class_densities.push_back(cmatrix_from(d));
        m.standardizer.mean = vector_from(j.at("standardizer").at("mean")).transpose();
        m.standardizer.scale = vector_from(j.at("standardizer").at("scale")).transpose();
        if (j.contains("pca")) {
            PCAModel pca;
            pca.mean = vector_from(j["pca"].at("mean")).transpose();
            pca.components = matrix_from(j["pca"].at("components"));
            pca.explained_variance = vector_from(j["pca"].at("explained_variance"));
            pca.total_variance = j["pca"].at("total_variance");
            m.pca = pca;
        }
        p.spec.validate();
        return m;
    } catch (const json::exception& e) {
        throw DataError(path.string() + ": " + e.what());
    } catch (const std::invalid_argument& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

}  // namespace qudit
