#pragma once

#include <filesystem>
#include <random>

#include "qudit/state.hpp"

namespace testutil {

inline std::filesystem::path data_dir() { return QUDIT_TEST_DATA_DIR; }

inline qudit::PureState random_state(int dim, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    qudit::CVector v(dim);
    for (int i = 0; i < dim; ++i) v[i] = qudit::cplx(g(rng), g(rng));
    return qudit::PureState::normalized(v);
}

inline qudit::CMatrix projector(const qudit::PureState& s) { return s.amplitudes() * s.amplitudes().adjoint(); }

// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("qudit_test_" + name);
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

}  // namespace testutil
