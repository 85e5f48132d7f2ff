#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "qudit/data.hpp"
#include "qudit/train.hpp"

namespace qudit {

/// Contents of a MOS file.
struct MosFile {
    int dim = 0;
    int count = 0;
    double exponent = 2.0;
    std::vector<PureState> states;
};

/// Plain text: "d <n>", "K <n>", "exponent <p>", then d lines "re im" per state.
/// Lines starting with '#' are comments.
void write_mos_file(const std::filesystem::path& path, const MosFile& mos);
MosFile read_mos_file(const std::filesystem::path& path);

/// Trained classifier together with the preprocessing fitted on its training split.
struct SavedModel {
    Model model;
    Standardizer standardizer;
    std::optional<PCAModel> pca;
    std::string dataset;
};

void save_model(const std::filesystem::path& path, const SavedModel& m);
SavedModel load_model(const std::filesystem::path& path);

}  // namespace qudit
