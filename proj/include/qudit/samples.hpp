#pragma once

#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace qudit {

/// Feature rows with integer class labels in [0, num_classes).
struct Samples {
    Eigen::MatrixXd x;
    std::vector<int> y;
    int num_classes = 0;

    int size() const { return static_cast<int>(y.size()); }
    int dim() const { return static_cast<int>(x.cols()); }
    bool empty() const { return y.empty(); }
    std::vector<int> class_counts() const {
        std::vector<int> counts(static_cast<std::size_t>(num_classes), 0);
        for (int label : y) {
            if (label < 0 || label >= num_classes) throw std::out_of_range("label outside class range");
            ++counts[static_cast<std::size_t>(label)];
        }
        return counts;
    }
};

}  // namespace qudit
