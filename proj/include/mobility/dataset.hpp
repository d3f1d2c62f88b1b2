#pragma once

#include <cstddef>
#include <vector>

#include "mobility/features.hpp"

namespace mobility {

/// Encoded trips with labels; 1 = member, 0 = casual.
struct LabeledDataset {
    std::vector<FeatureVector> x;
    std::vector<int> y;

    std::size_t size() const { return y.size(); }

    std::size_t count(int label) const {
        std::size_t n = 0;
        for (int v : y) n += (v == label);
        return n;
    }
};

} // namespace mobility
