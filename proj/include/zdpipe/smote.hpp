#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "zdpipe/matrix.hpp"

namespace zdpipe {

struct SmoteConfig {
    int k_neighbors = 5;
    // target_ratio = minority/majority after resampling; 1.0 equalizes.
    double target_ratio = 1.0;
    std::uint64_t seed = 0;
};

struct SmoteSummary {
    std::int64_t zeros_before = 0;
    std::int64_t ones_before = 0;
    std::int64_t zeros_after = 0;
    std::int64_t ones_after = 0;
    int k = 0;  // k actually used (clamped when minority is tiny)
    std::uint64_t seed = 0;

    std::string to_json_string() const;
};

struct SmoteResult {
    Matrix X;
    std::vector<int> y;
    SmoteSummary summary;
};

/// For each minority row, the indices of its k nearest minority rows by
/// Euclidean distance, excluding itself; ties break toward the lower index.
/// k >= n_min clamps to n_min - 1 with a warning.
std::vector<std::vector<std::size_t>> knn_minority(const Matrix& X_min, int k);

/// Classic SMOTE on the label-1 class: synthetic rows interpolate between a
/// minority row and one of its k nearest minority neighbors with
/// u ~ Uniform[0,1). Base rows are cycled round-robin in seeded shuffled
/// order until the target count is met. Original rows are preserved
/// verbatim, first, in input order.
SmoteResult smote_resample(const Matrix& X, const std::vector<int>& y, const SmoteConfig& cfg);

}  // namespace zdpipe
