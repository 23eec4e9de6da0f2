#pragma once

#include <string>
#include <vector>

#include "zdpipe/dataset.hpp"
#include "zdpipe/matrix.hpp"

namespace zdpipe {

/// Column standardizer fitted on the training partition only.
struct Scaler {
    Vector means;
    Vector stds;  // sample std, denominator n-1; strictly positive

    std::string to_json_string() const;
    static Scaler from_json_string(const std::string& text);
};

/// Indices of columns whose sample variance is nonzero. Zero-variance
/// columns must be removed before fit_scaler.
std::vector<std::size_t> nonzero_variance_columns(const Matrix& X);

Scaler fit_scaler(const Matrix& X);
Matrix apply_scaler(const Scaler& s, const Matrix& X);

struct CorrelationEntry {
    std::string feature;
    double r = 0.0;  // Pearson correlation with the binary label
};

/// Per-feature label correlations sorted by |r| descending. Zero-variance
/// columns get r = 0 and are listed in zero_variance_features.
struct CorrelationRanking {
    std::vector<CorrelationEntry> entries;
    std::vector<std::string> zero_variance_features;
};

CorrelationRanking correlation_rank(const Matrix& X, const std::vector<int>& y,
                                    const std::vector<std::string>& feature_names);

/// Column indices (ascending) whose |r| clears the threshold; never empty
/// (the single best-ranked feature is kept as a floor).
std::vector<std::size_t> select_features_by_correlation(const CorrelationRanking& ranking,
                                                        double min_abs_r,
                                                        const std::vector<std::string>& feature_names);

Dataset prune_features(const Dataset& d, const CorrelationRanking& ranking, double min_abs_r);

/// Full pairwise Pearson correlation of the feature columns plus the label,
/// emitted for external heat-map plotting. Row/column order is feature order
/// with "Label" appended.
Matrix correlation_matrix(const Matrix& X, const std::vector<int>& y);

struct PcaModel {
    Matrix components;  // n_components x n_features, rows orthonormal
    Vector explained_variance_ratio;  // all components, non-increasing, sums to 1
    Vector eigenvalues;               // all components, descending
    int n_components = 0;
    double variance_threshold = 0.95;

    std::string to_json_string() const;
    static PcaModel from_json_string(const std::string& text);
};

/// PCA via eigendecomposition of the sample covariance. Components are
/// sorted by descending eigenvalue with each one's largest-magnitude
/// coefficient made positive; n_components is the smallest k whose
/// cumulative explained variance exceeds the threshold.
PcaModel fit_pca(const Matrix& X_standardized, double variance_threshold);

/// Projection onto the selected components: X * components^T.
Matrix pca_transform(const PcaModel& m, const Matrix& X);

/// Back-projection from component space: Y * components.
Matrix pca_inverse_transform(const PcaModel& m, const Matrix& Y);

}  // namespace zdpipe
