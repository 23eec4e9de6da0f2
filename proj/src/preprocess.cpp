#include "zdpipe/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <nlohmann/json.hpp>

namespace zdpipe {

namespace {

nlohmann::json matrix_to_json(const Matrix& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from_json(const nlohmann::json& j) {
    const auto r = static_cast<Eigen::Index>(j.size());
    if (r == 0) return Matrix(0, 0);
    const auto c = static_cast<Eigen::Index>(j.at(0).size());
    Matrix m(r, c);
    for (Eigen::Index i = 0; i < r; ++i) {
        for (Eigen::Index k = 0; k < c; ++k) {
            m(i, k) = j.at(static_cast<std::size_t>(i)).at(static_cast<std::size_t>(k)).get<double>();
        }
    }
    return m;
}

nlohmann::json vector_to_json(const Vector& v) {
    nlohmann::json out = nlohmann::json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
    return out;
}

Vector vector_from_json(const nlohmann::json& j) {
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = j.at(static_cast<std::size_t>(i)).get<double>();
    return v;
}

}  // namespace

std::vector<std::size_t> nonzero_variance_columns(const Matrix& X) {
    std::vector<std::size_t> keep;
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
        const double mean = X.col(j).mean();
        const double ss = (X.col(j).array() - mean).square().sum();
        if (ss > 0.0) keep.push_back(static_cast<std::size_t>(j));
    }
    return keep;
}

Scaler fit_scaler(const Matrix& X) {
    if (X.rows() < 2) throw std::invalid_argument("fit_scaler needs at least two rows");
    Scaler s;
    s.means.resize(X.cols());
    s.stds.resize(X.cols());
    const double n = static_cast<double>(X.rows());
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
        const double mean = X.col(j).mean();
        const double var = (X.col(j).array() - mean).square().sum() / (n - 1.0);
        if (!(var > 0.0)) {
            throw std::invalid_argument("zero-variance column " + std::to_string(j) +
                                        " passed to fit_scaler; prune it first");
        }
        s.means[j] = mean;
        s.stds[j] = std::sqrt(var);
    }
    return s;
}

Matrix apply_scaler(const Scaler& s, const Matrix& X) {
    if (X.cols() != s.means.size()) {
        throw std::invalid_argument("apply_scaler: matrix has " + std::to_string(X.cols()) +
                                    " columns, scaler expects " + std::to_string(s.means.size()));
    }
    return (X.rowwise() - s.means.transpose()).array().rowwise() / s.stds.transpose().array();
}

std::string Scaler::to_json_string() const {
    nlohmann::ordered_json j;
    j["schema_version"] = 1;
    j["means"] = vector_to_json(means);
    j["stds"] = vector_to_json(stds);
    return j.dump(2);
}

Scaler Scaler::from_json_string(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    Scaler s;
    s.means = vector_from_json(j.at("means"));
    s.stds = vector_from_json(j.at("stds"));
    return s;
}

CorrelationRanking correlation_rank(const Matrix& X, const std::vector<int>& y,
                                    const std::vector<std::string>& feature_names) {
    if (static_cast<std::size_t>(X.rows()) != y.size()) {
        throw std::invalid_argument("correlation_rank: row count mismatch");
    }
    if (feature_names.size() != static_cast<std::size_t>(X.cols())) {
        throw std::invalid_argument("correlation_rank: feature name count mismatch");
    }
    const double n = static_cast<double>(y.size());
    double y_mean = 0.0;
    for (int v : y) {
        if (v != 0 && v != 1) throw std::invalid_argument("correlation_rank: labels must be 0/1");
        y_mean += v;
    }
    y_mean /= n;
    if (y_mean == 0.0 || y_mean == 1.0) {
        throw std::invalid_argument("correlation_rank: both classes must be present");
    }

    Vector yc(static_cast<Eigen::Index>(y.size()));
    for (std::size_t i = 0; i < y.size(); ++i) yc[static_cast<Eigen::Index>(i)] = y[i] - y_mean;
    const double y_ss = yc.squaredNorm();

    CorrelationRanking out;
    out.entries.reserve(feature_names.size());
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
        const double x_mean = X.col(j).mean();
        const Eigen::ArrayXd xc = X.col(j).array() - x_mean;
        const double x_ss = xc.square().sum();
        double r = 0.0;
        if (x_ss > 0.0) {
            r = (xc * yc.array()).sum() / std::sqrt(x_ss * y_ss);
        } else {
            std::cerr << "warning: zero-variance feature '"
                      << feature_names[static_cast<std::size_t>(j)]
                      << "' gets correlation 0\n";
            out.zero_variance_features.push_back(feature_names[static_cast<std::size_t>(j)]);
        }
        out.entries.push_back({feature_names[static_cast<std::size_t>(j)], r});
    }
    std::stable_sort(out.entries.begin(), out.entries.end(),
                     [](const CorrelationEntry& a, const CorrelationEntry& b) {
                         return std::abs(a.r) > std::abs(b.r);
                     });
    return out;
}

std::vector<std::size_t> select_features_by_correlation(const CorrelationRanking& ranking,
                                                        double min_abs_r,
                                                        const std::vector<std::string>& feature_names) {
    std::vector<std::size_t> keep;
    for (std::size_t j = 0; j < feature_names.size(); ++j) {
        for (const auto& e : ranking.entries) {
            if (e.feature == feature_names[j]) {
                if (std::abs(e.r) >= min_abs_r) keep.push_back(j);
                break;
            }
        }
    }
    if (keep.empty() && !ranking.entries.empty()) {
        // Floor rule: never prune to zero features.
        const std::string& best = ranking.entries.front().feature;
        for (std::size_t j = 0; j < feature_names.size(); ++j) {
            if (feature_names[j] == best) {
                keep.push_back(j);
                break;
            }
        }
    }
    return keep;
}

Dataset prune_features(const Dataset& d, const CorrelationRanking& ranking, double min_abs_r) {
    return d.select_features(select_features_by_correlation(ranking, min_abs_r, d.feature_names));
}

Matrix correlation_matrix(const Matrix& X, const std::vector<int>& y) {
    const Eigen::Index f = X.cols();
    Matrix aug(X.rows(), f + 1);
    aug.leftCols(f) = X;
    for (std::size_t i = 0; i < y.size(); ++i) aug(static_cast<Eigen::Index>(i), f) = y[i];

    Matrix centered = aug.rowwise() - aug.colwise().mean();
    Vector norms(f + 1);
    for (Eigen::Index j = 0; j <= f; ++j) norms[j] = centered.col(j).norm();
    Matrix corr = centered.transpose() * centered;
    for (Eigen::Index i = 0; i <= f; ++i) {
        for (Eigen::Index j = 0; j <= f; ++j) {
            const double d = norms[i] * norms[j];
            corr(i, j) = d > 0.0 ? corr(i, j) / d : (i == j ? 1.0 : 0.0);
        }
    }
    return corr;
}

PcaModel fit_pca(const Matrix& X, double variance_threshold) {
    if (!(variance_threshold > 0.0 && variance_threshold < 1.0)) {
        throw std::invalid_argument("PCA variance threshold must be in (0, 1)");
    }
    if (X.rows() < 2) throw std::invalid_argument("fit_pca needs at least two rows");
    if (X.rows() <= X.cols()) {
        std::cerr << "warning: fit_pca with n_rows <= n_features ("
                  << X.rows() << " x " << X.cols() << ")\n";
    }

    const Matrix centered = X.rowwise() - X.colwise().mean();
    const Matrix cov = centered.transpose() * centered / static_cast<double>(X.rows() - 1);

    Eigen::SelfAdjointEigenSolver<Matrix> solver(cov);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("PCA eigendecomposition failed to converge");
    }

    const Eigen::Index f = cov.cols();
    PcaModel m;
    m.variance_threshold = variance_threshold;
    m.eigenvalues.resize(f);
    Matrix all_components(f, f);
    // Eigen returns eigenvalues ascending; flip to descending.
    for (Eigen::Index i = 0; i < f; ++i) {
        m.eigenvalues[i] = std::max(0.0, solver.eigenvalues()[f - 1 - i]);
        Vector comp = solver.eigenvectors().col(f - 1 - i);
        // Sign convention: the largest-magnitude coefficient is positive.
        Eigen::Index arg_max = 0;
        comp.cwiseAbs().maxCoeff(&arg_max);
        if (comp[arg_max] < 0.0) comp = -comp;
        all_components.row(i) = comp.transpose();
    }

    const double total = m.eigenvalues.sum();
    if (!(total > 0.0)) throw std::runtime_error("PCA input has zero total variance");
    m.explained_variance_ratio = m.eigenvalues / total;

    double cum = 0.0;
    int k = 0;
    for (Eigen::Index i = 0; i < f; ++i) {
        cum += m.explained_variance_ratio[i];
        ++k;
        if (cum > variance_threshold) break;
    }
    m.n_components = k;
    m.components = all_components.topRows(k);
    return m;
}

Matrix pca_transform(const PcaModel& m, const Matrix& X) {
    if (X.cols() != m.components.cols()) {
        throw std::invalid_argument("pca_transform: matrix has " + std::to_string(X.cols()) +
                                    " columns, model expects " + std::to_string(m.components.cols()));
    }
    return X * m.components.transpose();
}

Matrix pca_inverse_transform(const PcaModel& m, const Matrix& Y) {
    if (Y.cols() != m.components.rows()) {
        throw std::invalid_argument("pca_inverse_transform: dimension mismatch");
    }
    return Y * m.components;
}

std::string PcaModel::to_json_string() const {
    nlohmann::ordered_json j;
    j["schema_version"] = 1;
    j["components"] = matrix_to_json(components);  // row-major nested arrays
    j["explained_variance_ratio"] = vector_to_json(explained_variance_ratio);
    j["eigenvalues"] = vector_to_json(eigenvalues);
    j["n_components"] = n_components;
    j["variance_threshold"] = variance_threshold;
    return j.dump(2);
}

PcaModel PcaModel::from_json_string(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    PcaModel m;
    m.components = matrix_from_json(j.at("components"));
    m.explained_variance_ratio = vector_from_json(j.at("explained_variance_ratio"));
    m.eigenvalues = vector_from_json(j.at("eigenvalues"));
    m.n_components = j.at("n_components").get<int>();
    m.variance_threshold = j.at("variance_threshold").get<double>();
    return m;
}

}  // namespace zdpipe
