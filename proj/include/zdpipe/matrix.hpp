#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

namespace zdpipe {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Extract the given rows of m, in the order listed.
inline Matrix take_rows(const Matrix& m, const std::vector<std::size_t>& rows) {
    Matrix out(static_cast<Eigen::Index>(rows.size()), m.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out.row(static_cast<Eigen::Index>(i)) = m.row(static_cast<Eigen::Index>(rows[i]));
    }
    return out;
}

/// Extract the given columns of m, in the order listed.
inline Matrix take_cols(const Matrix& m, const std::vector<std::size_t>& cols) {
    Matrix out(m.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j) {
        out.col(static_cast<Eigen::Index>(j)) = m.col(static_cast<Eigen::Index>(cols[j]));
    }
    return out;
}

template <typename T>
std::vector<T> take(const std::vector<T>& v, const std::vector<std::size_t>& idx) {
    std::vector<T> out;
    out.reserve(idx.size());
    for (std::size_t i : idx) out.push_back(v[i]);
    return out;
}

}  // namespace zdpipe
