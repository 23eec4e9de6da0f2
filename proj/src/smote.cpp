#include "zdpipe/smote.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

#include "zdpipe/rng.hpp"

namespace zdpipe {

std::string SmoteSummary::to_json_string() const {
    nlohmann::ordered_json j;
    j["zeros_before"] = zeros_before;
    j["ones_before"] = ones_before;
    j["zeros_after"] = zeros_after;
    j["ones_after"] = ones_after;
    j["k"] = k;
    j["seed"] = seed;
    return j.dump(2);
}

std::vector<std::vector<std::size_t>> knn_minority(const Matrix& X_min, int k) {
    const auto n = static_cast<std::size_t>(X_min.rows());
    if (n < 2) throw std::invalid_argument("knn_minority needs at least two rows");
    if (k < 1) throw std::invalid_argument("k_neighbors must be positive");
    if (static_cast<std::size_t>(k) >= n) {
        std::cerr << "warning: k_neighbors " << k << " >= minority count " << n
                  << "; clamping to " << n - 1 << "\n";
        k = static_cast<int>(n) - 1;
    }
    const auto ku = static_cast<std::size_t>(k);

    std::vector<std::vector<std::size_t>> neighbors(n);
    const Vector sq_norms = X_min.rowwise().squaredNorm();

    auto work = [&](std::size_t begin, std::size_t end) {
        std::vector<std::pair<double, std::size_t>> dist(n);
        for (std::size_t i = begin; i < end; ++i) {
            // Squared distances via the norm expansion; one GEMV per row.
            const Vector dots = X_min * X_min.row(static_cast<Eigen::Index>(i)).transpose();
            for (std::size_t j = 0; j < n; ++j) {
                const double d2 = std::max(
                    0.0, sq_norms[static_cast<Eigen::Index>(j)] + sq_norms[static_cast<Eigen::Index>(i)] -
                             2.0 * dots[static_cast<Eigen::Index>(j)]);
                dist[j] = {d2, j};
            }
            dist[i] = {std::numeric_limits<double>::infinity(), i};  // exclude self
            std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(ku), dist.end(),
                              [](const auto& a, const auto& b) {
                                  if (a.first != b.first) return a.first < b.first;
                                  return a.second < b.second;
                              });
            neighbors[i].reserve(ku);
            for (std::size_t j = 0; j < ku; ++j) neighbors[i].push_back(dist[j].second);
        }
    };

    const std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
    const std::size_t n_threads = std::min<std::size_t>(hw, std::max<std::size_t>(1, n / 256));
    if (n_threads <= 1) {
        work(0, n);
    } else {
        std::vector<std::thread> pool;
        const std::size_t chunk = (n + n_threads - 1) / n_threads;
        for (std::size_t t = 0; t < n_threads; ++t) {
            const std::size_t b = t * chunk;
            const std::size_t e = std::min(n, b + chunk);
            if (b < e) pool.emplace_back(work, b, e);
        }
        for (auto& th : pool) th.join();
    }
    return neighbors;
}

SmoteResult smote_resample(const Matrix& X, const std::vector<int>& y, const SmoteConfig& cfg) {
    if (static_cast<std::size_t>(X.rows()) != y.size()) {
        throw std::invalid_argument("smote_resample: row count mismatch");
    }
    if (!(cfg.target_ratio > 0.0 && cfg.target_ratio <= 1.0)) {
        throw std::invalid_argument("smote target ratio must be in (0, 1]");
    }
    std::vector<std::size_t> minority;
    std::int64_t zeros = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (y[i] == 1) {
            minority.push_back(i);
        } else if (y[i] == 0) {
            ++zeros;
        } else {
            throw std::invalid_argument("smote_resample: labels must be 0/1");
        }
    }
    const auto ones = static_cast<std::int64_t>(minority.size());
    if (ones == 0 || zeros == 0) {
        throw std::invalid_argument("smote_resample needs both classes present");
    }

    SmoteSummary summary;
    summary.zeros_before = zeros;
    summary.ones_before = ones;
    summary.seed = cfg.seed;

    const auto target_ones = static_cast<std::int64_t>(
        std::llround(cfg.target_ratio * static_cast<double>(zeros)));
    const std::int64_t n_new = std::max<std::int64_t>(0, target_ones - ones);

    if (n_new == 0 || ones < 2) {
        if (n_new > 0) {
            std::cerr << "warning: single minority row; cannot synthesize neighbors\n";
        }
        summary.zeros_after = zeros;
        summary.ones_after = ones;
        summary.k = 0;
        return {X, y, summary};
    }

    const int k = std::min<int>(cfg.k_neighbors, static_cast<int>(ones) - 1);
    summary.k = k;

    Matrix X_min = take_rows(X, minority);
    const auto neighbors = knn_minority(X_min, k);

    Rng rng(derive_seed(cfg.seed, stage::kSmote));
    std::vector<std::size_t> base_order(minority.size());
    std::iota(base_order.begin(), base_order.end(), std::size_t{0});
    rng.shuffle(base_order);

    SmoteResult out;
    out.X.resize(X.rows() + static_cast<Eigen::Index>(n_new), X.cols());
    out.X.topRows(X.rows()) = X;
    out.y = y;
    out.y.reserve(y.size() + static_cast<std::size_t>(n_new));

    for (std::int64_t s = 0; s < n_new; ++s) {
        const std::size_t base = base_order[static_cast<std::size_t>(s) % base_order.size()];
        const auto& nbrs = neighbors[base];
        const std::size_t nbr = nbrs[rng.next_below(nbrs.size())];
        const double u = rng.next_double();  // [0, 1): never lands exactly on the neighbor
        out.X.row(X.rows() + static_cast<Eigen::Index>(s)) =
            X_min.row(static_cast<Eigen::Index>(base)) +
            u * (X_min.row(static_cast<Eigen::Index>(nbr)) - X_min.row(static_cast<Eigen::Index>(base)));
        out.y.push_back(1);
    }

    summary.zeros_after = zeros;
    summary.ones_after = ones + n_new;
    out.summary = summary;
    return out;
}

}  // namespace zdpipe
