#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "zdpipe/dataset.hpp"

namespace zdpipe {

enum class InjectMode { Shuffled, Append };

std::string to_string(InjectMode m);
InjectMode inject_mode_from_string(const std::string& s);

/// A reproducible train/test assignment with the zero-day categories
/// confined to the test side. test_indices is ordered: in shuffled mode it
/// is a seeded uniform permutation of held-out plus zero-day rows, in append
/// mode the zero-day rows trail the held-out rows unpermuted.
struct SplitPlan {
    std::vector<std::size_t> train_indices;
    std::vector<std::size_t> test_indices;
    std::set<std::string> zero_day_categories;
    double train_fraction = 0.7;
    std::uint64_t seed = 0;
    InjectMode inject_mode = InjectMode::Shuffled;

    std::string to_json_string() const;
    static SplitPlan from_json_string(const std::string& text);
};

/// The n rarest attack categories (never "Normal"); count ties break
/// lexicographically.
std::set<std::string> select_zero_day_categories(const std::vector<CategoryCount>& counts, int n);

/// Route every zero-day row to test, then split the remaining rows
/// train_fraction/(1 - train_fraction) stratified by the binary label.
SplitPlan make_split(const Dataset& d, double train_fraction,
                     const std::set<std::string>& zero_day_categories,
                     std::uint64_t seed, InjectMode inject_mode);

/// Row-exact extraction in plan order.
std::pair<Dataset, Dataset> materialize(const Dataset& d, const SplitPlan& p);

}  // namespace zdpipe
