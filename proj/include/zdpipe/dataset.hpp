#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "zdpipe/matrix.hpp"

namespace zdpipe {

/// Canonical category names for NetFlow records: "Normal" plus the nine
/// attack families. Cleaning folds spelling variants onto these; categories
/// outside the set (e.g. synthetic ones) pass through trimmed but otherwise
/// untouched.
const std::vector<std::string>& canonical_categories();

/// The attack-type proportions of the half-corpus, as (category, record
/// count) pairs. Used by the synthetic generator's default mix and by the
/// CLI's --mix-halfset option.
const std::vector<std::pair<std::string, std::int64_t>>& halfset_attack_mix();

/// A column whose cells did not parse as decimal numbers at load time.
/// Distinct raw texts are kept in first-seen order; each affected cell
/// refers to one of them. clean() resolves these and drops the record.
struct UnparsedColumn {
    std::size_t col = 0;
    std::vector<std::string> values;  // distinct texts, first-seen order
    std::vector<std::pair<std::size_t, std::uint32_t>> cells;  // (row, value index)
};

/// Immutable after construction; columns all share the same length.
/// label[i] == 0 corresponds to attack_cat[i] == "Normal" once cleaned.
struct Dataset {
    Matrix features;  // n_rows x n_features, 64-bit reals
    std::vector<std::string> feature_names;
    std::vector<int> label;               // 0 = normal, 1 = attack
    std::vector<std::string> attack_cat;  // per-row category name

    // Only present between load_csv and clean.
    std::vector<UnparsedColumn> unparsed;

    std::size_t n_rows() const { return label.size(); }
    std::size_t n_features() const { return feature_names.size(); }

    /// Row-subset copy, rows taken in the order given.
    Dataset select_rows(const std::vector<std::size_t>& rows) const;
    /// Column-subset copy (feature columns only), in the order given.
    Dataset select_features(const std::vector<std::size_t>& cols) const;
};

struct CategoryCount {
    std::string category;
    std::int64_t count = 0;
    double percentage = 0.0;  // of all rows, in [0, 100]
};

struct CleaningSummary {
    std::size_t rows_in = 0;
    std::size_t rows_out = 0;
    std::size_t dropped_rows = 0;
    std::size_t null_categories_fixed = 0;
    // feature name -> (raw text -> integer code), for columns that were
    // integer-encoded by first-seen order.
    std::map<std::string, std::vector<std::pair<std::string, int>>> encodings;

    std::string to_json_string() const;
};

struct SynthConfig {
    std::size_t n_rows = 50000;
    std::size_t n_features = 16;
    double attack_fraction = 0.0536;
    // Fractions of the attack rows per category; must sum to 1. Order is
    // meaningful (deterministic remainder allocation).
    std::vector<std::pair<std::string, double>> category_mix;
    double class_separation = 4.0;  // distance between class cluster centers
    double noise_std = 1.0;
    std::uint64_t seed = 0;
};

/// Returns the half-corpus attack mix as fractions, in descending-count order.
std::vector<std::pair<std::string, double>> halfset_category_mix();

/// Load an RFC-4180 CSV file. With a header, the label column is "Label" or
/// "label" and the category column "attack_cat" (both case-insensitive);
/// headerless files take the last two columns as (attack_cat, Label) and
/// feature names from `feature_names` or generated placeholders.
///
/// Feature cells that do not parse as decimal numbers become NaN sentinels,
/// with the raw text retained for clean() to resolve.
Dataset load_csv(const std::string& path, bool has_header,
                 const std::optional<std::vector<std::string>>& feature_names = std::nullopt);

/// Resolve a freshly loaded dataset into the cleaned form:
///  - empty attack_cat on label-0 rows becomes "Normal";
///  - category spellings are trimmed and folded to canonical names
///    ("Backdoors" -> "Backdoor");
///  - columns that are mostly text are integer-encoded by first-seen order;
///  - stray hex cells ("0x20") in numeric columns are coerced;
///  - rows that still fail to parse are dropped and counted.
/// A label-1 row with an empty category is a hard error (we cannot invent an
/// attack type), as is a label/category contradiction.
std::pair<Dataset, CleaningSummary> clean(const Dataset& raw);

/// Per-category record counts, sorted by descending count (ties by name).
/// Percentages are over all rows and sum to 100.
std::vector<CategoryCount> category_counts(const Dataset& d);

enum class Stratify { Category, Label, None };

/// Seeded subsample keeping `fraction` of the rows. With stratification the
/// per-stratum share is preserved within one row; a stratum that would round
/// to zero rows keeps one (with a warning on stderr). Output rows keep the
/// original dataset order.
Dataset subsample(const Dataset& d, double fraction, std::uint64_t seed,
                  Stratify stratify_by = Stratify::Category);

/// Deterministic synthetic NetFlow-like dataset: one Gaussian cluster per
/// class with centers `class_separation` apart, plus a per-category offset
/// (proportional to the class separation) so rare categories are
/// geometrically distinct. Rows are emitted in seeded shuffled order.
Dataset synthesize(const SynthConfig& cfg);

}  // namespace zdpipe
