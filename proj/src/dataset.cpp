#include "zdpipe/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "zdpipe/rng.hpp"

namespace zdpipe {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

bool parse_decimal(const std::string& s, double& out) {
    const char* b = s.data();
    const char* e = s.data() + s.size();
    auto [p, ec] = std::from_chars(b, e, out);
    return ec == std::errc() && p == e && std::isfinite(out);
}

bool parse_hex(const std::string& s, double& out) {
    std::string t = s;
    bool neg = false;
    if (!t.empty() && (t[0] == '+' || t[0] == '-')) {
        neg = t[0] == '-';
        t = t.substr(1);
    }
    if (t.size() < 3 || t[0] != '0' || (t[1] != 'x' && t[1] != 'X')) return false;
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(t.data() + 2, t.data() + t.size(), v, 16);
    if (ec != std::errc() || p != t.data() + t.size()) return false;
    out = neg ? -static_cast<double>(v) : static_cast<double>(v);
    return true;
}

/// RFC-4180 record reader: handles quoted fields, embedded commas/newlines,
/// and doubled quotes. Returns false at end of input.
bool read_record(std::istream& in, std::vector<std::string>& fields) {
    fields.clear();
    std::string field;
    bool in_quotes = false;
    bool any = false;
    int c;
    while ((c = in.get()) != EOF) {
        any = true;
        char ch = static_cast<char>(c);
        if (in_quotes) {
            if (ch == '"') {
                if (in.peek() == '"') {
                    in.get();
                    field.push_back('"');
                } else {
                    in_quotes = false;
                }
            } else {
                field.push_back(ch);
            }
        } else if (ch == '"') {
            in_quotes = true;
        } else if (ch == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else if (ch == '\n') {
            if (!field.empty() && field.back() == '\r') field.pop_back();
            fields.push_back(std::move(field));
            return true;
        } else {
            field.push_back(ch);
        }
    }
    if (!any) return false;
    if (!field.empty() && field.back() == '\r') field.pop_back();
    fields.push_back(std::move(field));
    return true;
}

std::string canonicalize_category(const std::string& raw) {
    const std::string t = trim(raw);
    if (t.empty()) return t;
    const std::string low = lower(t);
    if (low == "backdoors") return "Backdoor";
    for (const auto& c : canonical_categories()) {
        if (low == lower(c)) return c;
    }
    return t;
}

}  // namespace

const std::vector<std::string>& canonical_categories() {
    static const std::vector<std::string> cats = {
        "Normal",   "Generic",        "Exploits", "Fuzzers",   "DoS",
        "Reconnaissance", "Analysis", "Backdoor", "Shellcode", "Worms"};
    return cats;
}

const std::vector<std::pair<std::string, std::int64_t>>& halfset_attack_mix() {
    static const std::vector<std::pair<std::string, std::int64_t>> mix = {
        {"Generic", 35405}, {"Exploits", 16512}, {"Fuzzers", 9719},
        {"DoS", 5804},      {"Reconnaissance", 4875}, {"Analysis", 1134},
        {"Backdoor", 904},  {"Shellcode", 547},  {"Worms", 64}};
    return mix;
}

std::vector<std::pair<std::string, double>> halfset_category_mix() {
    const auto& mix = halfset_attack_mix();
    std::int64_t total = 0;
    for (const auto& [name, n] : mix) total += n;
    std::vector<std::pair<std::string, double>> out;
    out.reserve(mix.size());
    for (const auto& [name, n] : mix) {
        out.emplace_back(name, static_cast<double>(n) / static_cast<double>(total));
    }
    return out;
}

Dataset Dataset::select_rows(const std::vector<std::size_t>& rows) const {
    for (std::size_t r : rows) {
        if (r >= n_rows()) {
            throw std::out_of_range("row index " + std::to_string(r) +
                                    " out of range for dataset of " +
                                    std::to_string(n_rows()) + " rows");
        }
    }
    Dataset out;
    out.features = take_rows(features, rows);
    out.feature_names = feature_names;
    out.label = take(label, rows);
    out.attack_cat = take(attack_cat, rows);
    return out;
}

Dataset Dataset::select_features(const std::vector<std::size_t>& cols) const {
    Dataset out;
    out.features = take_cols(features, cols);
    out.feature_names = take(feature_names, cols);
    out.label = label;
    out.attack_cat = attack_cat;
    return out;
}

std::string CleaningSummary::to_json_string() const {
    nlohmann::ordered_json j;
    j["rows_in"] = rows_in;
    j["rows_out"] = rows_out;
    j["dropped_rows"] = dropped_rows;
    j["null_categories_fixed"] = null_categories_fixed;
    nlohmann::ordered_json enc = nlohmann::ordered_json::object();
    for (const auto& [feature, pairs] : encodings) {
        nlohmann::ordered_json m = nlohmann::ordered_json::object();
        for (const auto& [raw, code] : pairs) m[raw] = code;
        enc[feature] = m;
    }
    j["encodings"] = enc;
    return j.dump(2);
}

Dataset load_csv(const std::string& path, bool has_header,
                 const std::optional<std::vector<std::string>>& feature_names) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open CSV file: " + path);

    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> header;
    std::vector<std::string> record;

    std::size_t line_no = 0;
    std::size_t n_fields = 0;
    while (read_record(in, record)) {
        ++line_no;
        if (record.size() == 1 && record[0].empty()) continue;  // blank line
        if (line_no == 1 && has_header) {
            header = record;
            n_fields = header.size();
            continue;
        }
        if (n_fields == 0) n_fields = record.size();
        if (record.size() != n_fields) {
            throw std::runtime_error("ragged CSV row at line " + std::to_string(line_no) +
                                     ": expected " + std::to_string(n_fields) +
                                     " fields, got " + std::to_string(record.size()));
        }
        rows.push_back(record);
    }
    if (n_fields < 3) {
        throw std::runtime_error("CSV needs at least one feature column plus "
                                 "attack_cat and Label: " + path);
    }

    // Locate the label and category columns.
    std::size_t label_col, cat_col;
    if (has_header) {
        auto find_col = [&](const std::string& want) -> std::optional<std::size_t> {
            for (std::size_t i = 0; i < header.size(); ++i) {
                if (lower(trim(header[i])) == want) return i;
            }
            return std::nullopt;
        };
        auto lc = find_col("label");
        auto cc = find_col("attack_cat");
        if (!lc || !cc) {
            throw std::runtime_error("CSV header must contain 'Label' and 'attack_cat' columns");
        }
        label_col = *lc;
        cat_col = *cc;
    } else {
        // UNSW-NB15 convention: attack_cat then Label as the last two columns.
        label_col = n_fields - 1;
        cat_col = n_fields - 2;
    }

    std::vector<std::size_t> feature_cols;
    for (std::size_t i = 0; i < n_fields; ++i) {
        if (i != label_col && i != cat_col) feature_cols.push_back(i);
    }

    Dataset d;
    if (has_header) {
        for (std::size_t c : feature_cols) d.feature_names.push_back(trim(header[c]));
    } else if (feature_names) {
        if (feature_names->size() != feature_cols.size()) {
            throw std::runtime_error("feature name list has " +
                                     std::to_string(feature_names->size()) +
                                     " entries but the CSV has " +
                                     std::to_string(feature_cols.size()) + " feature columns");
        }
        d.feature_names = *feature_names;
    } else {
        for (std::size_t i = 0; i < feature_cols.size(); ++i) {
            d.feature_names.push_back("f" + std::to_string(i));
        }
    }

    const std::size_t n = rows.size();
    d.features.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(feature_cols.size()));
    d.label.resize(n);
    d.attack_cat.resize(n);

    std::unordered_map<std::size_t, std::size_t> unparsed_of_col;  // col -> index in d.unparsed
    std::vector<std::unordered_map<std::string, std::uint32_t>> dicts;

    for (std::size_t r = 0; r < n; ++r) {
        const auto& rec = rows[r];
        const std::string lab = trim(rec[label_col]);
        if (lab == "0") {
            d.label[r] = 0;
        } else if (lab == "1") {
            d.label[r] = 1;
        } else {
            double v;
            if (parse_decimal(lab, v) && (v == 0.0 || v == 1.0)) {
                d.label[r] = static_cast<int>(v);
            } else {
                throw std::runtime_error("label column contains a value other than 0/1 at data row " +
                                         std::to_string(r + 1) + ": '" + lab + "'");
            }
        }
        d.attack_cat[r] = rec[cat_col];

        for (std::size_t j = 0; j < feature_cols.size(); ++j) {
            const std::string& cell = rec[feature_cols[j]];
            double v;
            if (parse_decimal(trim(cell), v)) {
                d.features(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) = v;
            } else {
                d.features(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) = kNaN;
                auto it = unparsed_of_col.find(j);
                if (it == unparsed_of_col.end()) {
                    it = unparsed_of_col.emplace(j, d.unparsed.size()).first;
                    d.unparsed.push_back(UnparsedColumn{j, {}, {}});
                    dicts.emplace_back();
                }
                UnparsedColumn& uc = d.unparsed[it->second];
                auto& dict = dicts[it->second];
                const std::string key = trim(cell);
                auto dit = dict.find(key);
                std::uint32_t vi;
                if (dit == dict.end()) {
                    vi = static_cast<std::uint32_t>(uc.values.size());
                    dict.emplace(key, vi);
                    uc.values.push_back(key);
                } else {
                    vi = dit->second;
                }
                uc.cells.emplace_back(r, vi);
            }
        }
    }
    if (n == 0) throw std::runtime_error("CSV has no data rows: " + path);
    return d;
}

std::pair<Dataset, CleaningSummary> clean(const Dataset& raw) {
    const std::size_t n = raw.n_rows();
    CleaningSummary summary;
    summary.rows_in = n;

    Dataset d;
    d.features = raw.features;
    d.feature_names = raw.feature_names;
    d.label = raw.label;
    d.attack_cat = raw.attack_cat;

    std::vector<bool> drop(n, false);

    // Resolve columns that failed decimal parsing at load time. A column
    // that is mostly text is treated as categorical and integer-encoded by
    // first-seen order; otherwise stray cells get a hex parse and the row is
    // dropped if that fails too.
    for (const auto& uc : raw.unparsed) {
        const bool categorical = uc.cells.size() * 2 >= n;
        if (categorical) {
            std::vector<std::pair<std::string, int>> encoding;
            encoding.reserve(uc.values.size());
            for (std::size_t i = 0; i < uc.values.size(); ++i) {
                encoding.emplace_back(uc.values[i], static_cast<int>(i));
            }
            summary.encodings[d.feature_names[uc.col]] = std::move(encoding);
            for (const auto& [row, vi] : uc.cells) {
                d.features(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(uc.col)) =
                    static_cast<double>(vi);
            }
        } else {
            for (const auto& [row, vi] : uc.cells) {
                double v;
                if (parse_hex(uc.values[vi], v)) {
                    d.features(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(uc.col)) = v;
                } else {
                    drop[row] = true;
                }
            }
        }
    }

    // Category normalization and the label/category consistency contract.
    std::vector<std::size_t> missing_attack_cat;
    std::vector<std::size_t> contradictory;
    for (std::size_t r = 0; r < n; ++r) {
        std::string cat = canonicalize_category(d.attack_cat[r]);
        if (d.label[r] == 0) {
            if (cat.empty()) {
                cat = "Normal";
                ++summary.null_categories_fixed;
            } else if (cat != "Normal") {
                contradictory.push_back(r);
            }
        } else {
            if (cat.empty()) {
                missing_attack_cat.push_back(r);
            } else if (cat == "Normal") {
                contradictory.push_back(r);
            }
        }
        d.attack_cat[r] = std::move(cat);
    }
    if (!missing_attack_cat.empty()) {
        std::ostringstream msg;
        msg << "attack rows with empty attack_cat (cannot invent an attack type); rows:";
        for (std::size_t i = 0; i < missing_attack_cat.size() && i < 20; ++i) {
            msg << ' ' << missing_attack_cat[i];
        }
        if (missing_attack_cat.size() > 20) msg << " ...";
        throw std::runtime_error(msg.str());
    }
    if (!contradictory.empty()) {
        std::ostringstream msg;
        msg << "rows where the binary label contradicts attack_cat; rows:";
        for (std::size_t i = 0; i < contradictory.size() && i < 20; ++i) {
            msg << ' ' << contradictory[i];
        }
        if (contradictory.size() > 20) msg << " ...";
        throw std::runtime_error(msg.str());
    }

    // Any remaining non-finite cell means the row is unparseable.
    for (std::size_t r = 0; r < n; ++r) {
        if (drop[r]) continue;
        for (Eigen::Index j = 0; j < d.features.cols(); ++j) {
            if (!std::isfinite(d.features(static_cast<Eigen::Index>(r), j))) {
                drop[r] = true;
                break;
            }
        }
    }

    std::vector<std::size_t> keep;
    keep.reserve(n);
    for (std::size_t r = 0; r < n; ++r) {
        if (!drop[r]) keep.push_back(r);
    }
    summary.dropped_rows = n - keep.size();
    summary.rows_out = keep.size();
    if (keep.empty()) throw std::runtime_error("cleaning dropped every row");

    Dataset out = d.select_rows(keep);
    return {std::move(out), std::move(summary)};
}

std::vector<CategoryCount> category_counts(const Dataset& d) {
    std::map<std::string, std::int64_t> counts;
    for (const auto& c : d.attack_cat) ++counts[c];
    std::vector<CategoryCount> out;
    out.reserve(counts.size());
    const double n = static_cast<double>(d.n_rows());
    for (const auto& [cat, cnt] : counts) {
        out.push_back({cat, cnt, 100.0 * static_cast<double>(cnt) / n});
    }
    std::sort(out.begin(), out.end(), [](const CategoryCount& a, const CategoryCount& b) {
        if (a.count != b.count) return a.count > b.count;
        return a.category < b.category;
    });
    return out;
}

Dataset subsample(const Dataset& d, double fraction, std::uint64_t seed, Stratify stratify_by) {
    if (!(fraction > 0.0 && fraction <= 1.0)) {
        throw std::invalid_argument("subsample fraction must be in (0, 1]");
    }
    if (fraction * static_cast<double>(d.n_rows()) < 1.0) {
        throw std::invalid_argument("subsample fraction keeps less than one row");
    }

    // Group rows into strata.
    std::map<std::string, std::vector<std::size_t>> strata;
    for (std::size_t r = 0; r < d.n_rows(); ++r) {
        std::string key;
        switch (stratify_by) {
            case Stratify::Category: key = d.attack_cat[r]; break;
            case Stratify::Label: key = d.label[r] ? "1" : "0"; break;
            case Stratify::None: key = ""; break;
        }
        strata[key].push_back(r);
    }

    Rng rng(derive_seed(seed, stage::kSubsample));
    std::vector<std::size_t> selected;
    for (auto& [key, rows] : strata) {
        std::size_t target = static_cast<std::size_t>(
            std::llround(fraction * static_cast<double>(rows.size())));
        if (target == 0) {
            std::cerr << "warning: stratum '" << key
                      << "' would round to zero rows; keeping one\n";
            target = 1;
        }
        // Partial Fisher-Yates: the first `target` positions become the sample.
        for (std::size_t i = 0; i < target; ++i) {
            std::size_t j = i + rng.next_below(rows.size() - i);
            std::swap(rows[i], rows[j]);
        }
        selected.insert(selected.end(), rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(target));
    }
    std::sort(selected.begin(), selected.end());
    return d.select_rows(selected);
}

Dataset synthesize(const SynthConfig& cfg) {
    if (cfg.n_rows == 0 || cfg.n_features == 0) {
        throw std::invalid_argument("synthesize needs n_rows >= 1 and n_features >= 1");
    }
    if (!(cfg.attack_fraction > 0.0 && cfg.attack_fraction < 1.0)) {
        throw std::invalid_argument("attack_fraction must be in (0, 1)");
    }
    if (!(cfg.noise_std > 0.0)) throw std::invalid_argument("noise_std must be positive");
    if (cfg.class_separation < 0.0) {
        throw std::invalid_argument("class_separation must be non-negative");
    }
    auto mix = cfg.category_mix.empty() ? halfset_category_mix() : cfg.category_mix;
    double mix_sum = 0.0;
    for (const auto& [name, f] : mix) {
        if (f < 0.0) throw std::invalid_argument("category_mix fractions must be non-negative");
        mix_sum += f;
    }
    if (std::abs(mix_sum - 1.0) > 1e-9) {
        throw std::invalid_argument("category_mix fractions must sum to 1");
    }

    const std::size_t n = cfg.n_rows;
    const std::size_t f = cfg.n_features;
    const auto n_attacks = static_cast<std::size_t>(
        std::llround(cfg.attack_fraction * static_cast<double>(n)));

    // Largest-remainder allocation of attacks to categories: exact total,
    // every count within one row of fraction * n_attacks.
    std::vector<std::size_t> cat_counts(mix.size());
    std::vector<std::pair<double, std::size_t>> remainders;
    std::size_t allocated = 0;
    for (std::size_t i = 0; i < mix.size(); ++i) {
        const double exact = mix[i].second * static_cast<double>(n_attacks);
        cat_counts[i] = static_cast<std::size_t>(std::floor(exact));
        allocated += cat_counts[i];
        remainders.emplace_back(exact - std::floor(exact), i);
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t i = 0; allocated < n_attacks; ++i, ++allocated) {
        ++cat_counts[remainders[i % remainders.size()].second];
    }

    Rng rng(derive_seed(cfg.seed, stage::kSynthesize));

    auto random_unit = [&]() {
        Vector v(static_cast<Eigen::Index>(f));
        double norm = 0.0;
        do {
            for (Eigen::Index j = 0; j < v.size(); ++j) v[j] = rng.next_normal();
            norm = v.norm();
        } while (norm < 1e-12);
        return Vector(v / norm);
    };

    // Class geometry: normal cluster at the origin, attack cluster at
    // class_separation along a seeded direction. Category sub-centers sit a
    // quarter separation away from the attack center so every offset
    // vanishes when class_separation is zero.
    const Vector class_dir = random_unit();
    const Vector attack_center = cfg.class_separation * class_dir;
    std::vector<Vector> cat_centers;
    cat_centers.reserve(mix.size());
    for (std::size_t i = 0; i < mix.size(); ++i) {
        cat_centers.push_back(attack_center + 0.25 * cfg.class_separation * random_unit());
    }

    Dataset d;
    d.feature_names.reserve(f);
    for (std::size_t j = 0; j < f; ++j) d.feature_names.push_back("f" + std::to_string(j));
    d.features.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(f));
    d.label.resize(n);
    d.attack_cat.resize(n);

    std::size_t row = 0;
    auto emit = [&](const Vector& center, int label, const std::string& cat) {
        for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(f); ++j) {
            d.features(static_cast<Eigen::Index>(row), j) = center[j] + cfg.noise_std * rng.next_normal();
        }
        d.label[row] = label;
        d.attack_cat[row] = cat;
        ++row;
    };

    const Vector normal_center = Vector::Zero(static_cast<Eigen::Index>(f));
    for (std::size_t i = 0; i < n - n_attacks; ++i) emit(normal_center, 0, "Normal");
    for (std::size_t c = 0; c < mix.size(); ++c) {
        if (cat_counts[c] == 0) {
            std::cerr << "warning: synthetic category '" << mix[c].first
                      << "' received zero rows and is omitted\n";
            continue;
        }
        for (std::size_t i = 0; i < cat_counts[c]; ++i) emit(cat_centers[c], 1, mix[c].first);
    }

    // Shuffle the emitted rows so the CSV is interleaved, not block-ordered.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng.shuffle(order);
    return d.select_rows(order);
}

}  // namespace zdpipe
