#include "zdpipe/split.hpp"

#include <algorithm>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "zdpipe/rng.hpp"

namespace zdpipe {

std::string to_string(InjectMode m) {
    return m == InjectMode::Shuffled ? "shuffled" : "append";
}

InjectMode inject_mode_from_string(const std::string& s) {
    if (s == "shuffled") return InjectMode::Shuffled;
    if (s == "append") return InjectMode::Append;
    throw std::invalid_argument("unknown inject mode: '" + s + "' (want shuffled|append)");
}

std::string SplitPlan::to_json_string() const {
    nlohmann::ordered_json j;
    j["schema_version"] = 1;
    j["train_indices"] = train_indices;
    j["test_indices"] = test_indices;
    j["zero_day_categories"] = zero_day_categories;
    j["train_fraction"] = train_fraction;
    j["seed"] = seed;
    j["inject_mode"] = to_string(inject_mode);
    return j.dump(2);
}

SplitPlan SplitPlan::from_json_string(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    SplitPlan p;
    p.train_indices = j.at("train_indices").get<std::vector<std::size_t>>();
    p.test_indices = j.at("test_indices").get<std::vector<std::size_t>>();
    for (const auto& c : j.at("zero_day_categories")) {
        p.zero_day_categories.insert(c.get<std::string>());
    }
    p.train_fraction = j.at("train_fraction").get<double>();
    p.seed = j.at("seed").get<std::uint64_t>();
    p.inject_mode = inject_mode_from_string(j.at("inject_mode").get<std::string>());
    return p;
}

std::set<std::string> select_zero_day_categories(const std::vector<CategoryCount>& counts, int n) {
    if (n <= 0) throw std::invalid_argument("zero-day category count must be positive");
    std::vector<CategoryCount> attacks;
    for (const auto& c : counts) {
        if (c.category != "Normal") attacks.push_back(c);
    }
    if (n >= static_cast<int>(attacks.size())) {
        throw std::invalid_argument("requested " + std::to_string(n) +
                                    " zero-day categories but only " +
                                    std::to_string(attacks.size()) + " attack categories exist");
    }
    std::sort(attacks.begin(), attacks.end(), [](const CategoryCount& a, const CategoryCount& b) {
        if (a.count != b.count) return a.count < b.count;
        return a.category < b.category;
    });
    std::set<std::string> out;
    for (int i = 0; i < n; ++i) out.insert(attacks[static_cast<std::size_t>(i)].category);
    return out;
}

SplitPlan make_split(const Dataset& d, double train_fraction,
                     const std::set<std::string>& zero_day_categories,
                     std::uint64_t seed, InjectMode inject_mode) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw std::invalid_argument("train_fraction must be in (0, 1)");
    }
    if (zero_day_categories.empty()) {
        throw std::invalid_argument("zero_day_categories must be non-empty");
    }
    if (zero_day_categories.count("Normal")) {
        throw std::invalid_argument("'Normal' cannot be a zero-day category");
    }
    for (const auto& c : zero_day_categories) {
        if (std::find(d.attack_cat.begin(), d.attack_cat.end(), c) == d.attack_cat.end()) {
            throw std::invalid_argument("zero-day category '" + c + "' not present in dataset");
        }
    }

    std::vector<std::size_t> zero_day_rows;
    std::vector<std::size_t> rest[2];  // by label
    for (std::size_t r = 0; r < d.n_rows(); ++r) {
        if (zero_day_categories.count(d.attack_cat[r])) {
            zero_day_rows.push_back(r);
        } else {
            rest[d.label[r]].push_back(r);
        }
    }

    SplitPlan plan;
    plan.zero_day_categories = zero_day_categories;
    plan.train_fraction = train_fraction;
    plan.seed = seed;
    plan.inject_mode = inject_mode;

    // Stratified assignment of the non-zero-day rows by binary label.
    Rng assign_rng(derive_seed(seed, stage::kSplitAssign));
    std::vector<std::size_t> held_out;
    for (auto& stratum : rest) {
        if (stratum.empty()) continue;
        const auto target = static_cast<std::size_t>(
            std::llround(train_fraction * static_cast<double>(stratum.size())));
        if (target == 0 || target == stratum.size()) {
            throw std::runtime_error("split leaves an empty train or test stratum");
        }
        assign_rng.shuffle(stratum);
        std::vector<std::size_t> tr(stratum.begin(), stratum.begin() + static_cast<std::ptrdiff_t>(target));
        std::vector<std::size_t> te(stratum.begin() + static_cast<std::ptrdiff_t>(target), stratum.end());
        std::sort(tr.begin(), tr.end());
        std::sort(te.begin(), te.end());
        plan.train_indices.insert(plan.train_indices.end(), tr.begin(), tr.end());
        held_out.insert(held_out.end(), te.begin(), te.end());
    }
    if (plan.train_indices.empty() || (held_out.empty() && zero_day_rows.empty())) {
        throw std::runtime_error("split produced an empty partition");
    }
    std::sort(plan.train_indices.begin(), plan.train_indices.end());
    std::sort(held_out.begin(), held_out.end());

    if (inject_mode == InjectMode::Append) {
        plan.test_indices = held_out;
        plan.test_indices.insert(plan.test_indices.end(), zero_day_rows.begin(), zero_day_rows.end());
    } else {
        plan.test_indices = held_out;
        plan.test_indices.insert(plan.test_indices.end(), zero_day_rows.begin(), zero_day_rows.end());
        Rng shuffle_rng(derive_seed(seed, stage::kSplitShuffle));
        shuffle_rng.shuffle(plan.test_indices);
    }
    return plan;
}

std::pair<Dataset, Dataset> materialize(const Dataset& d, const SplitPlan& p) {
    return {d.select_rows(p.train_indices), d.select_rows(p.test_indices)};
}

}  // namespace zdpipe
