#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace phishdqn {

/// Positive class is label 1 (phishing) everywhere.
struct ConfusionMatrix {
    std::uint64_t tp = 0;
    std::uint64_t tn = 0;
    std::uint64_t fp = 0;
    std::uint64_t fn = 0;

    std::uint64_t total() const { return tp + tn + fp + fn; }
    bool operator==(const ConfusionMatrix&) const = default;
};

/// Measures with a zero denominator stay empty rather than collapsing to 0,
/// so averaged reports cannot silently absorb degenerate folds.
struct RelevanceReport {
    std::optional<double> precision;
    std::optional<double> recall;
    std::optional<double> accuracy;
    std::optional<double> f_score;
    ConfusionMatrix matrix;
};

ConfusionMatrix confusion(const std::vector<int>& predictions, const std::vector<int>& labels);

RelevanceReport report(const ConfusionMatrix& m);

/// {tp, tn, fp, fn, precision, recall, accuracy, f_score}; undefined
/// measures serialize as null.
nlohmann::json report_json(const RelevanceReport& r);

/// Human-readable table: the four measures in one row, counts below.
std::string report_table(const RelevanceReport& r);

}  // namespace phishdqn
