#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "phishdqn/features.hpp"

namespace phishdqn {

struct LabeledUrl {
    std::string url;
    int label = 0;  // 0 benign, 1 phishing
};

struct Sample {
    FeatureVector features;
    int label = 0;
};

struct VectorizedDataset {
    std::vector<Sample> samples;
    std::size_t benign_count = 0;
    std::size_t phishing_count = 0;
};

/// Disjoint train/test index sets; union covers the dataset exactly once.
/// Indices are sorted ascending within each side.
struct SplitPlan {
    std::vector<std::size_t> train_indices;
    std::vector<std::size_t> test_indices;
    std::uint64_t seed = 0;
    double ratio = 0.0;
};

/// What vectorize does with a row whose URL does not parse.
enum class ParseErrorAction {
    skip,        // drop the row, report it
    suspicious,  // keep it as an all-ones vector with an all-false mask
};

/// Reads `url,label` rows. The label is the text after the last comma:
/// strictly 0/1, or the literals legitimate/phishing (case-insensitive).
/// A first row whose label field is literally "label" is treated as a header.
/// Surrounding double quotes on the URL field are stripped.
std::vector<LabeledUrl> load_csv(const std::filesystem::path& path);

/// Inverse of load_csv: plain `url,label` rows, LF endings, no header.
void write_csv(const std::filesystem::path& path, std::span<const LabeledUrl> records);

using EvidenceCache = std::unordered_map<std::string, HostEvidence>;

/// JSON-lines cache: one object per line, {"url": ..., <evidence fields>}.
/// Absent keys stay unobserved. Later lines for the same URL win.
EvidenceCache load_evidence_cache(const std::filesystem::path& path);

struct SkippedRecord {
    std::size_t row_index;
    std::string url;
    std::string reason;
};

struct VectorizeResult {
    VectorizedDataset data;
    std::vector<SkippedRecord> skipped;
    std::size_t defaulted_slot_count = 0;    // slots that fell back to the policy
    std::size_t suspicious_fallback_count = 0;  // unparseable rows kept as all-ones
};

VectorizeResult vectorize(std::span<const LabeledUrl> records, const EvidenceCache& cache,
                          MissingEvidencePolicy policy, ParseErrorAction on_parse_error);

/// Convenience overload: loads the cache from `cache_path` first; an empty
/// path means no evidence at all.
VectorizeResult vectorize(std::span<const LabeledUrl> records,
                          const std::filesystem::path& cache_path, MissingEvidencePolicy policy,
                          ParseErrorAction on_parse_error);

/// New dataset holding the selected rows in the given order, class counts
/// recomputed.
VectorizedDataset subset(const VectorizedDataset& data, std::span<const std::size_t> indices);

/// Stratified, seeded train/test split. Each class contributes
/// round(class_size * ratio) samples to the train side, so both sides match
/// the full class ratio within one sample per class.
SplitPlan split(const VectorizedDataset& data, double ratio, std::uint64_t seed);

/// Stratified k folds; the k test sets partition the dataset.
std::vector<SplitPlan> kfold(const VectorizedDataset& data, std::size_t k, std::uint64_t seed);

/// 14 feature columns plus label, with a header naming every slot.
void write_feature_csv(const std::filesystem::path& path, const VectorizedDataset& data);

/// Same layout as the feature CSV but holding the evidence mask bits.
void write_mask_csv(const std::filesystem::path& path, const VectorizedDataset& data);

}  // namespace phishdqn
