#include "phishdqn/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "phishdqn/errors.hpp"
#include "phishdqn/rng.hpp"

namespace phishdqn {

namespace {

std::string trim(std::string_view s) {
    std::size_t begin = 0, end = s.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
    return std::string(s.substr(begin, end - begin));
}

std::string lowercase(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::string unquote(std::string s) {
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
    return s;
}

int parse_label(const std::string& text, std::size_t row) {
    std::string t = lowercase(trim(text));
    if (t == "0" || t == "legitimate") return 0;
    if (t == "1" || t == "phishing") return 1;
    throw BadLabel("bad label \"" + text + "\" at row " + std::to_string(row), row);
}

}  // namespace

std::vector<LabeledUrl> load_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open corpus file " + path.string());

    std::vector<LabeledUrl> records;
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) {
            ++row;
            continue;
        }
        std::size_t comma = line.rfind(',');
        std::string label_text = comma == std::string::npos ? "" : line.substr(comma + 1);
        if (row == 0 && lowercase(trim(label_text)) == "label") {
            ++row;
            continue;
        }
        if (comma == std::string::npos)
            throw BadLabel("no label field at row " + std::to_string(row), row);
        LabeledUrl record;
        record.url = unquote(trim(line.substr(0, comma)));
        record.label = parse_label(label_text, row);
        records.push_back(std::move(record));
        ++row;
    }
    return records;
}

void write_csv(const std::filesystem::path& path, std::span<const LabeledUrl> records) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write corpus file " + path.string());
    for (const auto& record : records) out << record.url << "," << record.label << "\n";
}

namespace {

HostEvidence evidence_from_json(const nlohmann::json& object) {
    HostEvidence ev;
    auto get_bool = [&](const char* key, std::optional<bool>& field) {
        if (object.contains(key)) field = object.at(key).get<bool>();
    };
    auto get_int = [&](const char* key, std::optional<int>& field) {
        if (object.contains(key)) field = object.at(key).get<int>();
    };
    get_bool("https_issuer_trusted", ev.https_issuer_trusted);
    get_bool("dns_has_record", ev.dns_has_record);
    get_int("domain_age_days", ev.domain_age_days);
    if (object.contains("anchor_ratio")) ev.anchor_ratio = object.at("anchor_ratio").get<double>();
    get_bool("mouseover_mismatch", ev.mouseover_mismatch);
    get_int("redirect_count", ev.redirect_count);
    get_int("popup_count", ev.popup_count);
    get_bool("form_handler_cross_domain", ev.form_handler_cross_domain);
    get_bool("whois_registered", ev.whois_registered);
    return ev;
}

}  // namespace

EvidenceCache load_evidence_cache(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open evidence cache " + path.string());

    EvidenceCache cache;
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (trim(line).empty()) continue;
        nlohmann::json object;
        try {
            object = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw CorruptFile("evidence cache " + path.string() + " line " + std::to_string(row) +
                              ": " + e.what());
        }
        if (!object.is_object() || !object.contains("url"))
            throw CorruptFile("evidence cache " + path.string() + " line " + std::to_string(row) +
                              ": expected an object with a \"url\" key");
        cache[object.at("url").get<std::string>()] = evidence_from_json(object);
    }
    return cache;
}

VectorizeResult vectorize(std::span<const LabeledUrl> records, const EvidenceCache& cache,
                          MissingEvidencePolicy policy, ParseErrorAction on_parse_error) {
    VectorizeResult result;
    result.data.samples.reserve(records.size());

    static const HostEvidence kNoEvidence{};
    for (std::size_t i = 0; i < records.size(); ++i) {
        const LabeledUrl& record = records[i];
        Sample sample;
        sample.label = record.label;
        try {
            ParsedUrl url = parse_url(record.url);
            auto it = cache.find(record.url);
            const HostEvidence& evidence = it == cache.end() ? kNoEvidence : it->second;
            sample.features = extract_features(url, evidence, policy);
            for (bool observed : sample.features.evidence_mask)
                if (!observed) ++result.defaulted_slot_count;
        } catch (const MalformedUrl& e) {
            if (on_parse_error == ParseErrorAction::skip) {
                result.skipped.push_back({i, record.url, e.what()});
                continue;
            }
            // Unparseable rows kept as suspicious: every slot 1, nothing
            // observed. Counted once here, not again as defaulted slots.
            sample.features.values.fill(1);
            sample.features.evidence_mask.fill(false);
            ++result.suspicious_fallback_count;
        }
        if (sample.label == 0)
            ++result.data.benign_count;
        else
            ++result.data.phishing_count;
        result.data.samples.push_back(std::move(sample));
    }
    return result;
}

VectorizeResult vectorize(std::span<const LabeledUrl> records,
                          const std::filesystem::path& cache_path, MissingEvidencePolicy policy,
                          ParseErrorAction on_parse_error) {
    EvidenceCache cache;
    if (!cache_path.empty()) cache = load_evidence_cache(cache_path);
    return vectorize(records, cache, policy, on_parse_error);
}

namespace {

// Per-class index lists in dataset order, shuffled under one generator:
// class 0 first, then class 1.
std::array<std::vector<std::size_t>, 2> shuffled_class_indices(const VectorizedDataset& data,
                                                               SplitMix64& rng) {
    std::array<std::vector<std::size_t>, 2> classes;
    for (std::size_t i = 0; i < data.samples.size(); ++i)
        classes[data.samples[i].label == 0 ? 0 : 1].push_back(i);
    rng.shuffle(classes[0]);
    rng.shuffle(classes[1]);
    return classes;
}

}  // namespace

VectorizedDataset subset(const VectorizedDataset& data, std::span<const std::size_t> indices) {
    VectorizedDataset out;
    out.samples.reserve(indices.size());
    for (std::size_t i : indices) {
        const Sample& s = data.samples.at(i);
        out.samples.push_back(s);
        s.label == 0 ? ++out.benign_count : ++out.phishing_count;
    }
    return out;
}

SplitPlan split(const VectorizedDataset& data, double ratio, std::uint64_t seed) {
    if (data.samples.empty()) throw DegenerateSplit("cannot split an empty dataset");
    if (!(ratio > 0.0 && ratio < 1.0))
        throw DegenerateSplit("split ratio must lie strictly between 0 and 1");

    SplitMix64 rng(seed);
    auto classes = shuffled_class_indices(data, rng);

    SplitPlan plan;
    plan.seed = seed;
    plan.ratio = ratio;
    for (auto& indices : classes) {
        auto train_count = static_cast<std::size_t>(
            std::llround(static_cast<double>(indices.size()) * ratio));
        train_count = std::min(train_count, indices.size());
        plan.train_indices.insert(plan.train_indices.end(), indices.begin(),
                                  indices.begin() + static_cast<std::ptrdiff_t>(train_count));
        plan.test_indices.insert(plan.test_indices.end(),
                                 indices.begin() + static_cast<std::ptrdiff_t>(train_count),
                                 indices.end());
    }
    if (plan.train_indices.empty() || plan.test_indices.empty())
        throw DegenerateSplit("split would leave one side empty");
    std::sort(plan.train_indices.begin(), plan.train_indices.end());
    std::sort(plan.test_indices.begin(), plan.test_indices.end());
    return plan;
}

std::vector<SplitPlan> kfold(const VectorizedDataset& data, std::size_t k, std::uint64_t seed) {
    if (k < 2) throw DegenerateSplit("k-fold needs k >= 2");
    if (data.samples.size() < k)
        throw DegenerateSplit("k-fold needs at least k samples");

    SplitMix64 rng(seed);
    auto classes = shuffled_class_indices(data, rng);

    std::vector<SplitPlan> plans(k);
    for (std::size_t fold = 0; fold < k; ++fold) {
        SplitPlan& plan = plans[fold];
        plan.seed = seed;
        for (const auto& indices : classes) {
            std::size_t n = indices.size();
            std::size_t begin = fold * n / k;
            std::size_t end = (fold + 1) * n / k;
            for (std::size_t i = 0; i < n; ++i) {
                if (i >= begin && i < end)
                    plan.test_indices.push_back(indices[i]);
                else
                    plan.train_indices.push_back(indices[i]);
            }
        }
        if (plan.train_indices.empty() || plan.test_indices.empty())
            throw DegenerateSplit("fold " + std::to_string(fold) + " would leave one side empty");
        std::sort(plan.train_indices.begin(), plan.train_indices.end());
        std::sort(plan.test_indices.begin(), plan.test_indices.end());
        plan.ratio = static_cast<double>(plan.train_indices.size()) /
                     static_cast<double>(data.samples.size());
    }
    return plans;
}

namespace {

void write_slot_csv(const std::filesystem::path& path, const VectorizedDataset& data,
                    bool mask_bits) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    for (std::size_t i = 0; i < kFeatureCount; ++i) out << kFeatureNames[i] << ",";
    out << "label\n";
    for (const Sample& sample : data.samples) {
        for (std::size_t i = 0; i < kFeatureCount; ++i)
            out << (mask_bits ? int(sample.features.evidence_mask[i]) : int(sample.features.values[i]))
                << ",";
        out << sample.label << "\n";
    }
}

}  // namespace

void write_feature_csv(const std::filesystem::path& path, const VectorizedDataset& data) {
    write_slot_csv(path, data, false);
}

void write_mask_csv(const std::filesystem::path& path, const VectorizedDataset& data) {
    write_slot_csv(path, data, true);
}

}  // namespace phishdqn
