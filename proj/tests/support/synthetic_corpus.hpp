#pragma once

// Deterministic corpora for tests: rule-labeled bit datasets whose labels
// are a known boolean function of the feature slots, and a desk-scale URL
// corpus with a complete evidence cache.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "phishdqn/dataset.hpp"
#include "phishdqn/features.hpp"
#include "phishdqn/rng.hpp"

namespace testsupport {

/// label = ip_address OR at_symbol OR (long_url AND prefix_suffix).
inline int rule_label(const phishdqn::FeatureVector& v) {
    const auto& b = v.values;
    return (b[1] != 0 || b[3] != 0 || (b[2] != 0 && b[4] != 0)) ? 1 : 0;
}

/// Random bit vectors labeled by rule_label. Slots 1-5 fire with
/// probability 0.3, the rest with 0.2, so neither class swamps the other.
inline phishdqn::VectorizedDataset rule_dataset(std::size_t n, std::uint64_t seed) {
    phishdqn::SplitMix64 rng(seed);
    phishdqn::VectorizedDataset data;
    for (std::size_t i = 0; i < n; ++i) {
        phishdqn::FeatureVector v;
        for (std::size_t slot = 0; slot < phishdqn::kFeatureCount; ++slot) {
            const double p = (slot >= 1 && slot <= 5) ? 0.3 : 0.2;
            v.values[slot] = rng.next_double() < p ? 1 : 0;
            v.evidence_mask[slot] = true;
        }
        phishdqn::Sample s;
        s.features = v;
        s.label = rule_label(v);
        data.samples.push_back(s);
        s.label == 0 ? ++data.benign_count : ++data.phishing_count;
    }
    return data;
}

/// Same construction, labeled by the simpler ip_address OR at_symbol rule.
inline phishdqn::VectorizedDataset or_rule_dataset(std::size_t n, std::uint64_t seed) {
    phishdqn::SplitMix64 rng(seed);
    phishdqn::VectorizedDataset data;
    for (std::size_t i = 0; i < n; ++i) {
        phishdqn::FeatureVector v;
        for (std::size_t slot = 0; slot < phishdqn::kFeatureCount; ++slot) {
            const double p = (slot >= 1 && slot <= 5) ? 0.3 : 0.2;
            v.values[slot] = rng.next_double() < p ? 1 : 0;
            v.evidence_mask[slot] = true;
        }
        phishdqn::Sample s;
        s.features = v;
        s.label = (v.values[1] != 0 || v.values[3] != 0) ? 1 : 0;
        data.samples.push_back(s);
        s.label == 0 ? ++data.benign_count : ++data.phishing_count;
    }
    return data;
}

/// Writes a balanced labeled URL corpus plus an evidence cache that covers
/// every URL with all nine fields present. Benign rows are boring https
/// sites with aged domains; phishing rows cycle through IP hosts, userinfo
/// tricks, dash-heavy long hosts, and subdomain chains, with hostile page
/// evidence. A sliver of each class carries off-profile traits so no single
/// slot separates the classes on its own.
inline void write_desk_corpus(const std::filesystem::path& csv_path,
                              const std::filesystem::path& evidence_path,
                              std::size_t per_class = 1000, std::uint64_t seed = 99) {
    phishdqn::SplitMix64 rng(seed);
    std::ofstream csv(csv_path, std::ios::binary);
    std::ofstream ev(evidence_path, std::ios::binary);
    if (!csv || !ev) {
        throw std::runtime_error("cannot open desk corpus output files");
    }

    auto emit = [&](const std::string& url, int label, bool trusted, bool dns, int age,
                    int anchor_pct, bool mismatch, int redirects, int popups, bool cross,
                    bool registered) {
        csv << url << ',' << label << '\n';
        nlohmann::json j;
        j["url"] = url;
        j["https_issuer_trusted"] = trusted;
        j["dns_has_record"] = dns;
        j["domain_age_days"] = age;
        j["anchor_ratio"] = static_cast<double>(anchor_pct) / 100.0;
        j["mouseover_mismatch"] = mismatch;
        j["redirect_count"] = redirects;
        j["popup_count"] = popups;
        j["form_handler_cross_domain"] = cross;
        j["whois_registered"] = registered;
        ev << j.dump() << '\n';
    };

    for (std::size_t i = 0; i < per_class; ++i) {
        const std::string id = std::to_string(i);
        const bool odd_one_out = rng.next_double() < 0.08;
        std::string url = "https://site" + id + ".example.com/page" + id;
        if (odd_one_out) {
            // Benign but wordy: trips the length slot without being hostile.
            url += "/a/rather/deep/archive/section/with/many/parts";
        }
        emit(url, 0,
             /*trusted=*/true, /*dns=*/true,
             /*age=*/400 + static_cast<int>(rng.bounded(3000)),
             /*anchor_pct=*/static_cast<int>(rng.bounded(15)),
             /*mismatch=*/false,
             /*redirects=*/static_cast<int>(rng.bounded(2)),
             /*popups=*/static_cast<int>(rng.bounded(2)),
             /*cross=*/false, /*registered=*/true);
    }

    for (std::size_t i = 0; i < per_class; ++i) {
        const std::string id = std::to_string(i);
        std::string url;
        switch (rng.bounded(4)) {
        case 0:
            url = "http://192.0.2." + std::to_string(i % 256) + "/login" + id;
            break;
        case 1:
            url = "http://bank.example.com@lure" + id + ".example.net/verify";
            break;
        case 2:
            url = "http://secure-login-update" + id +
                  ".example-accounts.biz/session/confirm/details/now" + id;
            break;
        default:
            url = "http://auth.portal.login.cluster" + id + ".example.org/validate";
            break;
        }
        const bool mild = rng.next_double() < 0.08;
        emit(url, 1,
             /*trusted=*/false, /*dns=*/rng.next_double() < 0.9,
             /*age=*/mild ? 500 + static_cast<int>(rng.bounded(500))
                          : 5 + static_cast<int>(rng.bounded(300)),
             /*anchor_pct=*/mild ? static_cast<int>(rng.bounded(15))
                                 : 30 + static_cast<int>(rng.bounded(60)),
             /*mismatch=*/rng.next_double() < 0.7,
             /*redirects=*/2 + static_cast<int>(rng.bounded(4)),
             /*popups=*/3 + static_cast<int>(rng.bounded(4)),
             /*cross=*/rng.next_double() < 0.7,
             /*registered=*/rng.next_double() < 0.5);
    }
    if (!csv || !ev) {
        throw std::runtime_error("failed while writing desk corpus files");
    }
}

}  // namespace testsupport
