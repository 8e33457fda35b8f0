#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>

#include "phishdqn/url.hpp"

namespace phishdqn {

inline constexpr std::size_t kFeatureCount = 14;

/// Canonical slot order. The order is part of the model-file contract: a
/// model trained against one ordering refuses to load under another.
enum Feature : std::size_t {
    kHttpsProtocol = 0,
    kIpAddress = 1,
    kLongUrl = 2,
    kAtSymbol = 3,
    kPrefixSuffix = 4,
    kSubdomains = 5,
    kAnchorUrls = 6,
    kLinkHiding = 7,
    kDnsRecord = 8,
    kPageRedirects = 9,
    kPopupWindows = 10,
    kDomainAge = 11,
    kServerFormHandler = 12,
    kUnusualUrl = 13,
};

extern const std::array<std::string, kFeatureCount> kFeatureNames;

/// Decision thresholds for the rule-based slots.
inline constexpr std::size_t kLongUrlThreshold = 54;   // raw length > 54 is long
inline constexpr std::size_t kSubdomainDotLimit = 3;   // >= 3 host dots is suspicious
inline constexpr double kAnchorRatioThreshold = 0.20;  // strictly greater fires
inline constexpr int kRedirectThreshold = 1;           // > 1 redirect fires
inline constexpr int kPopupThreshold = 2;              // > 2 popups fires
inline constexpr int kDomainAgeThresholdDays = 365;    // < 365 days fires

/// Externally observed facts about the host and page. Every field is
/// optional: absent means "not observed", never "false".
struct HostEvidence {
    std::optional<bool> https_issuer_trusted;
    std::optional<bool> dns_has_record;
    std::optional<int> domain_age_days;
    std::optional<double> anchor_ratio;
    std::optional<bool> mouseover_mismatch;
    std::optional<int> redirect_count;
    std::optional<int> popup_count;
    std::optional<bool> form_handler_cross_domain;
    std::optional<bool> whois_registered;
};

/// 14 binary slots plus a mask recording which slots were decided by
/// observation (lexical fact or present evidence) rather than by the
/// missing-evidence default policy.
struct FeatureVector {
    std::array<std::uint8_t, kFeatureCount> values{};
    std::array<bool, kFeatureCount> evidence_mask{};
};

/// How unobserved evidence resolves during extraction.
enum class MissingEvidencePolicy {
    benign_default,      // absent -> 0
    suspicious_default,  // absent -> 1
    error_on_missing,    // absent -> MissingEvidence listing the fields
};

/// Computes the 14 slots from a parsed URL and its evidence.
///
/// Slots 1-5 (IP host, length, '@', '-', subdomains) are purely lexical and
/// always carry evidence_mask = true. Slot 0 is lexically forced to 1 for any
/// non-https scheme; for https it needs the issuer-trust evidence bit. The
/// remaining slots are evidence-backed and fall back to `policy` when their
/// field is absent. An IPv4 or hex-IP host forces the subdomain slot to 0 so
/// the dots of the address are not double-counted as subdomain signal.
FeatureVector extract_features(const ParsedUrl& url, const HostEvidence& evidence,
                               MissingEvidencePolicy policy);

}  // namespace phishdqn
