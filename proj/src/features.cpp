#include "phishdqn/features.hpp"

#include <algorithm>
#include <vector>

#include "phishdqn/errors.hpp"

namespace phishdqn {

const std::array<std::string, kFeatureCount> kFeatureNames = {
    "https_protocol", "ip_address",    "long_url",    "at_symbol",
    "prefix_suffix",  "subdomains",    "anchor_urls", "link_hiding",
    "dns_record",     "page_redirects", "popup_windows", "domain_age",
    "server_form_handler", "unusual_url",
};

namespace {

class SlotWriter {
  public:
    SlotWriter(FeatureVector& out, MissingEvidencePolicy policy) : out_(out), policy_(policy) {}

    void observed(Feature slot, bool suspicious) {
        out_.values[slot] = suspicious ? 1 : 0;
        out_.evidence_mask[slot] = true;
    }

    template <typename T, typename Rule>
    void from_evidence(Feature slot, const std::optional<T>& field, const char* field_name,
                       Rule&& rule) {
        if (field.has_value()) {
            observed(slot, rule(*field));
        } else {
            out_.values[slot] = policy_ == MissingEvidencePolicy::suspicious_default ? 1 : 0;
            out_.evidence_mask[slot] = false;
            missing_.push_back(field_name);
        }
    }

    void finish() const {
        if (policy_ == MissingEvidencePolicy::error_on_missing && !missing_.empty()) {
            std::string what = "missing evidence:";
            for (const auto& f : missing_) what += " " + f;
            throw MissingEvidence(what, missing_);
        }
    }

  private:
    FeatureVector& out_;
    MissingEvidencePolicy policy_;
    std::vector<std::string> missing_;
};

}  // namespace

FeatureVector extract_features(const ParsedUrl& url, const HostEvidence& evidence,
                               MissingEvidencePolicy policy) {
    FeatureVector fv;
    SlotWriter slots(fv, policy);

    if (url.scheme != "https") {
        slots.observed(kHttpsProtocol, true);
    } else {
        slots.from_evidence(kHttpsProtocol, evidence.https_issuer_trusted, "https_issuer_trusted",
                            [](bool trusted) { return !trusted; });
    }

    bool ip_host = url.host_is_ipv4 || url.host_is_hex_ip;
    slots.observed(kIpAddress, ip_host);
    slots.observed(kLongUrl, url.raw.size() > kLongUrlThreshold);

    // '@' counts anywhere past the scheme separator, query string included.
    std::size_t sep = url.raw.find("://");
    slots.observed(kAtSymbol, url.raw.find('@', sep + 3) != std::string::npos);

    slots.observed(kPrefixSuffix, url.host.find('-') != std::string::npos);

    std::size_t host_dots =
        static_cast<std::size_t>(std::count(url.host.begin(), url.host.end(), '.'));
    slots.observed(kSubdomains, !ip_host && host_dots >= kSubdomainDotLimit);

    slots.from_evidence(kAnchorUrls, evidence.anchor_ratio, "anchor_ratio",
                        [](double ratio) { return ratio > kAnchorRatioThreshold; });
    slots.from_evidence(kLinkHiding, evidence.mouseover_mismatch, "mouseover_mismatch",
                        [](bool mismatch) { return mismatch; });
    slots.from_evidence(kDnsRecord, evidence.dns_has_record, "dns_has_record",
                        [](bool has_record) { return !has_record; });
    slots.from_evidence(kPageRedirects, evidence.redirect_count, "redirect_count",
                        [](int count) { return count > kRedirectThreshold; });
    slots.from_evidence(kPopupWindows, evidence.popup_count, "popup_count",
                        [](int count) { return count > kPopupThreshold; });
    slots.from_evidence(kDomainAge, evidence.domain_age_days, "domain_age_days",
                        [](int days) { return days < kDomainAgeThresholdDays; });
    slots.from_evidence(kServerFormHandler, evidence.form_handler_cross_domain,
                        "form_handler_cross_domain", [](bool cross) { return cross; });
    slots.from_evidence(kUnusualUrl, evidence.whois_registered, "whois_registered",
                        [](bool registered) { return !registered; });

    slots.finish();
    return fv;
}

}  // namespace phishdqn
