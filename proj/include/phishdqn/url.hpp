#pragma once

#include <string>
#include <string_view>

namespace phishdqn {

/// Structural decomposition of a URL string.
///
/// `scheme` and `host` are lowercased; `scheme_raw` and `authority` keep the
/// verbatim slices so `reassemble` can rebuild the original string exactly.
/// The host never includes userinfo, a port, or IPv6 brackets.
struct ParsedUrl {
    std::string raw;
    std::string scheme;
    std::string host;
    bool host_is_ipv4 = false;
    bool host_is_hex_ip = false;
    std::string path;
    std::string query;
    std::string fragment;
    bool userinfo_present = false;

    std::string scheme_raw;
    std::string authority;
    bool has_query = false;
    bool has_fragment = false;
};

/// Splits `raw` into scheme://authority path ?query #fragment.
/// Throws MalformedUrl when there is no scheme followed by "://", the scheme
/// is not [A-Za-z][A-Za-z0-9+.-]*, or the host is empty.
ParsedUrl parse_url(std::string_view raw);

/// Rebuilds the exact input string from the verbatim parts. Equal to `raw`
/// for every successfully parsed URL.
std::string reassemble(const ParsedUrl& url);

/// Four dot-separated decimal octets, each of 1-3 digits with value <= 255.
bool is_ipv4_host(std::string_view host);

/// Hex-obfuscated IP: either a single 0x literal of 1-8 hex digits, or four
/// dot-separated 0x octets each <= 0xFF (e.g. 0xC0.0x00.0x02.0xEB).
bool is_hex_ip_host(std::string_view host);

}  // namespace phishdqn
