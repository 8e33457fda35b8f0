#include "phishdqn/url.hpp"

#include <algorithm>
#include <cctype>

#include "phishdqn/errors.hpp"

namespace phishdqn {

namespace {

bool valid_scheme(std::string_view s) {
    if (s.empty() || !std::isalpha(static_cast<unsigned char>(s.front()))) return false;
    return std::all_of(s.begin(), s.end(), [](char c) {
        unsigned char u = static_cast<unsigned char>(c);
        return std::isalnum(u) || c == '+' || c == '-' || c == '.';
    });
}

std::string lowercase(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

bool all_hex_digits(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isxdigit(c); });
}

// Strips userinfo, port, and IPv6 brackets from the verbatim authority.
std::string host_part(std::string_view authority) {
    std::size_t at = authority.rfind('@');
    std::string_view hostport =
        at == std::string_view::npos ? authority : authority.substr(at + 1);
    if (!hostport.empty() && hostport.front() == '[') {
        std::size_t close = hostport.find(']');
        return std::string(close == std::string_view::npos ? hostport.substr(1)
                                                           : hostport.substr(1, close - 1));
    }
    std::size_t colon = hostport.rfind(':');
    if (colon != std::string_view::npos) {
        std::string_view tail = hostport.substr(colon + 1);
        bool numeric_port = std::all_of(tail.begin(), tail.end(),
                                        [](unsigned char c) { return std::isdigit(c); });
        if (numeric_port) hostport = hostport.substr(0, colon);
    }
    return std::string(hostport);
}

}  // namespace

bool is_ipv4_host(std::string_view host) {
    int octets = 0;
    std::size_t pos = 0;
    while (true) {
        std::size_t dot = host.find('.', pos);
        std::string_view label =
            dot == std::string_view::npos ? host.substr(pos) : host.substr(pos, dot - pos);
        if (label.empty() || label.size() > 3) return false;
        int value = 0;
        for (char c : label) {
            if (!std::isdigit(static_cast<unsigned char>(c))) return false;
            value = value * 10 + (c - '0');
        }
        if (value > 255) return false;
        ++octets;
        if (dot == std::string_view::npos) break;
        pos = dot + 1;
    }
    return octets == 4;
}

bool is_hex_ip_host(std::string_view host) {
    auto is_hex_label = [](std::string_view label, std::size_t max_digits) {
        if (label.size() < 3 || label.size() > 2 + max_digits) return false;
        if (label[0] != '0' || (label[1] != 'x' && label[1] != 'X')) return false;
        return all_hex_digits(label.substr(2));
    };
    if (host.find('.') == std::string_view::npos) return is_hex_label(host, 8);
    int octets = 0;
    std::size_t pos = 0;
    while (true) {
        std::size_t dot = host.find('.', pos);
        std::string_view label =
            dot == std::string_view::npos ? host.substr(pos) : host.substr(pos, dot - pos);
        if (!is_hex_label(label, 2)) return false;
        ++octets;
        if (dot == std::string_view::npos) break;
        pos = dot + 1;
    }
    return octets == 4;
}

ParsedUrl parse_url(std::string_view raw) {
    if (raw.empty()) throw MalformedUrl("empty URL");

    std::size_t sep = raw.find("://");
    if (sep == std::string_view::npos)
        throw MalformedUrl("no scheme separator in \"" + std::string(raw) + "\"");

    ParsedUrl url;
    url.raw = std::string(raw);
    url.scheme_raw = std::string(raw.substr(0, sep));
    if (!valid_scheme(url.scheme_raw))
        throw MalformedUrl("invalid scheme in \"" + std::string(raw) + "\"");
    url.scheme = lowercase(url.scheme_raw);

    std::string_view rest = raw.substr(sep + 3);
    std::size_t authority_end = rest.find_first_of("/?#");
    std::string_view authority =
        authority_end == std::string_view::npos ? rest : rest.substr(0, authority_end);
    if (authority.empty()) throw MalformedUrl("empty authority in \"" + std::string(raw) + "\"");
    url.authority = std::string(authority);
    url.userinfo_present = authority.find('@') != std::string_view::npos;

    std::string host = host_part(authority);
    if (host.empty()) throw MalformedUrl("empty host in \"" + std::string(raw) + "\"");
    url.host = lowercase(host);
    url.host_is_ipv4 = is_ipv4_host(url.host);
    url.host_is_hex_ip = is_hex_ip_host(url.host);

    if (authority_end != std::string_view::npos) {
        std::string_view tail = rest.substr(authority_end);
        std::size_t qmark = tail.find('?');
        std::size_t hash = tail.find('#');
        std::size_t path_end = std::min(qmark, hash);
        url.path = std::string(tail.substr(0, path_end));
        if (hash != std::string_view::npos) {
            url.has_fragment = true;
            url.fragment = std::string(tail.substr(hash + 1));
        }
        if (qmark != std::string_view::npos && qmark < hash) {
            url.has_query = true;
            std::size_t query_end = hash == std::string_view::npos ? tail.size() : hash;
            url.query = std::string(tail.substr(qmark + 1, query_end - qmark - 1));
        }
    }
    return url;
}

std::string reassemble(const ParsedUrl& url) {
    std::string out = url.scheme_raw + "://" + url.authority + url.path;
    if (url.has_query) out += "?" + url.query;
    if (url.has_fragment) out += "#" + url.fragment;
    return out;
}

}  // namespace phishdqn
