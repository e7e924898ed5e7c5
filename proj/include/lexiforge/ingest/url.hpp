#pragma once

#include <algorithm>
#include <cctype>
#include <optional>
#include <string>
#include <string_view>

#include "lexiforge/ingest/rules.hpp"

namespace lexiforge::ingest {

struct Url {
  std::string scheme;
  std::string host;
  std::string path;  // always starts with '/'
  std::string query;
};

inline std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

inline std::optional<Url> parse_url(std::string_view s) {
  const auto colon = s.find("://");
  if (colon == std::string_view::npos || colon == 0) return std::nullopt;
  Url u;
  u.scheme = ascii_lower(s.substr(0, colon));
  for (char c : u.scheme) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '+' && c != '-' && c != '.') return std::nullopt;
  }
  if (!std::isalpha(static_cast<unsigned char>(u.scheme[0]))) return std::nullopt;
  auto rest = s.substr(colon + 3);
  if (auto hash = rest.find('#'); hash != std::string_view::npos) rest = rest.substr(0, hash);
  const auto host_end = rest.find_first_of("/?");
  auto authority = rest.substr(0, host_end);
  if (auto at = authority.rfind('@'); at != std::string_view::npos) authority = authority.substr(at + 1);
  if (auto port = authority.rfind(':'); port != std::string_view::npos && authority.find(']') == std::string_view::npos) {
    const auto digits = authority.substr(port + 1);
    if (!std::all_of(digits.begin(), digits.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
      return std::nullopt;
    authority = authority.substr(0, port);
  }
  if (authority.empty()) return std::nullopt;
  for (char c : authority) {
    if (std::isspace(static_cast<unsigned char>(c))) return std::nullopt;
  }
  u.host = ascii_lower(authority);
  if (host_end != std::string_view::npos) {
    auto tail = rest.substr(host_end);
    const auto q = tail.find('?');
    u.path = std::string(tail.substr(0, q));
    if (q != std::string_view::npos) u.query = std::string(tail.substr(q + 1));
  }
  if (u.path.empty()) u.path = "/";
  for (char c : u.path) {
    if (std::isspace(static_cast<unsigned char>(c))) return std::nullopt;
  }
  return u;
}

// Non-empty path segments: "/" is 0, "/about" is 1, "/a/b/" is 2.
inline std::size_t path_depth(std::string_view path) {
  std::size_t depth = 0;
  bool in_segment = false;
  for (char c : path) {
    if (c == '/') {
      in_segment = false;
    } else if (!in_segment) {
      in_segment = true;
      ++depth;
    }
  }
  return depth;
}

struct UrlDecision {
  bool keep = true;
  std::string reason;  // "malformed", "excluded:<substring>" or "depth:<n>"

  static UrlDecision kept() { return {}; }
  static UrlDecision drop(std::string why) { return {false, std::move(why)}; }
};

inline UrlDecision filter_url(std::string_view url, const FilterRules& rules) {
  const auto u = parse_url(url);
  if (!u) return UrlDecision::drop("malformed");
  const auto haystack = ascii_lower(u->path + (u->query.empty() ? "" : "?" + u->query));
  for (const auto& ex : rules.url_excludes) {
    if (!ex.empty() && haystack.find(ascii_lower(ex)) != std::string::npos) return UrlDecision::drop("excluded:" + ex);
  }
  if (rules.homepage_only) {
    const auto depth = path_depth(u->path);
    if (depth > rules.max_depth) return UrlDecision::drop("depth:" + std::to_string(depth));
  }
  return UrlDecision::kept();
}

}  // namespace lexiforge::ingest
