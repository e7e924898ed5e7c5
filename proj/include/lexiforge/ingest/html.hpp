#pragma once

// Tolerant HTML text extraction. No DOM is built: a single pass tracks the
// one element being captured, closes it on its end tag, on any block-level
// tag or at end of input, and flattens inline markup inside it.

#include <unicode/ucnv.h>

#include <algorithm>
#include <cctype>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "lexiforge/error.hpp"
#include "lexiforge/ingest/url.hpp"
#include "lexiforge/text.hpp"

namespace lexiforge::ingest {

namespace detail {

inline std::optional<std::string> meta_charset(std::string_view bytes) {
  const auto head = ascii_lower(bytes.substr(0, std::min<std::size_t>(bytes.size(), 4096)));
  std::size_t pos = 0;
  while ((pos = head.find("<meta", pos)) != std::string::npos) {
    const auto end = head.find('>', pos);
    const auto tag = head.substr(pos, end == std::string::npos ? std::string::npos : end - pos);
    pos += 5;
    const auto cs = tag.find("charset");
    if (cs == std::string::npos) continue;
    auto i = tag.find_first_not_of(" \t\r\n", cs + 7);
    if (i == std::string::npos || tag[i] != '=') continue;
    i = tag.find_first_not_of(" \t\r\n\"'", i + 1);
    if (i == std::string::npos) continue;
    const auto j = tag.find_first_of(" \t\r\n\"';/>", i);
    auto name = tag.substr(i, j == std::string::npos ? std::string::npos : j - i);
    if (!name.empty()) return name;
  }
  return std::nullopt;
}

inline std::string convert_to_utf8(std::string_view bytes, const std::string& charset) {
  UErrorCode status = U_ZERO_ERROR;
  std::unique_ptr<UConverter, decltype(&ucnv_close)> conv(ucnv_open(charset.c_str(), &status), &ucnv_close);
  if (U_FAILURE(status)) throw Error(ErrorCode::encoding, "unsupported charset '" + charset + "'");
  ucnv_setToUCallBack(conv.get(), UCNV_TO_U_CALLBACK_STOP, nullptr, nullptr, nullptr, &status);
  std::vector<UChar> buf(bytes.size() * 2 + 16);
  const auto n = ucnv_toUChars(conv.get(), buf.data(), static_cast<int32_t>(buf.size()), bytes.data(),
                               static_cast<int32_t>(bytes.size()), &status);
  if (U_FAILURE(status)) throw Error(ErrorCode::encoding, "bytes not decodable as " + charset);
  return text::from_unicode(icu::UnicodeString(buf.data(), n));
}

inline bool is_utf8_name(std::string_view cs) { return cs == "utf-8" || cs == "utf8"; }

}  // namespace detail

// Charset order: <meta charset>, then byte-order mark, then UTF-8.
inline std::string decode_document(std::string_view bytes) {
  const std::string_view bom8 = "\xEF\xBB\xBF";
  auto strip_bom8 = [&](std::string_view b) { return b.substr(0, 3) == bom8 ? b.substr(3) : b; };
  std::string out;
  if (auto cs = detail::meta_charset(bytes); cs && !detail::is_utf8_name(*cs)) {
    out = detail::convert_to_utf8(bytes, *cs);
  } else if (!cs && bytes.substr(0, 2) == "\xFF\xFE") {
    out = detail::convert_to_utf8(bytes.substr(2), "UTF-16LE");
  } else if (!cs && bytes.substr(0, 2) == "\xFE\xFF") {
    out = detail::convert_to_utf8(bytes.substr(2), "UTF-16BE");
  } else {
    out = std::string(strip_bom8(bytes));
    if (!text::is_valid_utf8(out)) throw Error(ErrorCode::encoding, "document is not valid UTF-8");
  }
  if (out.substr(0, 3) == bom8) out.erase(0, 3);
  return out;
}

struct HtmlElement {
  std::string tag;
  std::string text;  // whitespace-collapsed
  std::string lang;  // element's own lang attribute, else the document's
};

namespace detail {

inline const std::set<std::string, std::less<>>& block_tags() {
  static const std::set<std::string, std::less<>> s = {
      "address", "article", "aside", "blockquote", "body", "dd",     "div",   "dl",     "dt",     "fieldset",
      "figure",  "footer",  "form",  "h1",         "h2",   "h3",     "h4",    "h5",     "h6",     "head",
      "header",  "hr",      "html",  "li",         "main", "nav",    "ol",    "p",      "pre",    "section",
      "table",   "td",      "th",    "title",      "tr",   "ul",     "tbody", "thead", "caption", "option"};
  return s;
}

inline std::string decode_entity(std::string_view name) {
  if (name.empty()) return {};
  if (name[0] == '#') {
    long cp = 0;
    try {
      cp = (name.size() > 1 && (name[1] == 'x' || name[1] == 'X')) ? std::stol(std::string(name.substr(2)), nullptr, 16)
                                                                    : std::stol(std::string(name.substr(1)));
    } catch (...) {
      return {};
    }
    if (cp <= 0 || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return {};
    std::string out;
    text::append_utf8(out, static_cast<UChar32>(cp));
    return out;
  }
  static const std::pair<std::string_view, std::string_view> named[] = {
      {"amp", "&"},    {"lt", "<"},      {"gt", ">"},      {"quot", "\""},   {"apos", "'"},   {"nbsp", " "},
      {"copy", "©"},   {"reg", "®"},     {"trade", "™"},   {"eacute", "é"},  {"egrave", "è"}, {"agrave", "à"},
      {"ccedil", "ç"}, {"rsquo", "’"},   {"lsquo", "‘"},   {"ldquo", "“"},   {"rdquo", "”"},  {"ndash", "–"},
      {"mdash", "—"},  {"hellip", "…"},  {"laquo", "«"},   {"raquo", "»"},   {"euro", "€"},   {"uuml", "ü"},
      {"ouml", "ö"},   {"auml", "ä"},    {"szlig", "ß"},   {"ntilde", "ñ"},  {"ecirc", "ê"},  {"ocirc", "ô"}};
  for (const auto& [k, v] : named) {
    if (k == name) return std::string(v);
  }
  return {};
}

struct Tag {
  std::string name;
  bool closing = false;
  std::vector<std::pair<std::string, std::string>> attrs;

  std::string attr(std::string_view key) const {
    for (const auto& [k, v] : attrs) {
      if (k == key) return v;
    }
    return {};
  }
};

// Parses a tag starting at s[i] == '<'. Returns nullopt when the '<' does not
// open a tag, in which case it is literal text. Advances i past the '>'.
inline std::optional<Tag> parse_tag(std::string_view s, std::size_t& i) {
  std::size_t j = i + 1;
  Tag t;
  if (j < s.size() && s[j] == '/') {
    t.closing = true;
    ++j;
  }
  if (j >= s.size() || !std::isalpha(static_cast<unsigned char>(s[j]))) return std::nullopt;
  while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '-' || s[j] == ':')) {
    t.name.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(s[j]))));
    ++j;
  }
  auto skip_ws = [&] {
    while (j < s.size() && std::isspace(static_cast<unsigned char>(s[j]))) ++j;
  };
  for (;;) {
    skip_ws();
    if (j >= s.size()) break;
    if (s[j] == '>') {
      ++j;
      break;
    }
    if (s[j] == '/' || s[j] == '"' || s[j] == '\'' || s[j] == '=') {
      ++j;
      continue;
    }
    std::string key;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j])) && s[j] != '=' && s[j] != '>' &&
           s[j] != '/') {
      key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(s[j]))));
      ++j;
    }
    skip_ws();
    std::string value;
    if (j < s.size() && s[j] == '=') {
      ++j;
      skip_ws();
      if (j < s.size() && (s[j] == '"' || s[j] == '\'')) {
        const char q = s[j++];
        const auto e = s.find(q, j);
        value = std::string(s.substr(j, e == std::string_view::npos ? std::string_view::npos : e - j));
        j = e == std::string_view::npos ? s.size() : e + 1;
      } else {
        while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j])) && s[j] != '>') value.push_back(s[j++]);
      }
    }
    if (!key.empty()) t.attrs.emplace_back(std::move(key), std::move(value));
  }
  i = j;
  return t;
}

inline std::size_t find_ci(std::string_view hay, std::string_view needle, std::size_t from) {
  for (std::size_t i = from; i + needle.size() <= hay.size(); ++i) {
    bool ok = true;
    for (std::size_t k = 0; k < needle.size() && ok; ++k) {
      ok = std::tolower(static_cast<unsigned char>(hay[i + k])) == needle[k];
    }
    if (ok) return i;
  }
  return std::string_view::npos;
}

}  // namespace detail

// Text of every element whose tag is in `tags`, in document order.
inline std::vector<HtmlElement> scan_elements(std::string_view html, const std::set<std::string>& tags) {
  std::vector<HtmlElement> out;
  std::string doc_lang;
  std::optional<HtmlElement> cur;
  auto finish = [&] {
    if (!cur) return;
    cur->text = text::collapse_whitespace(cur->text);
    if (!cur->text.empty()) out.push_back(std::move(*cur));
    cur.reset();
  };
  std::size_t i = 0;
  while (i < html.size()) {
    const char c = html[i];
    if (c == '<') {
      if (html.substr(i, 4) == "<!--") {
        const auto e = html.find("-->", i + 4);
        i = e == std::string_view::npos ? html.size() : e + 3;
        continue;
      }
      if (i + 1 < html.size() && (html[i + 1] == '!' || html[i + 1] == '?')) {
        const auto e = html.find('>', i);
        i = e == std::string_view::npos ? html.size() : e + 1;
        continue;
      }
      auto tag = detail::parse_tag(html, i);
      if (!tag) {
        if (cur) cur->text.push_back('<');
        ++i;
        continue;
      }
      const bool block = detail::block_tags().count(tag->name) > 0;
      if (tag->closing) {
        if (cur && (tag->name == cur->tag || block)) finish();
        continue;
      }
      if (tag->name == "script" || tag->name == "style") {
        const auto e = detail::find_ci(html, "</" + tag->name, i);
        i = e == std::string_view::npos ? html.size() : e;
        continue;
      }
      if (tag->name == "html") doc_lang = tag->attr("lang");
      if (cur && (block || tags.count(tag->name))) finish();
      if (cur && tag->name == "br") cur->text.push_back(' ');
      if (tags.count(tag->name)) {
        const auto own = tag->attr("lang");
        cur = HtmlElement{tag->name, {}, own.empty() ? doc_lang : own};
      }
      continue;
    }
    if (c == '&') {
      const auto semi = html.find(';', i);
      if (semi != std::string_view::npos && semi - i <= 10) {
        const auto decoded = detail::decode_entity(html.substr(i + 1, semi - i - 1));
        if (!decoded.empty()) {
          if (cur) cur->text += decoded;
          i = semi + 1;
          continue;
        }
      }
    }
    if (cur) cur->text.push_back(c);
    ++i;
  }
  finish();
  return out;
}

}  // namespace lexiforge::ingest
