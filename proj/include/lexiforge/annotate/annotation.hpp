#pragma once

// The inline annotation format: one <phrase> element per sentence, with
// lexicon hits wrapped in <mot> elements.
//
//   <phrase category='Digital transformation' values='virtual reality'>
//     we offer 3D <mot category='Digital transformation'>virtual reality</mot> simulators.</phrase>
//
// `values` holds one entry per <mot>, "; "-separated; a macro-term entry lists
// its constituent terms joined by " | ". Attribute values escape ' & <; text
// content escapes & <.

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lexiforge/annotate/match.hpp"
#include "lexiforge/annotate/sentence.hpp"
#include "lexiforge/category.hpp"
#include "lexiforge/error.hpp"

namespace lexiforge::annotate {

inline std::string escape_attribute(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '\'': out += "&apos;"; break;
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      default: out += c;
    }
  }
  return out;
}

inline std::string escape_text(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      default: out += c;
    }
  }
  return out;
}

// One entry per span; a macro-term lists its constituents joined by " | ".
inline std::string span_value(const TermSpan& span) {
  if (span.is_macro && !span.constituents.empty()) return text::join(span.constituents, " | ");
  return span.canonical;
}

inline std::string emit_annotation(const Sentence& s, const std::vector<TermSpan>& spans) {
  std::string out = "<phrase";
  if (!spans.empty()) {
    std::vector<std::string> values;
    for (const auto& sp : spans) values.push_back(span_value(sp));
    out += " category='";
    out += escape_attribute(annotation_label(spans.front().category));
    out += "' values='";
    out += escape_attribute(text::join(values, "; "));
    out += "'";
  }
  out += ">";
  std::size_t pos = 0;
  for (const auto& sp : spans) {
    const auto b = s.offsets[sp.start].first;
    const auto e = s.offsets[sp.end - 1].second;
    out += escape_text(std::string_view(s.text).substr(pos, b - pos));
    out += "<mot category='";
    out += escape_attribute(annotation_label(sp.category));
    out += "'>";
    out += escape_text(std::string_view(s.text).substr(b, e - b));
    out += "</mot>";
    pos = e;
  }
  out += escape_text(std::string_view(s.text).substr(pos));
  out += "</phrase>";
  return out;
}

struct ParsedAnnotation {
  Sentence sentence;
  std::vector<TermSpan> spans;
};

namespace detail {

class AnnotationParser {
 public:
  explicit AnnotationParser(std::string_view in) : in_(in) {}

  ParsedAnnotation parse() {
    skip_space();
    expect("<phrase");
    auto phrase_attrs = attributes();
    if (auto it = find_attr(phrase_attrs, "category"); it && !category_from_label(*it)) {
      fail("unknown category label '" + *it + "'");
    }
    std::vector<std::string> values;
    if (auto it = find_attr(phrase_attrs, "values"); it && !it->empty()) values = split_on(*it, "; ");

    std::string flat;
    struct RawSpan {
      std::size_t begin, end;
      Category category;
    };
    std::vector<RawSpan> raw;
    bool closed = false;
    while (pos_ < in_.size()) {
      if (starts_with("</phrase>")) {
        pos_ += 9;
        closed = true;
        break;
      }
      if (starts_with("</mot>")) fail("unbalanced </mot>");
      if (starts_with("<mot")) {
        pos_ += 4;
        auto attrs = attributes();
        auto cat_label = find_attr(attrs, "category");
        if (!cat_label) fail("<mot> without category");
        auto cat = category_from_label(*cat_label);
        if (!cat) fail("unknown category label '" + *cat_label + "'");
        const std::size_t b = flat.size();
        while (true) {
          if (pos_ >= in_.size()) fail("unbalanced: unterminated <mot>");
          if (starts_with("</mot>")) {
            pos_ += 6;
            break;
          }
          if (starts_with("<mot")) fail("nested <mot>");
          if (in_[pos_] == '<') fail("unbalanced: tag inside <mot>");
          flat += text_char();
        }
        raw.push_back({b, flat.size(), *cat});
        continue;
      }
      if (in_[pos_] == '<') fail("unexpected tag");
      flat += text_char();
    }
    if (!closed) fail("unbalanced: missing </phrase>");
    skip_space();
    if (pos_ != in_.size()) fail("trailing content after </phrase>");

    ParsedAnnotation out;
    out.sentence = make_sentence(std::move(flat));
    const auto& offs = out.sentence.offsets;
    std::size_t vi = 0;
    for (const auto& r : raw) {
      TermSpan sp;
      sp.category = r.category;
      sp.is_macro = r.category == Category::mac;
      sp.start = token_at_begin(offs, r.begin);
      sp.end = token_at_end(offs, r.end) + 1;
      if (sp.end <= sp.start) fail("empty <mot>");
      const std::string surface = surface_text(out.sentence, sp.start, sp.end);
      if (vi < values.size()) {
        const std::string& v = values[vi++];
        if (sp.is_macro) {
          sp.canonical = text::normalize_term(surface);
          sp.constituents = split_on(v, " | ");
        } else {
          sp.canonical = v;
        }
      } else if (!values.empty()) {
        fail("values attribute does not match the <mot> elements");
      } else {
        sp.canonical = text::normalize_term(surface);
      }
      out.spans.push_back(std::move(sp));
    }
    if (!values.empty() && vi != values.size()) fail("values attribute does not match the <mot> elements");
    return out;
  }

 private:
  using Attrs = std::vector<std::pair<std::string, std::string>>;

  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorCode::parse, what + " at position " + std::to_string(pos_));
  }

  bool starts_with(std::string_view s) const { return in_.substr(pos_, s.size()) == s; }

  void expect(std::string_view s) {
    if (!starts_with(s)) fail("expected '" + std::string(s) + "'");
    pos_ += s.size();
  }

  void skip_space() {
    while (pos_ < in_.size() && (in_[pos_] == ' ' || in_[pos_] == '\t' || in_[pos_] == '\n' || in_[pos_] == '\r')) ++pos_;
  }

  static std::optional<std::string> find_attr(const Attrs& attrs, std::string_view name) {
    for (const auto& [k, v] : attrs) {
      if (k == name) return v;
    }
    return std::nullopt;
  }

  Attrs attributes() {
    Attrs attrs;
    while (true) {
      skip_space();
      if (pos_ >= in_.size()) fail("unbalanced: unterminated tag");
      if (in_[pos_] == '>') {
        ++pos_;
        return attrs;
      }
      const std::size_t name_begin = pos_;
      while (pos_ < in_.size() && (std::isalnum(static_cast<unsigned char>(in_[pos_])) || in_[pos_] == '_' || in_[pos_] == '-')) ++pos_;
      if (pos_ == name_begin) fail("malformed attribute");
      std::string name(in_.substr(name_begin, pos_ - name_begin));
      skip_space();
      expect("=");
      skip_space();
      if (pos_ >= in_.size() || (in_[pos_] != '\'' && in_[pos_] != '"')) fail("attribute value must be quoted");
      const char quote = in_[pos_++];
      std::string value;
      while (true) {
        if (pos_ >= in_.size()) fail("unterminated attribute value");
        if (in_[pos_] == quote) {
          ++pos_;
          break;
        }
        if (in_[pos_] == '<') fail("'<' inside attribute value");
        value += text_char();
      }
      attrs.emplace_back(std::move(name), std::move(value));
    }
  }

  // One decoded character (or entity) of text/attribute content.
  std::string text_char() {
    if (in_[pos_] != '&') return std::string(1, in_[pos_++]);
    static constexpr std::pair<std::string_view, std::string_view> kEntities[] = {
        {"&amp;", "&"}, {"&lt;", "<"}, {"&gt;", ">"}, {"&apos;", "'"}, {"&quot;", "\""}};
    for (const auto& [ent, ch] : kEntities) {
      if (starts_with(ent)) {
        pos_ += ent.size();
        return std::string(ch);
      }
    }
    fail("unknown entity");
  }

  static std::vector<std::string> split_on(const std::string& v, std::string_view sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
      const auto at = v.find(sep, start);
      out.push_back(v.substr(start, at == std::string::npos ? std::string::npos : at - start));
      if (at == std::string::npos) break;
      start = at + sep.size();
    }
    return out;
  }

  std::size_t token_at_begin(const std::vector<Offset>& offs, std::size_t b) const {
    for (std::size_t i = 0; i < offs.size(); ++i) {
      if (offs[i].first == b) return i;
    }
    fail("<mot> start does not fall on a token boundary");
  }

  std::size_t token_at_end(const std::vector<Offset>& offs, std::size_t e) const {
    for (std::size_t i = 0; i < offs.size(); ++i) {
      if (offs[i].second == e) return i;
    }
    fail("<mot> end does not fall on a token boundary");
  }

  std::string_view in_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline ParsedAnnotation parse_annotation(std::string_view annotated) {
  return detail::AnnotationParser(annotated).parse();
}

}  // namespace lexiforge::annotate
