#pragma once

// Seeded generator for an end-to-end benchmark corpus with known answers:
// web pages and report texts that mention a planted lexicon of multi-token
// terms among distractor sentences, plus embeddings built from topic
// directions so the similarity gates behave predictably.
//
// Layout written under the output directory:
//   manifest.json, web/*.html, pdf/*.txt, lexicon.tsv, embeddings.txt,
//   novel_terms.tsv (unlisted terms planted in reports), config.json

#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "lexiforge/annotate/corpus.hpp"
#include "lexiforge/category.hpp"
#include "lexiforge/ingest/rules.hpp"
#include "lexiforge/rng.hpp"

namespace lexiforge::synthetic {

namespace fs = std::filesystem;
using annotate::json;

struct PlantedTerm {
  std::string text;
  Category category;
};

inline const std::vector<PlantedTerm>& planted_lexicon() {
  static const std::vector<PlantedTerm> t = {
      {"green energy", Category::sus},         {"circular economy", Category::sus},
      {"carbon footprint", Category::sus},     {"renewable materials", Category::sus},
      {"waste reduction", Category::sus},      {"digital twin", Category::dig},
      {"virtual reality", Category::dig},      {"cloud platform", Category::dig},
      {"data analytics", Category::dig},       {"machine learning", Category::dig},
      {"change management", Category::mag},    {"agile team", Category::mag},
      {"employee training", Category::mag},    {"leadership programme", Category::mag},
      {"remote work", Category::mag},          {"open innovation", Category::inn},
      {"design thinking", Category::inn},      {"innovation lab", Category::inn},
      {"idea management", Category::inn},      {"rapid prototyping", Category::inn},
      {"business model", Category::bus},       {"subscription service", Category::bus},
      {"value proposition", Category::bus},    {"platform economy", Category::bus},
      {"customer journey", Category::bus},     {"social responsibility", Category::cor},
      {"fair trade", Category::cor},           {"community engagement", Category::cor},
      {"ethical sourcing", Category::cor},     {"diversity policy", Category::cor},
  };
  return t;
}

// Plausible new terms that the lexicon does not list.
inline const std::vector<PlantedTerm>& novel_terms() {
  static const std::vector<PlantedTerm> t = {
      {"hydrogen storage", Category::sus}, {"edge computing", Category::dig}, {"hybrid working", Category::mag},
      {"frugal innovation", Category::inn}, {"sharing economy", Category::bus}, {"impact investing", Category::cor},
  };
  return t;
}

struct Options {
  std::size_t web_docs = 100;
  std::size_t pdf_docs = 100;
  std::uint64_t seed = 2024;
  std::size_t dim = 24;
  double novel_rate = 0.04;     // share of report term slots filled with an unlisted term
  double off_topic_rate = 0.1;  // share of documents padded with off-topic prose
};

namespace detail {

inline const std::vector<std::string>& term_templates() {
  static const std::vector<std::string> t = {
      "Our teams invest in {T} across the group .",
      "In 2020 the company expanded its work on {T} .",
      "{T} remains a priority for the board .",
      "We launched a new programme focused on {T} and {U} .",
      "Customers asked for more {T} in every market .",
      "The new plant relies on {T} to cut costs .",
      "A dedicated unit now leads {T} for all regions .",
      "Partners praised our approach to {T} this year .",
      "Managers reviewed progress on {T} with the staff .",
      "{T} and {U} shaped the annual plan .",
      "Several projects on {T} reached the market .",
      "We measure {T} in each business unit .",
  };
  return t;
}

inline const std::vector<std::string>& keyword_sentences() {
  static const std::vector<std::string> s = {
      "Innovation is at the heart of our strategy .",
      "Research and development guide our choices .",
      "Design shapes every product we build .",
      "Our strategy rests on steady innovation .",
      "We increased the development budget again .",
  };
  return s;
}

inline const std::vector<std::string>& subjects() {
  static const std::vector<std::string> s = {"The group", "Our team", "The board", "Management", "The company",
                                             "Our staff", "The sales unit", "Each region", "The network"};
  return s;
}
inline const std::vector<std::string>& verbs() {
  static const std::vector<std::string> s = {"reviewed", "approved", "reported", "improved", "opened",
                                             "reduced", "expanded", "discussed", "prepared", "signed"};
  return s;
}
inline const std::vector<std::string>& objects() {
  static const std::vector<std::string> s = {
      "the annual budget",  "a new office",         "the digital edition", "energy prices",
      "the open day",       "its data centre",      "the social fund",     "a supplier contract",
      "the product range",  "the service desk",     "the change log",      "the quarterly results",
      "a training room",    "the business plan",    "the customer survey", "the green roof",
      "the value chain",    "the platform release", "a design brief",      "the model year"};
  return s;
}
inline const std::vector<std::string>& tails() {
  static const std::vector<std::string> s = {"in March", "last year", "in Lyon", "on time", "with partners",
                                             "for the region", "in the second half", "after the audit"};
  return s;
}

inline const std::vector<std::string>& off_topic_sentences() {
  static const std::vector<std::string> s = {
      "The football match ended with a late goal in the rain .",
      "Snow and wind closed the stadium before the concert .",
      "The festival offered music , cake and a beach party .",
      "Heavy rain spoiled the holiday at the beach .",
      "The chef baked a cake for the football team supporters .",
      "Fans sang in the stadium while the snow kept falling .",
  };
  return s;
}

inline const std::vector<std::string>& filler_words() {
  static const std::vector<std::string> s = {
      "group",   "team",     "board",   "management", "company", "staff",   "sales",    "unit",    "region",
      "network", "reviewed", "approved", "reported",  "improved", "opened", "reduced",  "expanded", "discussed",
      "prepared", "signed",  "annual",  "budget",     "office",  "digital", "edition",  "energy",  "prices",
      "open",    "day",      "data",    "centre",     "social",  "fund",    "supplier", "contract", "product",
      "range",   "service",  "desk",    "change",     "log",     "quarterly", "results", "training", "room",
      "business", "plan",    "customer", "survey",    "green",   "roof",    "value",    "chain",   "platform",
      "release", "brief",    "model",   "year",       "march",   "lyon",    "time",     "partners", "second",
      "half",    "audit",    "teams",   "invest",     "expanded", "work",   "priority", "customers", "market",
      "plant",   "relies",   "cut",     "costs",      "dedicated", "leads", "regions",  "praised", "approach",
      "managers", "progress", "shaped", "projects",   "reached", "measure", "launched", "programme", "focused",
      "asked",   "product",  "build",   "choices",    "budget",  "heart",   "steady",   "increased", "report",
      "company", "customers"};
  return s;
}

inline const std::vector<std::string>& off_topic_words() {
  static const std::vector<std::string> s = {"football", "match", "goal",   "rain",  "snow",   "wind",
                                             "stadium",  "concert", "festival", "music", "cake", "beach",
                                             "party",    "holiday", "chef",   "baked", "fans",   "sang",
                                             "falling",  "supporters", "spoiled", "heavy", "late", "ended"};
  return s;
}

inline const std::vector<std::string>& keyword_words() {
  static const std::vector<std::string> s = {"innovation", "research", "recherche", "development", "strategy", "design"};
  return s;
}

inline std::string capitalize(std::string s) {
  if (!s.empty() && s[0] >= 'a' && s[0] <= 'z') s[0] = static_cast<char>(s[0] - 'a' + 'A');
  return s;
}

// Tokens are space separated; punctuation tokens attach to the left.
inline std::string detokenize(const std::string& s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == ' ' && i + 1 < s.size() && (s[i + 1] == '.' || s[i + 1] == ',') &&
        (i + 2 == s.size() || s[i + 2] == ' ')) {
      continue;
    }
    out.push_back(s[i]);
  }
  return out;
}

class Writer {
 public:
  Writer(const Options& opt) : opt_(opt), rng_(derive_seed(opt.seed, "synthetic")) {}

  template <class T>
  const T& pick(const std::vector<T>& v) {
    return v[uniform_index(rng_, v.size())];
  }
  bool chance(double p) { return uniform_unit(rng_) < p; }

  const PlantedTerm& term(bool allow_novel) {
    if (allow_novel && chance(opt_.novel_rate)) return pick(novel_terms());
    return pick(planted_lexicon());
  }

  std::string term_sentence(bool allow_novel) {
    std::string s = pick(term_templates());
    const auto& t = term(allow_novel);
    const PlantedTerm* u = &term(allow_novel);
    while (u->text == t.text) u = &term(allow_novel);
    replace(s, "{T}", t.text);
    replace(s, "{U}", u->text);
    return detokenize(capitalize(s));
  }

  std::string distractor() {
    return pick(subjects()) + " " + pick(verbs()) + " " + pick(objects()) + " " + pick(tails()) + ".";
  }

  std::string keyword_sentence() { return detokenize(pick(keyword_sentences())); }
  std::string off_topic() { return detokenize(pick(off_topic_sentences())); }

  // Sentences of one paragraph: roughly half carry terms.
  std::vector<std::string> paragraph(bool allow_novel, bool with_keyword, bool off_topic_doc) {
    std::vector<std::string> out;
    if (with_keyword) out.push_back(keyword_sentence());
    const std::size_t n = 3 + uniform_index(rng_, 3);
    for (std::size_t i = 0; i < n; ++i) {
      if (off_topic_doc) out.push_back(chance(0.25) ? term_sentence(allow_novel) : off_topic());
      else out.push_back(chance(0.5) ? term_sentence(allow_novel) : distractor());
    }
    return out;
  }

  std::uint64_t next() { return rng_(); }

 private:
  static void replace(std::string& s, const std::string& from, const std::string& to) {
    for (auto p = s.find(from); p != std::string::npos; p = s.find(from, p + to.size())) s.replace(p, from.size(), to);
  }
  Options opt_;
  Rng rng_;
};

inline std::string join_sentences(const std::vector<std::string>& v) {
  std::string out;
  for (const auto& s : v) out += (out.empty() ? "" : " ") + s;
  return out;
}

// Topic directions: one shared "innovation" axis, one per category, one
// off-topic axis; other words get a random direction mixed with the shared one.
inline void write_embeddings(const fs::path& path, const Options& opt) {
  Rng rng(derive_seed(opt.seed, "embeddings"));
  const std::size_t d = opt.dim;
  auto gaussian = [&] {
    // Box-Muller on two uniforms.
    const double u1 = 1.0 - uniform_unit(rng), u2 = uniform_unit(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  };
  auto random_unit = [&] {
    std::vector<double> v(d);
    double n = 0;
    for (auto& x : v) n += (x = gaussian()) * x;
    for (auto& x : v) x /= std::sqrt(n);
    return v;
  };
  // Orthonormal axes by Gram-Schmidt on random vectors.
  std::vector<std::vector<double>> axes;
  for (std::size_t k = 0; k < 8; ++k) {
    auto v = random_unit();
    for (const auto& a : axes) {
      double dot = 0;
      for (std::size_t i = 0; i < d; ++i) dot += v[i] * a[i];
      for (std::size_t i = 0; i < d; ++i) v[i] -= dot * a[i];
    }
    double n = 0;
    for (double x : v) n += x * x;
    for (auto& x : v) x /= std::sqrt(n);
    axes.push_back(v);
  }
  const auto& shared = axes[0];
  const auto& off = axes[7];
  auto cat_axis = [&](Category c) -> const std::vector<double>& { return axes[1 + static_cast<std::size_t>(c)]; };

  std::map<std::string, std::vector<double>> vec;
  auto mix = [&](std::vector<std::pair<double, const std::vector<double>*>> parts, double noise) {
    std::vector<double> v(d, 0.0);
    for (const auto& [w, a] : parts) {
      for (std::size_t i = 0; i < d; ++i) v[i] += w * (*a)[i];
    }
    const auto r = random_unit();
    for (std::size_t i = 0; i < d; ++i) v[i] += noise * r[i];
    return v;
  };
  for (const auto& w : keyword_words()) vec[w] = mix({{1.0, &shared}}, 0.3);
  std::map<std::string, std::set<Category>> term_words;
  for (const auto* list : {&planted_lexicon(), &novel_terms()}) {
    for (const auto& t : *list) {
      for (const auto& w : text::split_spaces(t.text)) term_words[w].insert(t.category);
    }
  }
  for (const auto& [w, cats] : term_words) {
    if (vec.count(w)) continue;
    std::vector<std::pair<double, const std::vector<double>*>> parts = {{0.6, &shared}};
    for (auto c : cats) parts.push_back({1.0 / static_cast<double>(cats.size()), &cat_axis(c)});
    vec[w] = mix(parts, 0.2);
  }
  for (const auto& w : filler_words()) {
    if (vec.count(w)) continue;
    vec[w] = mix({{0.4, &shared}}, 0.6);
  }
  for (const auto& w : off_topic_words()) {
    if (vec.count(w)) continue;
    vec[w] = mix({{3.0, &off}}, 0.6);
  }
  std::ofstream out(path, std::ios::binary);
  out << vec.size() << ' ' << d << '\n';
  char buf[32];
  for (const auto& [w, v] : vec) {
    out << w;
    for (double x : v) {
      std::snprintf(buf, sizeof buf, " %.6f", x);
      out << buf;
    }
    out << '\n';
  }
}

}  // namespace detail

struct Layout {
  fs::path root;
  fs::path manifest() const { return root / "manifest.json"; }
  fs::path lexicon() const { return root / "lexicon.tsv"; }
  fs::path embeddings() const { return root / "embeddings.txt"; }
  fs::path novel() const { return root / "novel_terms.tsv"; }
  fs::path config() const { return root / "config.json"; }
};

inline Layout generate(const fs::path& root, const Options& opt = {}) {
  fs::create_directories(root / "web");
  fs::create_directories(root / "pdf");
  detail::Writer w(opt);
  const auto& sectors = ingest::sector_labels();
  json manifest = json::array();
  char name[64];

  for (std::size_t i = 0; i < opt.web_docs; ++i) {
    std::snprintf(name, sizeof name, "web%03zu", i);
    const std::string company = "Company" + std::to_string(i);
    const bool off = w.chance(opt.off_topic_rate);
    std::ostringstream html;
    html << "<!DOCTYPE html>\n<html lang=\"en\">\n<head><meta charset=\"utf-8\"><title>" << company
         << " | innovation and design</title></head>\n<body>\n";
    const std::size_t paragraphs = 4 + w.next() % 3;
    for (std::size_t p = 0; p < paragraphs; ++p) {
      html << "<p>" << detail::join_sentences(w.paragraph(false, true, off)) << "</p>\n";
    }
    html << "<p>" << detail::join_sentences({w.distractor(), w.distractor()}) << "</p>\n";
    html << "<div>" << w.keyword_sentence() << "</div>\n</body>\n</html>\n";
    std::ofstream(root / "web" / (std::string(name) + ".html"), std::ios::binary) << html.str();
    manifest.push_back({{"doc_id", name},
                        {"path", std::string("web/") + name + ".html"},
                        {"url", "https://company" + std::to_string(i) + ".example/"},
                        {"company", company},
                        {"sector", sectors[i % sectors.size()]},
                        {"kind", "html"}});
  }
  for (std::size_t i = 0; i < opt.pdf_docs; ++i) {
    std::snprintf(name, sizeof name, "pdf%03zu", i);
    const bool off = w.chance(opt.off_topic_rate);
    std::ostringstream txt;
    txt << "Annual report of Company" << (i % std::max<std::size_t>(opt.web_docs, 1)) << " for the year 2020.\n\n";
    const std::size_t paragraphs = 4 + w.next() % 3;
    for (std::size_t p = 0; p < paragraphs; ++p) {
      txt << detail::join_sentences(w.paragraph(true, p == 0, off)) << "\n\n";
    }
    std::ofstream(root / "pdf" / (std::string(name) + ".txt"), std::ios::binary) << txt.str();
    manifest.push_back({{"doc_id", name},
                        {"path", std::string("pdf/") + name + ".txt"},
                        {"url", "https://reports.example/" + std::string(name) + ".pdf"},
                        {"company", "Company" + std::to_string(i)},
                        {"sector", sectors[i % sectors.size()]},
                        {"kind", "text"}});
  }
  Layout layout{root};
  std::ofstream(layout.manifest(), std::ios::binary) << manifest.dump(2) << '\n';
  {
    std::ofstream lex(layout.lexicon(), std::ios::binary);
    lex << "surface\tcategory\n";
    for (const auto& t : planted_lexicon()) lex << t.text << '\t' << code(t.category) << '\n';
  }
  {
    std::ofstream nov(layout.novel(), std::ios::binary);
    nov << "surface\tcategory\n";
    for (const auto& t : novel_terms()) nov << t.text << '\t' << code(t.category) << '\n';
  }
  detail::write_embeddings(layout.embeddings(), opt);
  const json config = {{"paths",
                        {{"manifest", "manifest.json"},
                         {"lexicon", "lexicon.tsv"},
                         {"embeddings", "embeddings.txt"},
                         {"workdir", "work"}}},
                       {"seed", opt.seed},
                       {"split", {{"schemes", {1}}}},
                       {"models", {"linear-crf", "cnn-crf"}}};
  std::ofstream(layout.config(), std::ios::binary) << config.dump(2) << '\n';
  return layout;
}

}  // namespace lexiforge::synthetic
