#pragma once

// Report rendering. Model-quality tables come in Précision / Rappel / F1-Score
// blocks with one column per dataset scheme and a Moyenne (row mean) column,
// values to 4 decimals. Acceptance tables give "count (rate%)" per scheme
// and a "% Moyenne" column, rates to 2 decimals. Each has a TSV twin at full
// precision that parses back losslessly.

#include <cstdio>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "lexiforge/error.hpp"
#include "lexiforge/eval/metrics.hpp"

namespace lexiforge::eval {

inline constexpr int kSchemes[] = {1, 2, 3, 4};

struct MetricCell {
  std::string model_id;
  int scheme_id = 1;
  Level level = Level::entity;
  double precision = 0, recall = 0, f1 = 0;

  bool operator==(const MetricCell&) const = default;
};

inline MetricCell make_cell(std::string model, int scheme, Level level, const Prf& m) {
  return {std::move(model), scheme, level, m.precision, m.recall, m.f1};
}

struct AcceptanceCell {
  std::string model_id;
  int scheme_id = 1;
  std::size_t generated = 0;  // candidates proposed (multi-token only)
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t deferred = 0;

  // Percentage over decided candidates; deferred ones stay out of both terms.
  double rate() const {
    const auto decided = accepted + rejected;
    return decided ? 100.0 * static_cast<double>(accepted) / static_cast<double>(decided) : 0.0;
  }

  bool operator==(const AcceptanceCell&) const = default;
};

inline std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

inline std::string full_precision(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline double mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

namespace detail {

inline std::vector<std::string> model_order(const std::vector<std::string>& ids) {
  std::vector<std::string> order;
  for (const auto& id : ids) {
    if (std::find(order.begin(), order.end(), id) == order.end()) order.push_back(id);
  }
  return order;
}

inline void table_header(std::ostream& out, const std::string& title, const std::string& last) {
  out << "### " << title << "\n\n| Modèle |";
  for (int s : kSchemes) out << " Jeu " << s << " |";
  out << ' ' << last << " |\n|---|";
  for (std::size_t i = 0; i < std::size(kSchemes); ++i) out << "---:|";
  out << "---:|\n";
}

}  // namespace detail

inline void render_table3(std::ostream& out, const std::vector<MetricCell>& cells, Level level) {
  std::vector<std::string> ids;
  for (const auto& c : cells) {
    if (c.level == level) ids.push_back(c.model_id);
  }
  const auto models = detail::model_order(ids);
  const char* titles[] = {"Précision", "Rappel", "F1-Score"};
  for (int metric = 0; metric < 3; ++metric) {
    if (metric) out << '\n';
    detail::table_header(out, std::string(titles[metric]) + " (" + std::string(to_string(level)) + ")", "Moyenne");
    for (const auto& m : models) {
      out << "| " << m << " |";
      std::vector<double> row;
      for (int s : kSchemes) {
        const MetricCell* found = nullptr;
        for (const auto& c : cells) {
          if (c.model_id == m && c.scheme_id == s && c.level == level) found = &c;
        }
        if (!found) {
          out << " - |";
          continue;
        }
        const double v = metric == 0 ? found->precision : metric == 1 ? found->recall : found->f1;
        row.push_back(v);
        out << ' ' << fixed(v, 4) << " |";
      }
      out << ' ' << (row.empty() ? std::string("-") : fixed(mean(row), 4)) << " |\n";
    }
  }
}

inline void render_table4(std::ostream& out, const std::vector<AcceptanceCell>& cells) {
  std::vector<std::string> ids;
  for (const auto& c : cells) ids.push_back(c.model_id);
  detail::table_header(out, "Nouveaux termes (taux d'acceptation)", "% Moyenne");
  for (const auto& m : detail::model_order(ids)) {
    out << "| " << m << " |";
    std::vector<double> rates;
    for (int s : kSchemes) {
      const AcceptanceCell* found = nullptr;
      for (const auto& c : cells) {
        if (c.model_id == m && c.scheme_id == s) found = &c;
      }
      if (!found) {
        out << " - |";
        continue;
      }
      rates.push_back(found->rate());
      out << ' ' << found->generated << " (" << fixed(found->rate(), 2) << "%) |";
    }
    out << ' ' << (rates.empty() ? std::string("-") : fixed(mean(rates), 2)) << " |\n";
  }
}

inline constexpr const char* kMetricTsvHeader = "model\tscheme\tlevel\tprecision\trecall\tf1";
inline constexpr const char* kAcceptanceTsvHeader = "model\tscheme\tgenerated\taccepted\trejected\tdeferred\trate";

inline void write_metrics_tsv(std::ostream& out, const std::vector<MetricCell>& cells) {
  out << kMetricTsvHeader << '\n';
  for (const auto& c : cells) {
    out << c.model_id << '\t' << c.scheme_id << '\t' << to_string(c.level) << '\t' << full_precision(c.precision)
        << '\t' << full_precision(c.recall) << '\t' << full_precision(c.f1) << '\n';
  }
}

inline void write_acceptance_tsv(std::ostream& out, const std::vector<AcceptanceCell>& cells) {
  out << kAcceptanceTsvHeader << '\n';
  for (const auto& c : cells) {
    out << c.model_id << '\t' << c.scheme_id << '\t' << c.generated << '\t' << c.accepted << '\t' << c.rejected
        << '\t' << c.deferred << '\t' << full_precision(c.rate()) << '\n';
  }
}

namespace detail {

inline std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    out.push_back(line.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
    if (tab == std::string::npos) return out;
    start = tab + 1;
  }
}

inline double parse_double(const std::string& s, std::size_t line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::parse, "line " + std::to_string(line) + ": bad number '" + s + "'");
}

inline std::size_t parse_count(const std::string& s, std::size_t line) {
  const double v = parse_double(s, line);
  if (v < 0 || v != static_cast<double>(static_cast<std::size_t>(v))) {
    throw Error(ErrorCode::parse, "line " + std::to_string(line) + ": bad count '" + s + "'");
  }
  return static_cast<std::size_t>(v);
}

}  // namespace detail

inline std::vector<MetricCell> read_metrics_tsv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kMetricTsvHeader) throw Error(ErrorCode::parse, "missing metrics header");
  std::vector<MetricCell> out;
  std::size_t n = 1;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    const auto f = detail::split_tabs(line);
    if (f.size() != 6) throw Error(ErrorCode::parse, "line " + std::to_string(n) + ": expected 6 columns");
    MetricCell c;
    c.model_id = f[0];
    c.scheme_id = static_cast<int>(detail::parse_count(f[1], n));
    if (f[2] == "token") c.level = Level::token;
    else if (f[2] == "entity") c.level = Level::entity;
    else throw Error(ErrorCode::parse, "line " + std::to_string(n) + ": bad level '" + f[2] + "'");
    c.precision = detail::parse_double(f[3], n);
    c.recall = detail::parse_double(f[4], n);
    c.f1 = detail::parse_double(f[5], n);
    out.push_back(c);
  }
  return out;
}

inline std::vector<AcceptanceCell> read_acceptance_tsv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kAcceptanceTsvHeader) throw Error(ErrorCode::parse, "missing acceptance header");
  std::vector<AcceptanceCell> out;
  std::size_t n = 1;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    const auto f = detail::split_tabs(line);
    if (f.size() != 7) throw Error(ErrorCode::parse, "line " + std::to_string(n) + ": expected 7 columns");
    AcceptanceCell c;
    c.model_id = f[0];
    c.scheme_id = static_cast<int>(detail::parse_count(f[1], n));
    c.generated = detail::parse_count(f[2], n);
    c.accepted = detail::parse_count(f[3], n);
    c.rejected = detail::parse_count(f[4], n);
    c.deferred = detail::parse_count(f[5], n);
    out.push_back(c);
  }
  return out;
}

}  // namespace lexiforge::eval
