#pragma once

// Expert review over a durable, append-only decisions log. Every verdict is
// written and fsync'ed before the next candidate is shown, so an interrupted
// session resumes without losing anything. A log that fails to parse is never
// rewritten; the session refuses to start instead.

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <ctime>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "lexiforge/eval/report.hpp"
#include "lexiforge/extract/candidates.hpp"

namespace lexiforge::extract {

enum class Verdict { accepted, rejected, deferred };

inline std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::accepted: return "accepted";
    case Verdict::rejected: return "rejected";
    case Verdict::deferred: return "deferred";
  }
  return "?";
}

inline Verdict parse_verdict(std::string_view s) {
  if (s == "accepted") return Verdict::accepted;
  if (s == "rejected") return Verdict::rejected;
  if (s == "deferred") return Verdict::deferred;
  throw Error(ErrorCode::parse, "unknown verdict '" + std::string(s) + "'");
}

using CandidateKey = std::tuple<std::string, int, std::string>;  // model, scheme, canonical

inline CandidateKey key_of(const CandidateTerm& c) { return {c.model_id, c.scheme_id, c.canonical}; }

struct ReviewDecision {
  std::string model_id;
  int scheme_id = 1;
  std::string canonical;
  Verdict verdict = Verdict::deferred;
  std::string reviewer;
  std::string note;
  std::string timestamp;
  std::optional<Category> category;  // reviewer's category, when overriding the prediction

  CandidateKey key() const { return {model_id, scheme_id, canonical}; }
  bool operator==(const ReviewDecision&) const = default;
};

inline json to_json(const ReviewDecision& d) {
  json j;
  j["model_id"] = d.model_id;
  j["scheme_id"] = d.scheme_id;
  j["canonical"] = d.canonical;
  j["verdict"] = to_string(d.verdict);
  j["reviewer"] = d.reviewer;
  j["note"] = d.note;
  j["timestamp"] = d.timestamp;
  if (d.category) j["category"] = code(*d.category);
  return j;
}

inline ReviewDecision decision_from_json(const json& j) {
  ReviewDecision d;
  d.model_id = j.at("model_id").get<std::string>();
  d.scheme_id = j.at("scheme_id").get<int>();
  d.canonical = j.at("canonical").get<std::string>();
  d.verdict = parse_verdict(j.at("verdict").get<std::string>());
  d.reviewer = j.value("reviewer", std::string{});
  d.note = j.value("note", std::string{});
  d.timestamp = j.value("timestamp", std::string{});
  if (j.contains("category")) {
    const auto c = category_from_code(j.at("category").get<std::string>());
    if (!c) throw Error(ErrorCode::bad_category, j.at("category").get<std::string>());
    d.category = *c;
  }
  return d;
}

inline std::vector<ReviewDecision> read_decisions(std::istream& in, ErrorCode on_error = ErrorCode::parse) {
  std::vector<ReviewDecision> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    try {
      out.push_back(decision_from_json(json::parse(line)));
    } catch (const json::exception& e) {
      throw Error(on_error, "decisions line " + std::to_string(n) + ": " + e.what());
    } catch (const Error& e) {
      throw Error(on_error, "decisions line " + std::to_string(n) + ": " + e.what());
    }
  }
  return out;
}

// Latest verdict per candidate; later lines win.
inline std::map<CandidateKey, ReviewDecision> latest_decisions(const std::vector<ReviewDecision>& log) {
  std::map<CandidateKey, ReviewDecision> out;
  for (const auto& d : log) out.insert_or_assign(d.key(), d);
  return out;
}

inline std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

class DecisionLog {
 public:
  explicit DecisionLog(std::string path) : path_(std::move(path)) {
    {
      std::ifstream in(path_);
      if (in) {
        std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        // A torn final line from a crash mid-write is still corruption.
        if (!content.empty() && content.back() != '\n') {
          throw Error(ErrorCode::corrupt_state, path_ + ": truncated final line");
        }
        std::istringstream ss(content);
        decisions_ = read_decisions(ss, ErrorCode::corrupt_state);
      }
    }
    fd_ = ::open(path_.c_str(), O_WRONLY | O_APPEND | O_CREAT | O_CLOEXEC, 0644);
    if (fd_ < 0) throw Error(ErrorCode::io, path_ + ": " + std::strerror(errno));
  }
  ~DecisionLog() {
    if (fd_ >= 0) ::close(fd_);
  }
  DecisionLog(const DecisionLog&) = delete;
  DecisionLog& operator=(const DecisionLog&) = delete;

  const std::vector<ReviewDecision>& decisions() const { return decisions_; }
  const std::string& path() const { return path_; }

  void append(const ReviewDecision& d) {
    const auto line = to_json(d).dump() + "\n";
    std::size_t off = 0;
    while (off < line.size()) {
      const auto w = ::write(fd_, line.data() + off, line.size() - off);
      if (w < 0) {
        if (errno == EINTR) continue;
        throw Error(ErrorCode::io, path_ + ": " + std::strerror(errno));
      }
      off += static_cast<std::size_t>(w);
    }
    if (::fsync(fd_) != 0) throw Error(ErrorCode::io, path_ + ": fsync: " + std::strerror(errno));
    decisions_.push_back(d);
  }

 private:
  std::string path_;
  int fd_ = -1;
  std::vector<ReviewDecision> decisions_;
};

struct SessionOptions {
  std::string reviewer = "expert";
  std::size_t max_contexts = 3;
  std::function<std::string()> clock = utc_timestamp;
};

struct SessionResult {
  std::size_t presented = 0;
  std::size_t decided = 0;
  bool quit = false;  // explicit quit or end of input before the last candidate
};

// Pending = never decided, or only deferred so far.
inline std::vector<const CandidateTerm*> pending_candidates(const std::vector<CandidateTerm>& candidates,
                                                            const DecisionLog& log) {
  const auto latest = latest_decisions(log.decisions());
  std::vector<const CandidateTerm*> out;
  for (const auto& c : candidates) {
    auto it = latest.find(key_of(c));
    if (it == latest.end() || it->second.verdict == Verdict::deferred) out.push_back(&c);
  }
  return out;
}

// One line per answer: `a [category]`, `r`, `d` or `q`; anything after `#` is
// kept as the note. End of input behaves like `q`.
inline SessionResult review_session(const std::vector<CandidateTerm>& candidates, DecisionLog& log,
                                    std::istream& keys, std::ostream& out, const SessionOptions& opt = {}) {
  SessionResult res;
  const auto pending = pending_candidates(candidates, log);
  for (std::size_t i = 0; i < pending.size(); ++i) {
    const auto& c = *pending[i];
    ++res.presented;
    out << "[" << (i + 1) << "/" << pending.size() << "] " << c.canonical << "  (" << code(c.category)
        << ", similarity " << eval::fixed(c.similarity, 3) << ", " << c.model_id << " scheme " << c.scheme_id << ")\n";
    for (std::size_t k = 0; k < c.occurrences.size() && k < opt.max_contexts; ++k) {
      out << "    " << c.occurrences[k].doc_id << "#" << c.occurrences[k].sentence_index << ": "
          << c.occurrences[k].context << "\n";
    }
    for (;;) {
      out << "accept / reject / defer / quit [a/r/d/q]? " << std::flush;
      std::string line;
      if (!std::getline(keys, line)) {
        out << "\n";
        res.quit = true;
        return res;
      }
      std::string note;
      if (auto hash = line.find('#'); hash != std::string::npos) {
        note = text::trim(line.substr(hash + 1));
        line.resize(hash);
      }
      const auto words = text::split_spaces(line);
      if (words.empty()) continue;
      const auto& key = words[0];
      if (key == "q") {
        res.quit = true;
        return res;
      }
      ReviewDecision d{c.model_id, c.scheme_id, c.canonical, Verdict::deferred, opt.reviewer, note, opt.clock(), {}};
      if (key == "a") {
        d.verdict = Verdict::accepted;
        if (words.size() > 1) {
          const auto cat = category_from_code(words[1]);
          if (!cat || *cat == Category::mac) {
            out << "unknown category '" << words[1] << "'\n";
            continue;
          }
          d.category = *cat;
        }
      } else if (key == "r") {
        d.verdict = Verdict::rejected;
      } else if (key != "d") {
        out << "unrecognized answer '" << key << "'\n";
        continue;
      }
      log.append(d);
      ++res.decided;
      break;
    }
  }
  return res;
}

// Non-interactive replay. Decisions for unknown candidates are rejected
// up front so a stale script cannot half-apply.
inline std::size_t replay_decisions(const std::vector<CandidateTerm>& candidates, DecisionLog& log,
                                    const std::vector<ReviewDecision>& script) {
  std::map<CandidateKey, bool> known;
  for (const auto& c : candidates) known[key_of(c)] = true;
  for (const auto& d : script) {
    if (!known.count(d.key())) {
      throw Error(ErrorCode::unknown_id, "replayed decision for unknown candidate '" + d.canonical + "'");
    }
  }
  auto latest = latest_decisions(log.decisions());
  std::size_t applied = 0;
  for (const auto& d : script) {
    auto it = latest.find(d.key());
    if (it != latest.end() && it->second == d) continue;
    log.append(d);
    latest.insert_or_assign(d.key(), d);
    ++applied;
  }
  return applied;
}

// Accepted candidates ready for lexicon::merge_accepted. Macro candidates
// need a reviewer-supplied category and are skipped without one.
inline std::vector<std::pair<std::string, Category>> accepted_terms(const std::vector<CandidateTerm>& candidates,
                                                                    const std::vector<ReviewDecision>& log) {
  const auto latest = latest_decisions(log);
  std::map<std::string, Category> out;
  for (const auto& c : candidates) {
    auto it = latest.find(key_of(c));
    if (it == latest.end() || it->second.verdict != Verdict::accepted) continue;
    const Category cat = it->second.category.value_or(c.category);
    if (cat == Category::mac) continue;
    out.emplace(c.canonical, cat);
  }
  return {out.begin(), out.end()};
}

}  // namespace lexiforge::extract
