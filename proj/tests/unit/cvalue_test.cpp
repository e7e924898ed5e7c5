#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <map>
#include <set>

#include "lexiforge/lexicon/cvalue.hpp"

using namespace lexiforge;
using lexicon::CandidateScore;

namespace {

// Independent reference: recount every n-gram by scanning all token windows
// of every run, then apply the C-value definition pairwise.
std::vector<std::pair<std::string, double>> brute_force(const std::vector<std::string>& docs, std::size_t max_n,
                                                        std::size_t min_freq) {
  std::vector<std::vector<std::string>> runs;
  for (const auto& d : docs) {
    std::vector<std::string> cur;
    for (const auto& raw : annotate::tokenize(d).tokens) {
      std::string t = text::normalize_term(raw);
      bool has_alnum = false;
      for (unsigned char c : t) has_alnum |= std::isalnum(c) != 0;
      if (!has_alnum || lexicon::is_stopword(t)) {
        if (!cur.empty()) runs.push_back(cur);
        cur.clear();
      } else {
        cur.push_back(t);
      }
    }
    if (!cur.empty()) runs.push_back(cur);
  }
  std::set<std::vector<std::string>> distinct;
  for (const auto& r : runs)
    for (std::size_t n = 2; n <= max_n; ++n)
      for (std::size_t i = 0; i + n <= r.size(); ++i) distinct.insert({r.begin() + i, r.begin() + i + n});

  auto count = [&](const std::vector<std::string>& g) {
    std::size_t c = 0;
    for (const auto& r : runs)
      for (std::size_t i = 0; i + g.size() <= r.size(); ++i)
        if (std::equal(g.begin(), g.end(), r.begin() + i)) ++c;
    return c;
  };
  auto inside = [](const std::vector<std::string>& a, const std::vector<std::string>& b) {
    if (a.size() >= b.size()) return false;
    for (std::size_t i = 0; i + a.size() <= b.size(); ++i)
      if (std::equal(a.begin(), a.end(), b.begin() + i)) return true;
    return false;
  };
  std::vector<std::pair<std::vector<std::string>, std::size_t>> cands;
  for (const auto& g : distinct)
    if (auto f = count(g); f >= min_freq) cands.emplace_back(g, f);

  std::vector<std::tuple<double, std::size_t, std::string>> scored;
  for (const auto& [a, fa] : cands) {
    double sum = 0;
    std::size_t n = 0;
    for (const auto& [b, fb] : cands)
      if (inside(a, b)) sum += static_cast<double>(fb), ++n;
    const double w = std::log2(static_cast<double>(a.size()));
    const double cv = n == 0 ? w * fa : w * (fa - sum / n);
    scored.emplace_back(cv, fa, text::join(a, " "));
  }
  std::sort(scored.begin(), scored.end(), [](const auto& x, const auto& y) {
    if (std::get<0>(x) != std::get<0>(y)) return std::get<0>(x) > std::get<0>(y);
    if (std::get<1>(x) != std::get<1>(y)) return std::get<1>(x) > std::get<1>(y);
    return std::get<2>(x) < std::get<2>(y);
  });
  std::vector<std::pair<std::string, double>> out;
  for (const auto& [cv, f, s] : scored) out.emplace_back(s, cv);
  return out;
}

}  // namespace

TEST(CValue, NeverNestedIsLengthWeightedFrequency) {
  std::vector<std::string> docs(8, "We built a digital twin.");
  auto ranked = lexicon::cvalue_candidates(docs, 4, 1);
  ASSERT_EQ(ranked.size(), 1u);
  EXPECT_EQ(ranked[0].text(), "digital twin");
  EXPECT_EQ(ranked[0].frequency, 8u);
  EXPECT_DOUBLE_EQ(ranked[0].cvalue, 8.0);
  EXPECT_TRUE(ranked[0].nested_in.empty());
}

TEST(CValue, SingleTokensAreNeverCandidates) {
  std::vector<std::string> docs;
  for (int i = 0; i < 4; ++i) docs.push_back("Design thinking matters.");
  for (int i = 0; i < 6; ++i) docs.push_back("The design.");
  for (const auto& c : lexicon::cvalue_candidates(docs, 3, 1)) EXPECT_GE(c.ngram.size(), 2u);
}

TEST(CValue, NestedCandidateSubtractsMeanContainerFrequency) {
  // "open innovation" occurs 10 times, 4 of them inside "open innovation lab".
  std::vector<std::string> docs;
  for (int i = 0; i < 4; ++i) docs.push_back("The open innovation lab.");
  for (int i = 0; i < 6; ++i) docs.push_back("Some open innovation.");
  auto ranked = lexicon::cvalue_candidates(docs, 3, 1);
  std::map<std::string, const CandidateScore*> by;
  for (const auto& c : ranked) by[c.text()] = &c;
  ASSERT_TRUE(by.count("open innovation"));
  EXPECT_EQ(by["open innovation"]->frequency, 10u);
  ASSERT_EQ(by["open innovation"]->nested_in.size(), 1u);
  EXPECT_DOUBLE_EQ(by["open innovation"]->cvalue, 1.0 * (10 - 4));
  EXPECT_DOUBLE_EQ(by["open innovation lab"]->cvalue, std::log2(3.0) * 4);
}

TEST(CValue, EmptyCorpus) { EXPECT_TRUE(lexicon::cvalue_candidates({}, 3, 1).empty()); }

TEST(CValue, RejectsBadParameters) {
  EXPECT_THROW(lexicon::cvalue_candidates({"x"}, 1, 1), Error);
  EXPECT_THROW(lexicon::cvalue_candidates({"x"}, 7, 1), Error);
  EXPECT_THROW(lexicon::cvalue_candidates({"x"}, 3, 0), Error);
}

TEST(CValue, ToyCorpusMatchesBruteForce) {
  std::ifstream in(std::string(LEXIFORGE_FIXTURE_DIR) + "/toy_corpus.txt");
  ASSERT_TRUE(in);
  std::vector<std::string> docs;
  for (std::string line; std::getline(in, line);) docs.push_back(line);
  ASSERT_EQ(docs.size(), 50u);
  for (std::size_t max_n : {2u, 3u, 4u}) {
    for (std::size_t min_freq : {1u, 2u}) {
      const auto got = lexicon::cvalue_candidates(docs, max_n, min_freq);
      const auto want = brute_force(docs, max_n, min_freq);
      ASSERT_EQ(got.size(), want.size());
      for (std::size_t i = 0; i < got.size(); ++i) {
        EXPECT_EQ(got[i].text(), want[i].first) << "rank " << i;
        EXPECT_NEAR(got[i].cvalue, want[i].second, 1e-12);
      }
    }
  }
}

TEST(CValue, CandidateReportShape) {
  std::vector<std::string> docs(2, "digital twin");
  std::ostringstream out;
  lexicon::write_candidate_report(out, lexicon::cvalue_candidates(docs, 2, 1));
  EXPECT_EQ(out.str(), "ngram\tfrequency\tcvalue\ndigital twin\t2\t2.000000\n");
}
