#include <gtest/gtest.h>

#include <map>
#include <set>
#include <random>
#include <sstream>

#include "lexiforge/eval/report.hpp"

using namespace lexiforge;
using namespace lexiforge::eval;
using annotate::BioLabel;

namespace {

std::vector<BioLabel> labels(const std::string& s) {
  std::vector<BioLabel> out;
  std::istringstream in(s);
  std::string tok;
  while (in >> tok) out.push_back(*annotate::parse_bio_label(tok));
  return out;
}

// Independent oracle: entity = maximal run of identical I-labels, split at B-.
std::multiset<std::tuple<std::size_t, std::size_t, Category>> oracle_spans(const std::vector<BioLabel>& l) {
  std::multiset<std::tuple<std::size_t, std::size_t, Category>> out;
  std::size_t t = 0;
  while (t < l.size()) {
    if (l[t].tag == annotate::BioTag::O) {
      ++t;
      continue;
    }
    std::size_t e = t + 1;
    while (e < l.size() && l[e].tag == annotate::BioTag::I && l[e].category == l[t].category) ++e;
    out.emplace(t, e, l[t].category);
    t = e;
  }
  return out;
}

std::vector<BioLabel> random_labels(std::mt19937_64& rng, std::size_t n) {
  std::vector<BioLabel> out;
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = rng() % 6;
    const auto c = static_cast<Category>(rng() % 3);
    out.push_back(r < 3 ? BioLabel::outside() : r < 5 ? BioLabel::inside(c) : BioLabel::begin(c));
  }
  return out;
}

}  // namespace

TEST(TokenMetrics, Basics) {
  const auto g = labels("O I-dig I-dig O I-inn");
  const auto m = token_metrics(g, g);
  EXPECT_EQ(m.precision, 1.0);
  EXPECT_EQ(m.recall, 1.0);
  EXPECT_EQ(m.f1, 1.0);
  const auto z = token_metrics(labels("O O O O O"), g);
  EXPECT_EQ(z.precision, 0.0);
  EXPECT_EQ(z.recall, 0.0);
  EXPECT_EQ(z.f1, 0.0);
  EXPECT_THROW(token_metrics(labels("O"), g), Error);
}

TEST(TokenMetrics, TenTokenFixture) {
  // 6 tagged on each side; one wrong category, one tag shifted by a token.
  const auto gold = labels("O I-dig I-dig O I-inn I-inn O B-inn I-inn O");
  const auto pred = labels("O I-dig I-sus O I-inn I-inn I-inn O I-inn O");
  const auto c = token_counts(pred, gold);
  EXPECT_EQ(c.gold, 6u);
  EXPECT_EQ(c.predicted, 6u);
  EXPECT_EQ(c.correct, 4u);
  EXPECT_NEAR(prf(c).f1, 4.0 / 6.0, 1e-15);
}

TEST(EntityMetrics, Examples) {
  const auto g = labels("I-dig I-dig O I-inn");
  EXPECT_EQ(entity_metrics(annotate::from_bio(g), annotate::from_bio(g)).f1, 1.0);
  const auto off = entity_counts(labels("I-dig O O I-inn"), g);
  EXPECT_EQ(off.correct, 1u);
  EXPECT_EQ(off.predicted, 2u);
  EXPECT_EQ(off.gold, 2u);
  // 3 gold, 2 predicted, 1 match.
  const auto m = prf(entity_counts(labels("I-sus O I-dig O O O"), labels("I-sus O I-inn O I-bus O")));
  EXPECT_DOUBLE_EQ(m.precision, 0.5);
  EXPECT_DOUBLE_EQ(m.recall, 1.0 / 3.0);
  EXPECT_NEAR(m.f1, 0.4, 1e-15);
}

TEST(Metrics, BruteForceOracleAndSymmetry) {
  std::mt19937_64 rng(17);
  for (int rep = 0; rep < 2000; ++rep) {
    const std::size_t n = 1 + rng() % 20;
    const auto p = random_labels(rng, n), g = random_labels(rng, n);

    std::size_t tp = 0, pn = 0, gn = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto ps = annotate::to_string(p[i]), gs = annotate::to_string(g[i]);
      pn += ps != "O";
      gn += gs != "O";
      tp += ps != "O" && ps == gs;
    }
    const auto tc = token_counts(p, g);
    EXPECT_EQ(tc.correct, tp);
    EXPECT_EQ(tc.predicted, pn);
    EXPECT_EQ(tc.gold, gn);

    const auto ps = oracle_spans(p), gs = oracle_spans(g);
    std::size_t common = 0;
    auto rest = gs;
    for (const auto& s : ps) {
      auto it = rest.find(s);
      if (it != rest.end()) {
        ++common;
        rest.erase(it);
      }
    }
    const auto ec = entity_counts(p, g);
    EXPECT_EQ(ec.correct, common);
    EXPECT_EQ(ec.predicted, ps.size());
    EXPECT_EQ(ec.gold, gs.size());

    const auto a = prf(ec), b = prf(entity_counts(g, p));
    EXPECT_EQ(a.precision, b.recall);
    EXPECT_EQ(a.recall, b.precision);
    for (double v : {a.precision, a.recall, a.f1}) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
  }
}

TEST(Metrics, MacExclusion) {
  SequenceScores with, without;
  with.add(labels("I-mac I-mac O"), labels("I-mac I-mac O"));
  without.add(labels("I-mac I-mac O"), labels("I-mac I-mac O"), false);
  EXPECT_EQ(with.entity.gold, 1u);
  EXPECT_EQ(without.entity.gold, 0u);
}

TEST(Report, Table3Spots) {
  const auto cell = make_cell("CNN", 1, Level::entity, {0.8056, 0.7417, f1_score(0.8056, 0.7417)});
  std::vector<MetricCell> cells = {cell};
  const double precisions[] = {0.8286, 0.8701, 0.8938, 0.8796};
  for (int s = 1; s <= 4; ++s) cells.push_back(make_cell("CRF", s, Level::entity, {precisions[s - 1], 0.5, 0.5}));
  std::ostringstream out;
  render_table3(out, cells, Level::entity);
  const auto text = out.str();
  EXPECT_NE(text.find("| CNN | 0.8056 | - | - | - | 0.8056 |"), std::string::npos);
  EXPECT_NE(text.find("| CNN | 0.7723 | - | - | - | 0.7723 |"), std::string::npos);
  EXPECT_NE(text.find("| CRF | 0.8286 | 0.8701 | 0.8938 | 0.8796 | 0.8680 |"), std::string::npos);
  EXPECT_NE(text.find("### F1-Score"), std::string::npos);
}

TEST(Report, EmptyIsHeadersOnly) {
  std::ostringstream out;
  render_table3(out, {}, Level::token);
  const auto text = out.str();
  EXPECT_NE(text.find("### Précision"), std::string::npos);
  EXPECT_NE(text.find("Moyenne"), std::string::npos);
  EXPECT_EQ(text.find("| 0"), std::string::npos);
  std::ostringstream t4;
  render_table4(t4, {});
  EXPECT_NE(t4.str().find("% Moyenne"), std::string::npos);
}

TEST(Report, Table4RobertaRow) {
  const std::size_t gen[] = {202, 234, 182, 503};
  const std::size_t acc[] = {141, 158, 94, 391};
  std::vector<AcceptanceCell> cells;
  for (int s = 1; s <= 4; ++s) cells.push_back({"RoBERTa", s, gen[s - 1], acc[s - 1], gen[s - 1] - acc[s - 1], 0});
  std::ostringstream out;
  render_table4(out, cells);
  EXPECT_NE(out.str().find("| RoBERTa | 202 (69.80%) | 234 (67.52%) | 182 (51.65%) | 503 (77.73%) | 66.68 |"),
            std::string::npos)
      << out.str();
  EXPECT_EQ(AcceptanceCell({"m", 1, 4, 1, 3, 0}).rate(), 25.0);
}

TEST(Report, TsvRoundTrip) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<MetricCell> cells;
  for (int s = 1; s <= 4; ++s) {
    const double p = u(rng), r = u(rng);
    cells.push_back({"cnn-crf", s, s % 2 ? Level::token : Level::entity, p, r, f1_score(p, r)});
  }
  std::stringstream ss;
  write_metrics_tsv(ss, cells);
  EXPECT_EQ(read_metrics_tsv(ss), cells);

  std::vector<AcceptanceCell> acc = {{"linear-crf", 1, 10, 4, 5, 1}, {"cnn-crf", 3, 0, 0, 0, 0}};
  std::stringstream s2;
  write_acceptance_tsv(s2, acc);
  EXPECT_EQ(read_acceptance_tsv(s2), acc);

  std::stringstream bad("nope\n");
  EXPECT_THROW(read_metrics_tsv(bad), Error);
}
