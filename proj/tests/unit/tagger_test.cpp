#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "crf_oracle.hpp"
#include "lexiforge/tagger/grad_check.hpp"
#include "lexiforge/tagger/io.hpp"
#include "lexiforge/tagger/train.hpp"

using namespace lexiforge;
using namespace lexiforge::tagger;
using testgen::CrfInstance;

namespace {

Matrix<double> mat(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix<double> m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index r = 0;
  for (const auto& row : rows) {
    Eigen::Index c = 0;
    for (double v : row) m(r, c++) = v;
    ++r;
  }
  return m;
}

CnnConfig small_cnn() {
  CnnConfig c;
  c.embed_dim = 6;
  c.parallel_channels = 4;
  c.deep_channels = 5;
  return c;
}

// Toy data: planted two-token terms inside filler text.
std::vector<Example> planted(std::size_t n, std::uint64_t seed) {
  const LabelSet& L = default_labels();
  std::mt19937_64 rng(seed);
  const std::vector<std::string> filler = {"we", "the", "offer", "new", "and", "our", "for", "with", "a", "team"};
  const std::vector<std::pair<std::vector<std::string>, Category>> terms = {
      {{"digital", "twin"}, Category::dig}, {{"open", "lab"}, Category::inn}, {{"green", "energy"}, Category::sus}};
  std::vector<Example> out;
  for (std::size_t i = 0; i < n; ++i) {
    Example e;
    const std::size_t len = 4 + rng() % 5;
    const std::size_t at = rng() % (len - 1);
    const auto& term = terms[rng() % terms.size()];
    for (std::size_t t = 0; t < len; ++t) {
      if (t == at || t == at + 1) {
        e.tokens.push_back(term.first[t - at]);
        e.gold.push_back(L.index(annotate::BioLabel::inside(term.second)));
      } else {
        e.tokens.push_back(filler[rng() % filler.size()]);
        e.gold.push_back(0);
      }
    }
    out.push_back(e);
  }
  return out;
}

}  // namespace

TEST(Labels, Layout) {
  const auto& L = default_labels();
  ASSERT_EQ(L.size(), 15u);
  const auto names = L.names();
  EXPECT_EQ(names[0], "O");
  EXPECT_EQ(names[1], "I-sus");
  EXPECT_EQ(names[7], "I-mac");
  EXPECT_EQ(names[8], "B-sus");
  EXPECT_EQ(names[14], "B-mac");
  for (std::size_t i = 0; i < L.size(); ++i) EXPECT_EQ(L.index(L[i]), i);
}

TEST(Vocab, MinFreqAndSpecials) {
  auto v = Vocab::build({{"a", "a", "A", "b"}, {"b", "c"}}, 3);
  EXPECT_EQ(v.size(), 3u);
  EXPECT_EQ(v.id("a"), 2u);
  EXPECT_EQ(v.id("b"), Vocab::kUnk);
  EXPECT_EQ(v.words()[0], "<pad>");
}

TEST(Crf, ClosedForms) {
  CrfParams<double> crf(2);
  const auto E = mat({{0.3, -1.2}});
  EXPECT_NEAR(crf_log_partition(E, crf), std::log(std::exp(0.3) + std::exp(-1.2)), 1e-14);
  CrfParams<double> crf3(3);
  Matrix<double> Z = Matrix<double>::Zero(4, 3);
  EXPECT_NEAR(crf_log_partition(Z, crf3), 4 * std::log(3.0), 1e-12);
  EXPECT_NEAR(crf_nll(Z, crf3, {0, 1, 2, 0}), 4 * std::log(3.0), 1e-12);
  CrfParams<double> one(1);
  EXPECT_NEAR(crf_nll(mat({{2.0}, {-1.0}}), one, {0, 0}), 0.0, 1e-14);
}

TEST(Crf, ViterbiSimpleAndTies) {
  CrfParams<double> crf(2);
  EXPECT_EQ(viterbi_decode(mat({{0, 1}, {1, 0}}), crf).path, (std::vector<std::size_t>{1, 0}));
  EXPECT_EQ(viterbi_decode<double>(Matrix<double>::Zero(3, 4), CrfParams<double>(4)).path, (std::vector<std::size_t>{0, 0, 0}));
}

TEST(Crf, EnumerationOracle) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 400; ++i) {
    auto in = testgen::random_crf_instance(rng, 5, 4, i % 2 == 1);
    const double logz = crf_log_partition(in.emissions, in.crf);
    const auto ref = static_cast<double>(testgen::brute_log_partition(in));
    EXPECT_LT(std::abs(logz - ref), 1e-10 * std::max(1.0, std::abs(ref)));
    const auto v = viterbi_decode(in.emissions, in.crf);
    const auto [path, score] = testgen::brute_viterbi(in);
    EXPECT_EQ(v.path, path);
    EXPECT_NEAR(v.score, static_cast<double>(score), 1e-10);

    // Probabilities sum to one; nll equals -log p(gold).
    long double total = 0;
    testgen::for_each_path(in.emissions.rows(), in.emissions.cols(),
                           [&](const auto& y) { total += std::exp(testgen::path_score(in, y) - ref); });
    EXPECT_NEAR(static_cast<double>(total), 1.0, 1e-9);
    const auto nll = crf_nll(in.emissions, in.crf, path);
    EXPECT_GE(nll, -1e-9);
    EXPECT_NEAR(nll, static_cast<double>(ref - testgen::path_score(in, path)), 1e-10);
  }
}

TEST(Crf, ConstantShiftAtPosition) {
  std::mt19937_64 rng(9);
  auto in = testgen::random_crf_instance(rng, 5, 4, false);
  const double before = crf_log_partition(in.emissions, in.crf);
  const auto path = viterbi_decode(in.emissions, in.crf).path;
  in.emissions.row(0).array() += 2.5;
  EXPECT_NEAR(crf_log_partition(in.emissions, in.crf), before + 2.5, 1e-12);
  EXPECT_EQ(viterbi_decode(in.emissions, in.crf).path, path);
}

TEST(LogSoftmax, ClosedFormsAndReference) {
  EXPECT_NEAR(log_softmax_nll<double>(Matrix<double>::Zero(2, 4), {1, 3}), std::log(4.0), 1e-14);
  EXPECT_NEAR(log_softmax_nll(mat({{800, 0}}), {0}), 0.0, 1e-14);
  const auto E = mat({{0.1, -0.4, 2.0, 0.7}, {1.5, 1.5, -3.0, 0.0}, {-0.2, 0.9, 0.3, -1.1}});
  const std::vector<std::size_t> gold = {2, 0, 3};
  long double ref = 0;
  for (Eigen::Index t = 0; t < 3; ++t) {
    long double z = 0;
    for (Eigen::Index k = 0; k < 4; ++k) z += std::exp(static_cast<long double>(E(t, k)));
    ref += std::log(z) - E(t, static_cast<Eigen::Index>(gold[t]));
  }
  EXPECT_NEAR(log_softmax_nll(E, gold), static_cast<double>(ref / 3), 1e-14);
}

TEST(Linear, Emissions) {
  Param<double> W("linear.w", 4, 3);
  FeatureIds feats = {{0, 2}, {}, {3}};
  EXPECT_TRUE(linear_emissions(feats, W).isZero());
  W.value(2, 1) = 1.5;
  W.value(0, 1) = -0.5;
  W.value(3, 2) = 2.0;
  const auto E = linear_emissions(feats, W);
  EXPECT_EQ(E, mat({{0, 1.0, 0}, {0, 0, 0}, {0, 0, 2.0}}));
}

TEST(Linear, FeatureTemplates) {
  const auto f = token_features({"We", "build", "3D", "twins"}, 2);
  auto has = [&](const std::string& s) { return std::find(f.begin(), f.end(), s) != f.end(); };
  EXPECT_TRUE(has("w=3D"));
  EXPECT_TRUE(has("lw=3d"));
  EXPECT_TRUE(has("digit"));
  EXPECT_TRUE(has("w[-2]=we"));
  EXPECT_TRUE(has("w[2]=</s>"));
  EXPECT_TRUE(has("s3=3d"));
  EXPECT_FALSE(has("cap"));
  EXPECT_TRUE(has("bias"));
}

TEST(Cnn, ShapesAndDeterminism) {
  Cnn<double> cnn(small_cnn(), 10, 15);
  Rng rng(3);
  cnn.params().init_uniform(rng);
  const auto one = cnn.emissions({4});
  EXPECT_EQ(one.rows(), 1);
  EXPECT_EQ(one.cols(), 15);
  EXPECT_TRUE(one.allFinite());
  const auto a = cnn.emissions({2, 3, 4, 5, 9});
  EXPECT_EQ(a, cnn.emissions({2, 3, 4, 5, 9}));
  EXPECT_THROW(cnn.emissions({10}), Error);

  Cnn<double> zero(small_cnn(), 10, 15);
  EXPECT_TRUE(zero.emissions({1, 2, 3}).isZero());
}

TEST(Cnn, PackingMatchesSingleSentences) {
  Cnn<double> cnn(small_cnn(), 12, 15);
  Rng rng(4);
  cnn.params().init_uniform(rng, 0.5);
  const std::vector<std::vector<std::size_t>> batch = {{1, 2, 3}, {4}, {5, 6, 7, 8, 9, 10}};
  CnnCache<double> c;
  cnn.forward(batch, Mode::eval, nullptr, c);
  for (std::size_t i = 0; i < batch.size(); ++i) {
    EXPECT_TRUE(Cnn<double>::slice(c, i).isApprox(cnn.emissions(batch[i]), 1e-12)) << i;
  }
}

TEST(Cnn, TrainModeDropoutChangesOutput) {
  Cnn<double> cnn(small_cnn(), 10, 15);
  Rng rng(3);
  cnn.params().init_uniform(rng, 0.5);
  CnnCache<double> c;
  Rng drop(1);
  cnn.forward({{1, 2, 3, 4}}, Mode::train, &drop, c);
  EXPECT_FALSE(c.logits.isApprox(cnn.emissions({1, 2, 3, 4})));
}

TEST(GradCheck, LinearCrf) {
  auto data = planted(20, 1);
  auto model = TaggerModel<long double>::create(ModelKind::linear_crf, data, {}, {});
  Rng rng(2);
  for (auto* p : model.params()) {
    for (Eigen::Index i = 0; i < p->value.size(); ++i) p->value.data()[i] = 2 * uniform_unit(rng) - 1;
  }
  Example sample{{"we", "open", "lab"}, {0, 4, 4}};
  const auto report = grad_check(model, sample);
  for (const auto& g : report.groups) EXPECT_GE(g.checked, std::min<std::size_t>(20, 15)) << g.name;
  EXPECT_LT(report.max_rel_error, 1e-6);
}

TEST(GradCheck, CnnAndCnnCrf) {
  auto data = planted(30, 2);
  for (auto kind : {ModelKind::cnn, ModelKind::cnn_crf}) {
    TrainConfig tc;
    tc.min_freq = 1;
    auto model = TaggerModel<long double>::create(kind, data, small_cnn(), tc);
    if (uses_crf(kind)) {
      Rng rng(8);
      for (auto* p : model.crf().params()) {
        for (Eigen::Index i = 0; i < p->value.size(); ++i) p->value.data()[i] = 2 * uniform_unit(rng) - 1;
      }
    }
    Example sample{{"we", "digital", "twin", "team"}, {0, 2, 2, 0}};
    const auto report = grad_check(model, sample);
    EXPECT_LT(report.max_rel_error, 1e-3) << to_string(kind);
  }
}

TEST(Train, LinearCrfDescendsAndIsDeterministic) {
  auto data = planted(20, 3);
  TrainConfig tc;
  tc.max_epochs = 5;
  tc.batch_size = 4;
  tc.learning_rate = 0.05;
  auto a = train<double>(ModelKind::linear_crf, data, {}, tc);
  auto b = train<double>(ModelKind::linear_crf, data, {}, tc);
  ASSERT_EQ(a.history.size(), 5u);
  EXPECT_LT(a.history.back().train_loss, a.history.front().train_loss);
  EXPECT_EQ(a.history.front().train_loss, b.history.front().train_loss);
  EXPECT_EQ(a.history.back().train_loss, b.history.back().train_loss);
}

TEST(Train, CnnCrfLearnsPlantedTerms) {
  auto data = planted(200, 4);
  auto dev = planted(40, 5);
  TrainConfig tc;
  tc.max_epochs = 8;
  tc.learning_rate = 0.01;
  tc.init_scale = 0.5;  // the narrow test network needs a wider init to avoid vanishing signal
  tc.batch_size = 8;
  CnnConfig cfg;
  cfg.embed_dim = 16;
  cfg.parallel_channels = 8;
  cfg.deep_channels = 16;
  cfg.dropout = 0.1;
  auto r = train<double>(ModelKind::cnn_crf, data, dev, tc, cfg);
  EXPECT_GT(r.history.at(r.best_epoch - 1).dev.f1, 0.9);
  const auto pred = r.model.predict_ids({{"our", "green", "energy", "team"}});
  EXPECT_EQ(pred[0], (std::vector<std::size_t>{0, 1, 1, 0}));
}

TEST(Train, Errors) {
  EXPECT_THROW(train<double>(ModelKind::cnn, {}, {}, {}), Error);
  auto data = planted(5, 1);
  TrainConfig tc;
  tc.learning_rate = 1e300;
  tc.max_epochs = 3;
  tc.batch_size = 1;
  CnnConfig cfg = small_cnn();
  try {
    train<double>(ModelKind::cnn, data, {}, tc, cfg);
    FAIL() << "expected divergence";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::divergence);
  }
}

TEST(Predict, EmptyAndOov) {
  auto data = planted(20, 6);
  TrainConfig tc;
  tc.max_epochs = 1;
  auto r = train<double>(ModelKind::cnn, data, {}, tc, small_cnn());
  EXPECT_TRUE(r.model.predict({}).empty());
  const auto p = r.model.predict({{"zzz", "qqq"}, {}});
  ASSERT_EQ(p.size(), 2u);
  EXPECT_EQ(p[0].size(), 2u);
  EXPECT_TRUE(p[1].empty());
}

TEST(ModelIo, RoundTripBothKinds) {
  auto data = planted(30, 7);
  for (auto kind : {ModelKind::linear_crf, ModelKind::cnn_crf}) {
    TrainConfig tc;
    tc.max_epochs = 2;
    auto r = train<double>(kind, data, {}, tc, small_cnn());
    std::stringstream ss;
    save_model(ss, r.model, {{"scheme", 1}});
    auto back = load_model(ss);
    EXPECT_EQ(back.info.at("scheme"), 1);
    auto a = r.model.params();
    auto b = back.model.params();
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i]->value, b[i]->value) << a[i]->name;
    std::vector<std::vector<std::string>> s = {data[0].tokens, {"unseen", "words"}};
    EXPECT_EQ(r.model.predict_ids(s), back.model.predict_ids(s));
  }
}

TEST(ModelIo, CorruptInputs) {
  std::stringstream bad("NOTAMODEL");
  EXPECT_THROW(load_model(bad), Error);
  auto data = planted(10, 7);
  TrainConfig tc;
  tc.max_epochs = 1;
  auto r = train<double>(ModelKind::linear_crf, data, {}, tc);
  std::stringstream ss;
  save_model(ss, r.model);
  const std::string full = ss.str();
  std::stringstream truncated(full.substr(0, full.size() - 5));
  try {
    load_model(truncated);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::corrupt_state);
  }
}
