#include <gtest/gtest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "lexiforge/pipeline/cli.hpp"

using namespace lexiforge;
using namespace lexiforge::pipeline;

namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("lexiforge_pipeline_" + std::to_string(::getpid())) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

const char* no_env(const char*) { return nullptr; }

struct Run {
  int rc;
  std::string out, err;
};

Run cli(std::vector<std::string> args, const std::string& input = "") {
  std::istringstream in(input);
  std::ostringstream out, err;
  const int rc = run_cli(std::move(args), CliIo{in, out, err, no_env});
  return {rc, out.str(), err.str()};
}

void write_json(const fs::path& p, const json& j) { std::ofstream(p) << j.dump(2); }

// Small synthetic corpus with a fast linear model, shared by the end-to-end tests.
const fs::path& small_corpus() {
  static const fs::path dir = [] {
    const auto d = temp_dir("corpus");
    synthetic::Options opt;
    opt.web_docs = 24;
    opt.pdf_docs = 24;
    synthetic::generate(d, opt);
    json cfg = json::parse(std::ifstream(d / "config.json"));
    cfg["models"] = {"linear-crf"};
    cfg["train"] = {{"max_epochs", 4}};
    write_json(d / "config.json", cfg);
    return d;
  }();
  return dir;
}

std::map<std::string, std::string> manifests(const fs::path& wd) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(wd)) {
    if (e.path().filename() == "manifest.json") out[fs::relative(e.path(), wd).string()] = slurp(e.path());
  }
  return out;
}

}  // namespace

TEST(Digest, KnownVectors) {
  EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Config, PrecedenceMatrix) {
  const auto dir = temp_dir("precedence");
  const auto cfg_path = dir / "config.json";
  for (int mask = 0; mask < 8; ++mask) {
    const bool in_file = mask & 1, on_flag = mask & 2, in_env = mask & 4;
    json j = json::object();
    if (in_file) {
      j = {{"seed", 7},
           {"threshold", 0.25},
           {"split", {{"schemes", {2}}}},
           {"models", {"cnn"}},
           {"paths", {{"workdir", "from-file"}}}};
    }
    write_json(cfg_path, j);
    Overrides o;
    if (on_flag) {
      o.seed = 9;
      o.threshold = 0.75;
      o.scheme = 3;
      o.model = "cnn-crf";
      o.workdir = "/from-flag";
    }
    auto env = [&](const char* name) -> const char* {
      return in_env && std::string(name) == "LEXIFORGE_WORKDIR" ? "/from-env" : nullptr;
    };
    const auto c = resolve_config(cfg_path, o, env);
    SCOPED_TRACE(mask);
    EXPECT_EQ(c.seed, on_flag ? 9u : in_file ? 7u : 2024u);
    EXPECT_EQ(c.threshold, on_flag ? 0.75 : in_file ? 0.25 : 0.5);
    EXPECT_EQ(c.schemes, std::vector<int>{on_flag ? 3 : in_file ? 2 : 1});
    using Models = std::vector<std::string>;
    const Models models = on_flag ? Models{"cnn-crf"} : in_file ? Models{"cnn"} : Models{"linear-crf", "cnn-crf"};
    EXPECT_EQ(c.models, models);
    const std::string wd = on_flag ? "/from-flag" : in_file ? (dir / "from-file").string() : in_env ? "/from-env" : "";
    EXPECT_EQ(c.paths.workdir, wd);
  }
}

TEST(Config, ValidationNamesTheField) {
  const auto dir = temp_dir("validation");
  write_json(dir / "config.json", {{"paths", {{"manifest", "nope.json"}, {"workdir", "w"}}}});
  auto r = cli({"ingest", "--config", (dir / "config.json").string(), "--dry-run"});
  EXPECT_EQ(r.rc, kExitUsage);
  EXPECT_NE(r.err.find("paths.manifest"), std::string::npos) << r.err;
  EXPECT_FALSE(fs::exists(dir / "w"));

  write_json(dir / "config.json", {{"paths", {{"workdir", "w"}}}, {"treshold", 0.5}});
  r = cli({"eval", "--config", (dir / "config.json").string(), "--dry-run"});
  EXPECT_EQ(r.rc, kExitUsage);
  EXPECT_NE(r.err.find("treshold"), std::string::npos) << r.err;

  r = cli({"eval", "--dry-run"});
  EXPECT_EQ(r.rc, kExitUsage);
  EXPECT_NE(r.err.find("paths.workdir"), std::string::npos) << r.err;

  r = cli({"eval", "--workdir", (dir / "w").string(), "--threshold", "1.5", "--dry-run"});
  EXPECT_EQ(r.rc, kExitUsage);
  EXPECT_NE(r.err.find("threshold"), std::string::npos) << r.err;

  EXPECT_EQ(cli({"frobnicate"}).rc, kExitUsage);
  EXPECT_EQ(cli({"train", "--scheme", "9"}).rc, kExitUsage);
  EXPECT_EQ(cli({"--help"}).rc, kExitOk);
}

TEST(Workdir, LockIsExclusive) {
  const auto dir = temp_dir("lock");
  {
    WorkdirLock a(dir);
    try {
      WorkdirLock b(dir);
      FAIL() << "second lock acquired";
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::locked);
    }
  }
  WorkdirLock again(dir);
}

TEST(Workdir, FailedStageIsQuarantined) {
  const auto dir = temp_dir("quarantine");
  run_stage(dir, "blocks", [](StageContext& ctx) { write_text(ctx.out / "blocks.jsonl", "old\n"); });
  EXPECT_THROW(run_stage(dir, "blocks",
                         [](StageContext& ctx) {
                           write_text(ctx.out / "partial.txt", "half");
                           throw Error(ErrorCode::parse, "boom");
                         }),
               Error);
  EXPECT_EQ(slurp(dir / "blocks" / "blocks.jsonl"), "old\n");
  EXPECT_EQ(slurp(dir / "failed" / "blocks-1" / "partial.txt"), "half");
  EXPECT_NE(slurp(dir / "failed" / "blocks-1" / "error.txt").find("boom"), std::string::npos);
  EXPECT_FALSE(fs::exists(dir / ".tmp"));
}

TEST(Workdir, ManifestRecordsDigestsAndParams) {
  const auto dir = temp_dir("manifest");
  const auto src = dir / "source.txt";
  write_text(src, "abc");
  const auto m = run_stage(dir / "wd", "demo", [&](StageContext& ctx) {
    ctx.input(src);
    ctx.params = {{"threshold", 0.5}};
    write_text(ctx.out / "out.txt", "");
  });
  EXPECT_EQ(m["inputs"][0]["sha256"], sha256_hex("abc"));
  EXPECT_EQ(m["outputs"][0]["path"], "out.txt");
  EXPECT_EQ(m["outputs"][0]["sha256"], sha256_hex(""));
  EXPECT_EQ(m["params"]["threshold"], 0.5);
  EXPECT_EQ(json::parse(slurp(dir / "wd" / "demo" / "manifest.json")), m);
}

TEST(Pipeline, StageOrderIsEnforced) {
  const auto wd = temp_dir("order");
  const auto r = cli({"blocks", "--config", (small_corpus() / "config.json").string(), "--workdir", wd.string()});
  EXPECT_EQ(r.rc, kExitData);
  EXPECT_NE(r.err.find("annotate"), std::string::npos) << r.err;
  EXPECT_TRUE(fs::exists(wd / "failed" / "blocks-1"));
  EXPECT_FALSE(fs::exists(wd / ".lock"));
}

TEST(Pipeline, RerunAndStagewiseRunsAreByteIdentical) {
  const auto cfg = (small_corpus() / "config.json").string();
  const auto a = temp_dir("whole"), b = temp_dir("stagewise");
  auto r = cli({"pipeline", "--config", cfg, "--workdir", a.string()});
  ASSERT_EQ(r.rc, kExitOk) << r.err;
  for (const auto* f : {"eval/report.md", "eval/report.tsv", "tag/linear-crf-s1/predictions.conll",
                        "extract/linear-crf-s1/candidates.jsonl", "train/linear-crf-s1/model.lxf"}) {
    EXPECT_TRUE(fs::exists(a / f)) << f;
  }
  const auto first = manifests(a);
  EXPECT_EQ(first.size(), 9u);  // review is skipped without a script

  r = cli({"pipeline", "--config", cfg, "--workdir", a.string()});
  ASSERT_EQ(r.rc, kExitOk) << r.err;
  EXPECT_EQ(manifests(a), first);

  for (const auto& stage : stage_names()) {
    r = cli({stage, "--config", cfg, "--workdir", b.string()});
    ASSERT_EQ(r.rc, kExitOk) << stage << ": " << r.err;
  }
  EXPECT_EQ(manifests(b), first);
  for (const auto& [path, _] : first) {
    const auto dir = fs::path(path).parent_path();
    for (const auto& f : list_files(a / dir)) EXPECT_EQ(slurp(a / dir / f), slurp(b / dir / f)) << dir / f;
  }
}

TEST(Pipeline, SeedOverrideChangesTheSplit) {
  const auto cfg = (small_corpus() / "config.json").string();
  const auto a = temp_dir("seed_a"), b = temp_dir("seed_b");
  for (const auto& wd : {a, b}) {
    for (const char* stage : {"ingest", "lexicon", "annotate", "blocks"}) {
      ASSERT_EQ(cli({stage, "--config", cfg, "--workdir", wd.string()}).rc, kExitOk);
    }
  }
  ASSERT_EQ(cli({"split", "--config", cfg, "--workdir", a.string(), "--scheme", "2"}).rc, kExitOk);
  ASSERT_EQ(cli({"split", "--config", cfg, "--workdir", b.string(), "--scheme", "2", "--seed", "99"}).rc, kExitOk);
  EXPECT_EQ(slurp(a / "blocks" / "blocks.jsonl"), slurp(b / "blocks" / "blocks.jsonl"));
  EXPECT_NE(slurp(a / "split" / "scheme2" / "train.ids"), slurp(b / "split" / "scheme2" / "train.ids"));
}

TEST(Pipeline, ReviewReplayAcceptanceAndMerge) {
  const auto dir = temp_dir("review");
  synthetic::Options opt;
  opt.web_docs = 24;
  opt.pdf_docs = 24;
  const auto layout = synthetic::generate(dir, opt);
  const auto cfg = layout.config().string();
  const auto wd = dir / "work";
  for (const char* stage : {"ingest", "lexicon", "annotate", "blocks", "split"}) {
    ASSERT_EQ(cli({stage, "--config", cfg}).rc, kExitOk);
  }
  // Hand-made tagger output: every held-out sentence is tagged with one
  // planted novel term span wherever it occurs.
  const auto conll = [&] {
    std::ifstream in(wd / "split" / "scheme1" / "test.conll");
    return annotate::read_conll(in);
  }();
  std::size_t hits = 0;
  run_stage(wd, "tag/cnn-crf-s1", [&](StageContext& ctx) {
    std::ofstream out(ctx.out / "predictions.conll");
    for (auto s : conll) {
      s.predicted = s.gold;
      for (std::size_t i = 0; i + 1 < s.tokens.size(); ++i) {
        if (s.tokens[i] == "frugal" && s.tokens[i + 1] == "innovation") {
          s.predicted[i] = {annotate::BioTag::B, Category::inn};
          s.predicted[i + 1] = {annotate::BioTag::I, Category::inn};
          ++hits;
        }
      }
      annotate::write_conll(out, s);
    }
  });
  ASSERT_GT(hits, 0u);
  ASSERT_EQ(cli({"extract", "--config", cfg, "--model", "cnn-crf"}).rc, kExitOk);
  const auto cands = [&] {
    std::ifstream in(wd / "extract" / "cnn-crf-s1" / "candidates.jsonl");
    return extract::read_candidates(in);
  }();
  ASSERT_EQ(cands.size(), 1u);
  EXPECT_EQ(cands[0].canonical, "frugal innovation");

  // Interactive session reads answers from the input stream.
  auto r = cli({"review", "--config", cfg, "--model", "cnn-crf", "--interactive"}, "a\n");
  ASSERT_EQ(r.rc, kExitOk) << r.err;
  EXPECT_NE(r.out.find("frugal innovation"), std::string::npos);

  ASSERT_EQ(cli({"eval", "--config", cfg, "--model", "cnn-crf"}).rc, kExitOk);
  const auto acceptance = slurp(wd / "eval" / "acceptance.tsv");
  EXPECT_NE(acceptance.find("cnn-crf\t1\t1\t1\t0\t0\t"), std::string::npos) << acceptance;
  EXPECT_NE(slurp(wd / "eval" / "report.md").find("| cnn-crf | 1 (100.00%) |"), std::string::npos);

  r = cli({"lexicon", "merge", "--config", cfg, "--model", "cnn-crf", "--out", (dir / "lexicon-v2.tsv").string()});
  ASSERT_EQ(r.rc, kExitOk) << r.err;
  const auto merged = lexicon::load_lexicon_file((dir / "lexicon-v2.tsv").string());
  EXPECT_EQ(merged.version(), "2");
  EXPECT_EQ(merged.size(), 31u);

  // A scripted rejection replays on top of the interactive acceptance, once.
  extract::ReviewDecision d{"cnn-crf", 1, "frugal innovation", extract::Verdict::rejected, "panel", "", "t0", {}};
  std::ofstream(dir / "script.jsonl") << extract::to_json(d).dump() << '\n';
  for (int pass = 0; pass < 2; ++pass) {
    r = cli({"review", "--config", cfg, "--model", "cnn-crf", "--script", (dir / "script.jsonl").string()});
    ASSERT_EQ(r.rc, kExitOk) << r.err;
    EXPECT_NE(r.err.find(pass == 0 ? "applied 1" : "applied 0"), std::string::npos) << r.err;
  }
  ASSERT_EQ(cli({"eval", "--config", cfg, "--model", "cnn-crf"}).rc, kExitOk);
  EXPECT_NE(slurp(wd / "eval" / "acceptance.tsv").find("cnn-crf\t1\t1\t0\t1\t0\t"), std::string::npos);
}

TEST(Synthetic, DeterministicOutput) {
  const auto a = temp_dir("syn_a"), b = temp_dir("syn_b");
  synthetic::Options opt;
  opt.web_docs = 5;
  opt.pdf_docs = 5;
  synthetic::generate(a, opt);
  synthetic::generate(b, opt);
  for (const auto& f : list_files(a)) EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  EXPECT_EQ(list_files(a).size(), 14u);  // 10 documents, lexicon, embeddings, novel terms, config
}
