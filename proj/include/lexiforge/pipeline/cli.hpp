#pragma once

// Command-line front end. Exit status: 0 ok, 1 usage or configuration error,
// 2 data error, 3 internal error.

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "lexiforge/pipeline/stages.hpp"
#include "lexiforge/synthetic.hpp"

namespace lexiforge::pipeline {

enum ExitCode { kExitOk = 0, kExitUsage = 1, kExitData = 2, kExitInternal = 3 };

struct CliIo {
  std::istream& in = std::cin;
  std::ostream& out = std::cout;
  std::ostream& err = std::cerr;
  std::function<const char*(const char*)> getenv = ::getenv;
};

namespace detail {

struct CommonFlags {
  std::string config;
  std::string workdir;
  std::optional<std::uint64_t> seed;
  std::optional<double> threshold;
  std::optional<int> scheme;
  std::optional<std::string> model;
  bool dry_run = false;
};

inline void add_common(CLI::App* app, CommonFlags& f) {
  app->add_option("--config,-c", f.config, "Pipeline configuration (JSON)");
  app->add_option("--workdir", f.workdir, "Work directory (overrides config and LEXIFORGE_WORKDIR)");
  app->add_option("--seed", f.seed, "Master seed");
  app->add_option("--threshold", f.threshold, "Block similarity threshold in [0, 1]");
  app->add_option("--scheme", f.scheme, "Dataset scheme 1..4")->check(CLI::Range(1, 4));
  app->add_option("--model", f.model, "cnn | cnn-crf | linear-crf");
  app->add_flag("--dry-run", f.dry_run, "Validate the configuration and print the plan without writing");
}

inline std::string summary(const json& manifest) {
  std::string s = manifest.at("stage").get<std::string>() + ": ";
  const auto& outs = manifest.at("outputs");
  for (std::size_t i = 0; i < outs.size(); ++i) {
    s += (i ? ", " : "") + outs[i].at("path").get<std::string>();
  }
  return s;
}

inline std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto comma = s.find(',', start);
    auto item = text::trim(s.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
    if (!item.empty()) out.push_back(item);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace detail

// Runs the named stages in pipeline order under the work-directory lock.
inline void run_stages(const PipelineConfig& c, const std::vector<std::string>& stages, std::ostream& log) {
  const fs::path wd = c.paths.workdir;
  WorkdirLock lock(wd);
  auto has = [&](const char* s) { return std::find(stages.begin(), stages.end(), s) != stages.end(); };
  auto report = [&](const json& m) { log << detail::summary(m) << '\n'; };
  if (has("ingest")) report(run_ingest(c, wd));
  if (has("lexicon")) report(run_lexicon(c, wd));
  if (has("annotate")) report(run_annotate(c, wd));
  if (has("blocks")) report(run_blocks(c, wd));
  if (has("split")) {
    for (int s : c.schemes) report(run_split(c, wd, s));
  }
  if (has("train")) {
    for (const auto& u : units(c)) {
      report(run_train(c, wd, u, [&](const tagger::EpochRecord& r) {
        log << "  " << u.id() << " epoch " << r.epoch << " loss " << eval::fixed(r.train_loss, 4) << " dev F1 "
            << eval::fixed(r.dev.f1, 4) << '\n';
      }));
    }
  }
  if (has("tag")) {
    for (const auto& u : units(c)) report(run_tag(wd, u));
  }
  if (has("extract")) {
    for (const auto& u : units(c)) report(run_extract(c, wd, u));
  }
  if (has("review")) {
    if (auto m = run_review(c, wd)) {
      log << "review: applied " << m->at("applied").get<std::size_t>() << " decision(s)\n";
    } else {
      log << "review: skipped (no review script configured; use 'review --interactive')\n";
    }
  }
  if (has("eval")) report(run_eval(c, wd));
}

inline int run_cli(std::vector<std::string> args, CliIo io = {}) {
  CLI::App app{"lexiforge: domain-term discovery pipeline"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "lexiforge 1.0");

  detail::CommonFlags flags;
  std::map<std::string, CLI::App*> stage_cmds;
  const std::map<std::string, std::string> help = {
      {"ingest", "Filter and extract passages from the source manifest"},
      {"lexicon", "Normalize the gold lexicon and rank C-value term candidates"},
      {"annotate", "Split sentences and annotate lexicon terms"},
      {"blocks", "Build context blocks and apply the similarity gate"},
      {"split", "Build train/test sets for the configured schemes"},
      {"train", "Train the configured models"},
      {"tag", "Tag the held-out sentences with trained models"},
      {"extract", "Collect new candidate terms from model output"},
      {"review", "Replay a decision script, or review on the terminal with --interactive"},
      {"eval", "Write the evaluation report"},
      {"pipeline", "Run every stage in order"}};
  for (const auto& name : {"ingest", "lexicon", "annotate", "blocks", "split", "train", "tag", "extract", "review",
                           "eval", "pipeline"}) {
    auto* cmd = app.add_subcommand(name, help.at(name));
    detail::add_common(cmd, flags);
    stage_cmds[name] = cmd;
  }

  // ingest extras
  std::string manifest_flag, out_dir, keywords;
  std::optional<std::size_t> max_depth;
  stage_cmds["ingest"]->add_option("--manifest", manifest_flag, "Source manifest (JSON)");
  stage_cmds["ingest"]->add_option("--out", out_dir, "Write the passage store here instead of the work directory");
  stage_cmds["ingest"]->add_option("--keywords", keywords, "Comma-separated seed keywords");
  stage_cmds["ingest"]->add_option("--max-depth", max_depth, "Maximum URL path depth");

  // lexicon merge
  auto* merge = stage_cmds["lexicon"]->add_subcommand("merge", "Merge accepted candidates into a new lexicon version");
  std::string merge_out;
  merge->add_option("--out", merge_out, "Output lexicon file")->required();
  detail::add_common(merge, flags);

  // review extras
  std::string script;
  bool interactive = false;
  std::size_t max_contexts = 3;
  stage_cmds["review"]->add_option("--script", script, "Replay decisions from this JSONL file");
  stage_cmds["review"]->add_flag("--interactive", interactive, "Review on the terminal (reads answers from stdin)");
  stage_cmds["review"]->add_option("--contexts", max_contexts, "Contexts shown per candidate");

  bool exclude_mac = false;
  stage_cmds["eval"]->add_flag("--exclude-mac", exclude_mac, "Score with the macro-term class removed");
  stage_cmds["pipeline"]->add_flag("--exclude-mac", exclude_mac, "Score with the macro-term class removed");

  // synthetic corpus
  auto* synth = app.add_subcommand("synth", "Write the synthetic benchmark corpus and its config");
  std::string synth_out;
  synthetic::Options synth_opt;
  synth->add_option("--out", synth_out, "Output directory")->required();
  synth->add_option("--web", synth_opt.web_docs, "Number of web pages");
  synth->add_option("--pdf", synth_opt.pdf_docs, "Number of report texts");
  synth->add_option("--seed", synth_opt.seed, "Generator seed");

  try {
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, io.out, io.err);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (synth->parsed()) {
      const auto layout = synthetic::generate(synth_out, synth_opt);
      io.out << "synthetic corpus written; run: lexiforge pipeline --config " << layout.config().string() << '\n';
      return kExitOk;
    }

    Overrides o;
    o.seed = flags.seed;
    o.threshold = flags.threshold;
    o.scheme = flags.scheme;
    o.model = flags.model;
    if (!flags.workdir.empty()) o.workdir = flags.workdir;
    std::optional<fs::path> cfg_path;
    if (!flags.config.empty()) cfg_path = flags.config;
    auto cfg = resolve_config(cfg_path, o, io.getenv);
    if (!manifest_flag.empty()) cfg.paths.manifest = manifest_flag;
    if (!keywords.empty()) cfg.filter.seed_keywords = detail::split_commas(keywords);
    if (max_depth) cfg.filter.max_depth = *max_depth;
    if (!script.empty()) cfg.paths.review_script = script;
    if (exclude_mac) cfg.include_mac = false;

    std::string cmd;
    for (const auto& [name, sub] : stage_cmds) {
      if (sub->parsed()) cmd = name;
    }
    std::vector<std::string> stages = cmd == "pipeline" ? stage_names() : std::vector<std::string>{cmd};
    const bool merging = merge->parsed();
    if (merging) stages.clear();

    // ingest --out bypasses the work directory entirely.
    if (cmd == "ingest" && !out_dir.empty()) {
      if (cfg.paths.workdir.empty()) cfg.paths.workdir = out_dir;
      validate(cfg, {"ingest"});
      if (flags.dry_run) {
        io.out << "dry run: configuration valid; would write passages to " << out_dir << '\n';
        return kExitOk;
      }
      const auto store = ingest::ingest(ingest::load_manifest(cfg.paths.manifest), cfg.filter);
      ingest::write_store(store, out_dir);
      io.err << "ingest: " << store.passages.size() << " passages, " << store.skipped.size() << " skipped\n";
      return kExitOk;
    }

    validate(cfg, {stages.begin(), stages.end()});
    if (flags.dry_run) {
      io.out << "dry run: configuration valid\nworkdir: " << cfg.paths.workdir << '\n';
      if (merging) io.out << "would merge accepted terms into " << merge_out << '\n';
      for (const auto& s : stages) io.out << "would run: " << s << '\n';
      return kExitOk;
    }

    if (merging) {
      const fs::path wd = cfg.paths.workdir;
      WorkdirLock lock(wd);
      const auto lex = lexicon::load_lexicon_file((wd / "lexicon" / "lexicon.tsv").string());
      auto log_in = detail::open_in(decision_log_path(wd));
      const auto decisions = extract::read_decisions(log_in, ErrorCode::corrupt_state);
      const auto accepted = extract::accepted_terms(all_candidates(cfg, wd), decisions);
      const auto merged = lexicon::merge_accepted(lex, accepted);
      auto out = detail::open_out(merge_out);
      lexicon::write_lexicon(out, merged);
      io.err << "lexicon merge: " << accepted.size() << " term(s) added, version " << merged.version() << '\n';
      return kExitOk;
    }

    if (cmd == "review" && interactive) {
      const fs::path wd = cfg.paths.workdir;
      WorkdirLock lock(wd);
      const auto candidates = all_candidates(cfg, wd);
      fs::create_directories(wd / "review");
      extract::DecisionLog log(decision_log_path(wd).string());
      extract::SessionOptions opt;
      opt.reviewer = cfg.reviewer;
      opt.max_contexts = max_contexts;
      const auto res = extract::review_session(candidates, log, io.in, io.out, opt);
      io.err << "review: " << res.decided << " decided of " << res.presented << " presented"
             << (res.quit ? " (stopped early; rerun to resume)" : "") << '\n';
      return kExitOk;
    }

    run_stages(cfg, stages, io.err);
    return kExitOk;
  } catch (const Error& e) {
    io.err << "error: " << e.what() << '\n';
    return e.code() == ErrorCode::config ? kExitUsage : kExitData;
  } catch (const std::exception& e) {
    io.err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
}

}  // namespace lexiforge::pipeline
