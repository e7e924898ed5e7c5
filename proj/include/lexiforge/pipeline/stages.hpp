#pragma once

// The pipeline stages. Each one reads earlier stages' outputs from the work
// directory and writes its own directory through run_stage, so any stage can
// be rerun on its own and reproduces the same bytes.
//
//   ingest/          passages.jsonl stats.tsv skipped.tsv
//   lexicon/         lexicon.tsv candidates.tsv
//   annotate/        corpus.jsonl corpus.conll annotated.txt
//   blocks/          blocks.jsonl audit.tsv
//   split/schemeN/   train.ids test.ids keywords.txt train.conll test.conll
//   train/M-sN/      model.lxf history.tsv
//   tag/M-sN/        predictions.conll
//   extract/M-sN/    candidates.jsonl
//   review/          decisions.jsonl (append-only, kept across runs)
//   eval/            report.tsv report.md [acceptance.tsv]

#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "lexiforge/annotate/annotation.hpp"
#include "lexiforge/corpusprep/blocks.hpp"
#include "lexiforge/corpusprep/split.hpp"
#include "lexiforge/eval/report.hpp"
#include "lexiforge/extract/review.hpp"
#include "lexiforge/extract/stats.hpp"
#include "lexiforge/ingest/ingest.hpp"
#include "lexiforge/lexicon/cvalue.hpp"
#include "lexiforge/pipeline/config.hpp"
#include "lexiforge/pipeline/workdir.hpp"
#include "lexiforge/tagger/train.hpp"

namespace lexiforge::pipeline {

struct Unit {
  std::string model;
  int scheme = 1;

  std::string id() const { return model + "-s" + std::to_string(scheme); }
};

inline std::vector<Unit> units(const PipelineConfig& c) {
  std::vector<Unit> out;
  for (const auto& m : c.models) {
    const std::string name(tagger::to_string(tagger::parse_model_kind(m)));
    for (int s : c.schemes) out.push_back({name, s});
  }
  return out;
}

inline std::string scheme_dir(int s) { return "split/scheme" + std::to_string(s); }

namespace detail {

inline std::ofstream open_out(const fs::path& p) {
  fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error(ErrorCode::io, "cannot write '" + p.string() + "'");
  return out;
}

inline std::ifstream open_in(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot read '" + p.string() + "'");
  return in;
}

inline std::optional<text::LemmaTable> lemmas_of(const PipelineConfig& c, StageContext& ctx) {
  if (c.paths.lemmas.empty()) return std::nullopt;
  auto in = open_in(ctx.input(c.paths.lemmas));
  return text::load_lemma_table(in);
}

inline std::vector<annotate::AnnotatedSentence> read_corpus(const fs::path& p) {
  auto in = open_in(p);
  return annotate::read_sentences_jsonl(in);
}

inline std::vector<annotate::ConllSentence> read_conll_file(const fs::path& p) {
  auto in = open_in(p);
  return annotate::read_conll(in);
}

inline std::vector<corpusprep::ContextBlock> read_blocks_file(const fs::path& p) {
  auto in = open_in(p);
  return corpusprep::read_blocks(in);
}

inline std::vector<extract::CandidateTerm> read_candidates_file(const fs::path& p) {
  auto in = open_in(p);
  return extract::read_candidates(in);
}

inline void write_conll_file(const fs::path& p, const std::vector<annotate::AnnotatedSentence>& sentences) {
  auto out = open_out(p);
  for (const auto& s : sentences) annotate::write_conll(out, annotate::to_conll(s));
}

inline std::vector<tagger::Example> examples_of(const std::vector<annotate::ConllSentence>& conll) {
  const tagger::LabelSet labels;
  std::vector<tagger::Example> out;
  for (const auto& s : conll) out.push_back({s.tokens, labels.encode(s.gold)});
  return out;
}

}  // namespace detail

inline json run_ingest(const PipelineConfig& c, const fs::path& wd) {
  return run_stage(wd, "ingest", [&](StageContext& ctx) {
    const auto manifest = ingest::load_manifest(ctx.input(c.paths.manifest).string());
    for (const auto& e : manifest) {
      if (fs::exists(e.path)) ctx.inputs.push_back(e.path);
    }
    ctx.params = to_json(c)["filter"];
    ingest::write_store(ingest::ingest(manifest, c.filter), ctx.out);
  });
}

inline json run_lexicon(const PipelineConfig& c, const fs::path& wd) {
  return run_stage(wd, "lexicon", [&](StageContext& ctx) {
    const auto lemmas = detail::lemmas_of(c, ctx);
    const auto lex = lexicon::load_lexicon_file(ctx.input(c.paths.lexicon).string(), lemmas ? &*lemmas : nullptr);
    {
      auto out = detail::open_out(ctx.out / "lexicon.tsv");
      lexicon::write_lexicon(out, lex);
    }
    // Term bootstrap: C-value ranking over the retained passages.
    auto in = detail::open_in(ctx.stage_input("ingest", "passages.jsonl"));
    const std::set<std::string> langs(c.languages.begin(), c.languages.end());
    std::vector<std::string> docs;
    for (const auto& p : ingest::read_passages(in)) {
      if (langs.count(p.lang)) docs.push_back(p.text);
    }
    auto out = detail::open_out(ctx.out / "candidates.tsv");
    lexicon::write_candidate_report(out, lexicon::cvalue_candidates(docs, c.cvalue_max_n, c.cvalue_min_freq));
    ctx.params = {{"languages", c.languages}, {"cvalue_max_n", c.cvalue_max_n}, {"cvalue_min_freq", c.cvalue_min_freq}};
  });
}

inline json run_annotate(const PipelineConfig& c, const fs::path& wd) {
  return run_stage(wd, "annotate", [&](StageContext& ctx) {
    const auto lemmas = detail::lemmas_of(c, ctx);
    const text::LemmaTable* lt = lemmas ? &*lemmas : nullptr;
    const auto lex = lexicon::load_lexicon_file(ctx.stage_input("lexicon", "lexicon.tsv").string(), lt);
    const annotate::TermMatcher matcher(lex, lt);
    auto in = detail::open_in(ctx.stage_input("ingest", "passages.jsonl"));
    const auto passages = ingest::read_passages(in);
    std::vector<annotate::AnnotatedSentence> corpus;
    for (const auto& doc : ingest::documents_of(passages, {c.languages.begin(), c.languages.end()})) {
      for (auto& s : annotate::annotate_document(doc, matcher)) corpus.push_back(std::move(s));
    }
    {
      auto out = detail::open_out(ctx.out / "corpus.jsonl");
      annotate::write_jsonl(out, corpus);
    }
    detail::write_conll_file(ctx.out / "corpus.conll", corpus);
    auto out = detail::open_out(ctx.out / "annotated.txt");
    for (const auto& s : corpus) out << annotate::emit_annotation(s.sentence, s.spans) << '\n';
    ctx.params = {{"languages", c.languages}};
  });
}

inline json run_blocks(const PipelineConfig& c, const fs::path& wd) {
  return run_stage(wd, "blocks", [&](StageContext& ctx) {
    const auto corpus = detail::read_corpus(ctx.stage_input("annotate", "corpus.jsonl"));
    const auto store = corpusprep::load_embeddings_file(ctx.input(c.paths.embeddings).string());
    auto blocks = corpusprep::build_blocks_for_corpus(corpus);
    const auto kept = corpusprep::filter_blocks(blocks, store, c.threshold);
    {
      auto out = detail::open_out(ctx.out / "blocks.jsonl");
      corpusprep::write_blocks(out, kept);
    }
    auto audit = detail::open_out(ctx.out / "audit.tsv");
    audit << "block_id\tterm\tcategory\tsource\tsimilarity\tkept\n";
    for (const auto& b : blocks) {
      audit << b.block_id << '\t' << b.term << '\t' << code(b.category) << '\t' << annotate::to_string(b.source)
            << '\t' << eval::full_precision(b.similarity) << '\t' << (b.similarity >= c.threshold ? 1 : 0) << '\n';
    }
    ctx.params = {{"threshold", c.threshold}};
  });
}

inline corpusprep::SplitScheme scheme_of(const PipelineConfig& c, int id) {
  return corpusprep::make_scheme(id, derive_seed(c.seed, "split"));
}

inline json run_split(const PipelineConfig& c, const fs::path& wd, int scheme_id) {
  return run_stage(wd, scheme_dir(scheme_id), [&](StageContext& ctx) {
    const auto blocks = detail::read_blocks_file(ctx.stage_input("blocks", "blocks.jsonl"));
    std::vector<corpusprep::ContextBlock> web, pdf;
    for (const auto& b : blocks) (b.source == annotate::Source::web ? web : pdf).push_back(b);
    const auto scheme = scheme_of(c, scheme_id);
    const auto split = corpusprep::split_dataset(web, pdf, scheme);
    {
      auto out = detail::open_out(ctx.out / "train.ids");
      corpusprep::write_ids(out, split.train);
    }
    {
      auto out = detail::open_out(ctx.out / "test.ids");
      corpusprep::write_ids(out, split.test);
    }
    {
      auto out = detail::open_out(ctx.out / "keywords.txt");
      for (const auto& k : split.train_keywords) out << k << '\n';
    }
    // Blocks overlap, so a sentence may sit in blocks on both sides; it is
    // trained on and kept out of the held-out sentences.
    const auto train = corpusprep::unique_sentences(split.train);
    std::set<std::string> seen;
    for (const auto& s : train) seen.insert(annotate::sentence_id(s.sentence));
    std::vector<annotate::AnnotatedSentence> test;
    for (auto& s : corpusprep::unique_sentences(split.test)) {
      if (!seen.count(annotate::sentence_id(s.sentence))) test.push_back(std::move(s));
    }
    detail::write_conll_file(ctx.out / "train.conll", train);
    detail::write_conll_file(ctx.out / "test.conll", test);
    ctx.params = {{"scheme", scheme_id},
                  {"seed", scheme.seed},
                  {"web_train_frac", scheme.web_train_frac},
                  {"pdf_train_frac", scheme.pdf_train_frac},
                  {"keyword_train_frac", scheme.keyword_train_frac},
                  {"per_source_keywords", scheme.per_source_keywords}};
  });
}

inline constexpr double kDevFraction = 0.1;

// Seeded hold-out of a tenth of the training sentences for early stopping.
inline void dev_split(std::vector<tagger::Example> all, std::uint64_t seed, std::vector<tagger::Example>& train,
                      std::vector<tagger::Example>& dev) {
  std::vector<std::size_t> order(all.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(seed);
  shuffle(order, rng);
  const std::size_t n_dev = all.size() >= 10 ? corpusprep::detail::fraction_count(kDevFraction, all.size()) : 0;
  std::vector<bool> is_dev(all.size(), false);
  for (std::size_t i = 0; i < n_dev; ++i) is_dev[order[i]] = true;
  for (std::size_t i = 0; i < all.size(); ++i) (is_dev[i] ? dev : train).push_back(std::move(all[i]));
}

inline tagger::TrainConfig train_config_for(const PipelineConfig& c, const Unit& u) {
  auto tc = c.train;
  tc.seed = derive_seed(c.seed, "train/" + u.id());
  return tc;
}

inline json run_train(const PipelineConfig& c, const fs::path& wd, const Unit& u,
                      const std::function<void(const tagger::EpochRecord&)>& on_epoch = {}) {
  return run_stage(wd, "train/" + u.id(), [&](StageContext& ctx) {
    const auto conll = detail::read_conll_file(ctx.stage_input(scheme_dir(u.scheme), "train.conll"));
    std::vector<tagger::Example> train, dev;
    dev_split(detail::examples_of(conll), derive_seed(c.seed, "dev"), train, dev);
    const auto tc = train_config_for(c, u);
    auto result = tagger::train<double>(tagger::parse_model_kind(u.model), train, dev, tc, c.cnn, on_epoch);
    json history = json::array();
    auto hist = detail::open_out(ctx.out / "history.tsv");
    hist << "epoch\ttrain_loss\tdev_precision\tdev_recall\tdev_f1\n";
    for (const auto& r : result.history) {
      hist << r.epoch << '\t' << eval::full_precision(r.train_loss) << '\t' << eval::full_precision(r.dev.precision)
           << '\t' << eval::full_precision(r.dev.recall) << '\t' << eval::full_precision(r.dev.f1) << '\n';
      history.push_back({{"epoch", r.epoch}, {"train_loss", r.train_loss}, {"dev_f1", r.dev.f1}});
    }
    const json info = {{"model", u.model},
                       {"scheme", u.scheme},
                       {"train_sentences", train.size()},
                       {"dev_sentences", dev.size()},
                       {"best_epoch", result.best_epoch},
                       {"history", history}};
    tagger::save_model_file((ctx.out / "model.lxf").string(), result.model, info);
    ctx.params = {{"model", u.model}, {"scheme", u.scheme}, {"train", tagger::train_config_to_json(tc)}};
    if (tagger::uses_cnn(tagger::parse_model_kind(u.model))) ctx.params["cnn"] = tagger::detail::cnn_to_json(c.cnn);
  });
}

inline json run_tag(const fs::path& wd, const Unit& u) {
  return run_stage(wd, "tag/" + u.id(), [&](StageContext& ctx) {
    const auto loaded = tagger::load_model_file(ctx.stage_input("train/" + u.id(), "model.lxf").string());
    auto test = detail::read_conll_file(ctx.stage_input(scheme_dir(u.scheme), "test.conll"));
    std::vector<std::vector<std::string>> tokens;
    for (const auto& s : test) tokens.push_back(s.tokens);
    const auto pred = loaded.model.predict(tokens);
    auto out = detail::open_out(ctx.out / "predictions.conll");
    for (std::size_t i = 0; i < test.size(); ++i) {
      test[i].predicted = pred[i];
      annotate::write_conll(out, test[i]);
    }
    ctx.params = {{"model", u.model}, {"scheme", u.scheme}};
  });
}

inline json run_extract(const PipelineConfig& c, const fs::path& wd, const Unit& u) {
  return run_stage(wd, "extract/" + u.id(), [&](StageContext& ctx) {
    const auto tagged = detail::read_conll_file(ctx.stage_input("tag/" + u.id(), "predictions.conll"));
    std::map<std::string, annotate::Sentence> by_id;
    for (auto& s : detail::read_corpus(ctx.stage_input("annotate", "corpus.jsonl"))) {
      by_id.emplace(annotate::sentence_id(s.sentence), std::move(s.sentence));
    }
    std::vector<std::vector<annotate::BioLabel>> preds;
    std::vector<annotate::Sentence> sentences;
    for (const auto& t : tagged) {
      auto it = by_id.find(t.sent_id);
      if (it == by_id.end()) throw Error(ErrorCode::unknown_id, "tagged sentence '" + t.sent_id + "' not in corpus");
      preds.push_back(t.predicted);
      sentences.push_back(it->second);
    }
    const auto lex = lexicon::load_lexicon_file(ctx.stage_input("lexicon", "lexicon.tsv").string());
    const auto store = corpusprep::load_embeddings_file(ctx.input(c.paths.embeddings).string());
    extract::CollectOptions opt;
    opt.threshold = c.extract_threshold;
    opt.seed_keywords = c.extract_keywords;
    opt.model_id = u.model;
    opt.scheme_id = u.scheme;
    auto out = detail::open_out(ctx.out / "candidates.jsonl");
    extract::write_candidates(out, extract::collect_candidates(preds, sentences, lex, store, opt));
    ctx.params = {{"model", u.model},
                  {"scheme", u.scheme},
                  {"threshold", c.extract_threshold},
                  {"seed_keywords", c.extract_keywords}};
  });
}

inline fs::path decision_log_path(const fs::path& wd) { return wd / "review" / "decisions.jsonl"; }

// Candidates of every configured unit that has been extracted.
inline std::vector<extract::CandidateTerm> all_candidates(const PipelineConfig& c, const fs::path& wd,
                                                          std::vector<fs::path>* read = nullptr) {
  std::vector<extract::CandidateTerm> out;
  for (const auto& u : units(c)) {
    const auto p = wd / "extract" / u.id() / "candidates.jsonl";
    if (!fs::exists(p)) continue;
    if (read) read->push_back(p);
    for (auto& cand : detail::read_candidates_file(p)) out.push_back(std::move(cand));
  }
  return out;
}

// Scripted review: replays the configured decision script into the
// persistent log. Without a script this stage does nothing.
inline std::optional<json> run_review(const PipelineConfig& c, const fs::path& wd) {
  if (c.paths.review_script.empty()) return std::nullopt;
  std::vector<fs::path> inputs{c.paths.review_script};
  const auto candidates = all_candidates(c, wd, &inputs);
  auto script_in = detail::open_in(c.paths.review_script);
  const auto script = extract::read_decisions(script_in);
  fs::create_directories(wd / "review");
  extract::DecisionLog log(decision_log_path(wd).string());
  const auto applied = extract::replay_decisions(candidates, log, script);
  StageContext ctx{wd, wd / "review", {{"script_decisions", script.size()}}, inputs};
  auto manifest = stage_manifest("review", ctx);
  write_text(wd / "review" / "manifest.json", manifest.dump(2) + "\n");
  manifest["applied"] = applied;
  return manifest;
}

inline json run_eval(const PipelineConfig& c, const fs::path& wd) {
  return run_stage(wd, "eval", [&](StageContext& ctx) {
    std::vector<eval::MetricCell> cells;
    for (const auto& u : units(c)) {
      const auto p = wd / "tag" / u.id() / "predictions.conll";
      if (!fs::exists(p)) continue;
      std::vector<std::vector<annotate::BioLabel>> pred, gold;
      for (auto& s : detail::read_conll_file(ctx.input(p))) {
        if (s.predicted.size() != s.gold.size()) {
          throw Error(ErrorCode::length_mismatch, p.string() + ": sentence '" + s.sent_id + "' lacks predictions");
        }
        pred.push_back(std::move(s.predicted));
        gold.push_back(std::move(s.gold));
      }
      const auto scores = eval::score_corpus(pred, gold, c.include_mac);
      for (auto level : {eval::Level::token, eval::Level::entity}) {
        cells.push_back(eval::make_cell(u.model, u.scheme, level, scores.at(level)));
      }
    }
    if (cells.empty()) throw Error(ErrorCode::io, "no tagged output to evaluate; run the 'tag' stage first");
    {
      auto out = detail::open_out(ctx.out / "report.tsv");
      eval::write_metrics_tsv(out, cells);
    }
    auto md = detail::open_out(ctx.out / "report.md");
    md << "# Evaluation\n\n";
    md << (c.include_mac ? "Scores include the macro-term class.\n\n" : "Scores exclude the macro-term class.\n\n");
    eval::render_table3(md, cells, eval::Level::entity);
    md << '\n';
    eval::render_table3(md, cells, eval::Level::token);
    if (fs::exists(decision_log_path(wd))) {
      auto log_in = detail::open_in(ctx.input(decision_log_path(wd)));
      const auto decisions = extract::read_decisions(log_in, ErrorCode::corrupt_state);
      std::vector<fs::path> read;
      const auto candidates = all_candidates(c, wd, &read);
      for (const auto& p : read) ctx.input(p);
      const auto acceptance = extract::acceptance_stats(decisions, &candidates);
      auto out = detail::open_out(ctx.out / "acceptance.tsv");
      eval::write_acceptance_tsv(out, acceptance);
      md << '\n';
      eval::render_table4(md, acceptance);
    }
    ctx.params = {{"include_mac", c.include_mac}};
  });
}

}  // namespace lexiforge::pipeline
