#pragma once

// Pipeline configuration: one JSON document, command-line overrides on top,
// built-in defaults underneath. Relative paths resolve against the config
// file's directory.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "lexiforge/annotate/corpus.hpp"
#include "lexiforge/corpusprep/split.hpp"
#include "lexiforge/extract/candidates.hpp"
#include "lexiforge/ingest/rules.hpp"
#include "lexiforge/tagger/io.hpp"

namespace lexiforge::pipeline {

namespace fs = std::filesystem;
using annotate::json;

inline const std::vector<std::string>& stage_names() {
  static const std::vector<std::string> s = {"ingest", "lexicon", "annotate", "blocks", "split",
                                             "train",  "tag",     "extract",  "review", "eval"};
  return s;
}

struct PipelineConfig {
  struct Paths {
    std::string manifest, lexicon, embeddings, lemmas, workdir, review_script;
  } paths;
  std::uint64_t seed = 2024;
  std::vector<std::string> languages = {"en"};
  ingest::FilterRules filter;
  std::size_t cvalue_max_n = 4;
  std::size_t cvalue_min_freq = 2;
  double threshold = corpusprep::kDefaultThreshold;  // block gate
  double extract_threshold = 0.5;                     // candidate gate
  std::vector<std::string> extract_keywords = extract::default_seed_keywords();
  std::vector<int> schemes = {1};
  std::vector<std::string> models = {"linear-crf", "cnn-crf"};
  tagger::TrainConfig train;
  tagger::CnnConfig cnn;
  std::string reviewer = "expert";
  bool include_mac = true;
};

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<double> threshold;
  std::optional<int> scheme;
  std::optional<std::string> model;
  std::optional<std::string> workdir;
};

namespace detail {

[[noreturn]] inline void field_error(const std::string& field, const std::string& msg) {
  throw Error(ErrorCode::config, "config field '" + field + "': " + msg);
}

inline void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) field_error(where.empty() ? "<root>" : where, "expected an object");
  for (const auto& [k, _] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || k == a;
    if (!ok) field_error(where.empty() ? k : where + "." + k, "unknown key");
  }
}

template <class T>
void read(const json& j, const char* key, const std::string& where, T& dst) {
  if (!j.contains(key)) return;
  try {
    dst = j.at(key).get<T>();
  } catch (const json::exception&) {
    field_error(where.empty() ? key : where + "." + key, "wrong type");
  }
}

inline std::string resolve(const std::string& p, const fs::path& base) {
  if (p.empty() || fs::path(p).is_absolute() || base.empty()) return p;
  return (base / p).lexically_normal().string();
}

}  // namespace detail

inline PipelineConfig config_from_json(const json& j, const fs::path& base = {}) {
  using detail::read;
  PipelineConfig c;
  detail::check_keys(j, "", {"paths", "seed", "languages", "filter", "lexicon", "threshold", "split", "models",
                             "train", "cnn", "extract", "review", "report"});
  if (j.contains("paths")) {
    const auto& p = j["paths"];
    detail::check_keys(p, "paths", {"manifest", "lexicon", "embeddings", "lemmas", "workdir"});
    read(p, "manifest", "paths", c.paths.manifest);
    read(p, "lexicon", "paths", c.paths.lexicon);
    read(p, "embeddings", "paths", c.paths.embeddings);
    read(p, "lemmas", "paths", c.paths.lemmas);
    read(p, "workdir", "paths", c.paths.workdir);
  }
  read(j, "seed", "", c.seed);
  read(j, "languages", "", c.languages);
  if (j.contains("filter")) {
    const auto& f = j["filter"];
    detail::check_keys(f, "filter", {"seed_keywords", "url_excludes", "allowed_tags", "homepage_only", "max_depth"});
    read(f, "seed_keywords", "filter", c.filter.seed_keywords);
    read(f, "url_excludes", "filter", c.filter.url_excludes);
    read(f, "allowed_tags", "filter", c.filter.allowed_tags);
    read(f, "homepage_only", "filter", c.filter.homepage_only);
    read(f, "max_depth", "filter", c.filter.max_depth);
  }
  if (j.contains("lexicon")) {
    detail::check_keys(j["lexicon"], "lexicon", {"cvalue_max_n", "cvalue_min_freq"});
    read(j["lexicon"], "cvalue_max_n", "lexicon", c.cvalue_max_n);
    read(j["lexicon"], "cvalue_min_freq", "lexicon", c.cvalue_min_freq);
  }
  read(j, "threshold", "", c.threshold);
  if (j.contains("split")) {
    detail::check_keys(j["split"], "split", {"schemes"});
    read(j["split"], "schemes", "split", c.schemes);
  }
  read(j, "models", "", c.models);
  if (j.contains("train")) {
    detail::check_keys(j["train"], "train", {"learning_rate", "batch_size", "max_epochs", "patience", "min_freq",
                                             "init_scale", "beta1", "beta2", "adam_eps"});
    try {
      c.train = tagger::train_config_from_json(j["train"]);
    } catch (const json::exception&) {
      detail::field_error("train", "wrong type");
    }
  }
  if (j.contains("cnn")) {
    detail::check_keys(j["cnn"], "cnn", {"embed_dim", "kernel_a", "kernel_b", "parallel_channels", "deep_layers",
                                         "deep_channels", "deep_kernel", "dropout"});
    try {
      c.cnn = tagger::detail::cnn_from_json(j["cnn"]);
    } catch (const json::exception&) {
      detail::field_error("cnn", "wrong type");
    }
  }
  if (j.contains("extract")) {
    detail::check_keys(j["extract"], "extract", {"threshold", "seed_keywords"});
    read(j["extract"], "threshold", "extract", c.extract_threshold);
    read(j["extract"], "seed_keywords", "extract", c.extract_keywords);
  }
  if (j.contains("review")) {
    detail::check_keys(j["review"], "review", {"script", "reviewer"});
    read(j["review"], "script", "review", c.paths.review_script);
    read(j["review"], "reviewer", "review", c.reviewer);
  }
  if (j.contains("report")) {
    detail::check_keys(j["report"], "report", {"include_mac"});
    read(j["report"], "include_mac", "report", c.include_mac);
  }
  for (auto* p : {&c.paths.manifest, &c.paths.lexicon, &c.paths.embeddings, &c.paths.lemmas, &c.paths.workdir,
                  &c.paths.review_script}) {
    *p = detail::resolve(*p, base);
  }
  return c;
}

// Flag > config file > environment (work directory only) > default.
inline PipelineConfig resolve_config(const std::optional<fs::path>& config_file, const Overrides& o,
                                     const std::function<const char*(const char*)>& getenv = ::getenv) {
  PipelineConfig c;
  if (config_file) {
    std::ifstream in(*config_file);
    if (!in) throw Error(ErrorCode::config, "cannot open config '" + config_file->string() + "'");
    json j;
    try {
      j = json::parse(in);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::config, "config '" + config_file->string() + "' is not valid JSON: " + e.what());
    }
    c = config_from_json(j, fs::absolute(*config_file).parent_path());
  }
  if (c.paths.workdir.empty()) {
    if (const char* env = getenv("LEXIFORGE_WORKDIR"); env && *env) c.paths.workdir = env;
  }
  if (o.seed) c.seed = *o.seed;
  if (o.threshold) c.threshold = *o.threshold;
  if (o.scheme) c.schemes = {*o.scheme};
  if (o.model) c.models = {*o.model};
  if (o.workdir) c.paths.workdir = *o.workdir;
  return c;
}

// Checks everything the given stages will need, naming the offending field.
inline void validate(const PipelineConfig& c, const std::set<std::string>& stages) {
  using detail::field_error;
  auto need_file = [&](const std::string& value, const std::string& field) {
    if (value.empty()) field_error(field, "required");
    if (!fs::is_regular_file(value)) field_error(field, "file not found: " + value);
  };
  auto uses = [&](const char* s) { return stages.count(s) > 0; };
  if (c.paths.workdir.empty()) field_error("paths.workdir", "required (or set LEXIFORGE_WORKDIR)");
  if (uses("ingest")) need_file(c.paths.manifest, "paths.manifest");
  if (uses("lexicon")) need_file(c.paths.lexicon, "paths.lexicon");
  if (uses("blocks") || uses("extract")) need_file(c.paths.embeddings, "paths.embeddings");
  if (!c.paths.lemmas.empty()) need_file(c.paths.lemmas, "paths.lemmas");
  if (uses("review") && !c.paths.review_script.empty()) need_file(c.paths.review_script, "review.script");
  if (c.languages.empty()) field_error("languages", "must not be empty");
  try {
    c.filter.validate();
  } catch (const Error& e) {
    field_error("filter", e.what());
  }
  if (c.cvalue_max_n < 2 || c.cvalue_max_n > 6) field_error("lexicon.cvalue_max_n", "must be in [2, 6]");
  if (c.cvalue_min_freq < 1) field_error("lexicon.cvalue_min_freq", "must be >= 1");
  if (!(c.threshold >= 0.0 && c.threshold <= 1.0)) field_error("threshold", "must be in [0, 1]");
  if (!(c.extract_threshold >= 0.0 && c.extract_threshold <= 1.0)) field_error("extract.threshold", "must be in [0, 1]");
  if (c.schemes.empty()) field_error("split.schemes", "must not be empty");
  for (int s : c.schemes) {
    if (s < 1 || s > 4) field_error("split.schemes", "scheme must be 1..4, got " + std::to_string(s));
  }
  if (c.models.empty()) field_error("models", "must not be empty");
  for (const auto& m : c.models) {
    try {
      tagger::parse_model_kind(m);
    } catch (const Error& e) {
      field_error("models", e.what());
    }
  }
  try {
    c.train.validate();
  } catch (const Error& e) {
    field_error("train", e.what());
  }
  try {
    c.cnn.validate();
  } catch (const Error& e) {
    field_error("cnn", e.what());
  }
}

inline json to_json(const PipelineConfig& c) {
  json j;
  j["paths"] = {{"manifest", c.paths.manifest},     {"lexicon", c.paths.lexicon}, {"embeddings", c.paths.embeddings},
                {"lemmas", c.paths.lemmas},         {"workdir", c.paths.workdir}};
  j["seed"] = c.seed;
  j["languages"] = c.languages;
  j["filter"] = {{"seed_keywords", c.filter.seed_keywords},
                 {"url_excludes", c.filter.url_excludes},
                 {"allowed_tags", c.filter.allowed_tags},
                 {"homepage_only", c.filter.homepage_only},
                 {"max_depth", c.filter.max_depth}};
  j["lexicon"] = {{"cvalue_max_n", c.cvalue_max_n}, {"cvalue_min_freq", c.cvalue_min_freq}};
  j["threshold"] = c.threshold;
  j["split"] = {{"schemes", c.schemes}};
  j["models"] = c.models;
  auto train = tagger::train_config_to_json(c.train);
  train.erase("seed");
  train.erase("optimizer");
  j["train"] = train;
  j["cnn"] = tagger::detail::cnn_to_json(c.cnn);
  j["extract"] = {{"threshold", c.extract_threshold}, {"seed_keywords", c.extract_keywords}};
  j["review"] = {{"script", c.paths.review_script}, {"reviewer", c.reviewer}};
  j["report"] = {{"include_mac", c.include_mac}};
  return j;
}

}  // namespace lexiforge::pipeline
