// Copyright 2026 The Keyness Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "keyness/evalx.hpp"
#include "keyness/neural/gradcheck.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace keyness::cli {
namespace {

constexpr const char* kModelDirEnv = "KEYNESS_MODEL_DIR";
constexpr const char* kIdentifierFile = "identifier.model";
constexpr const char* kRankerFile = "ranker.model";

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::uint64_t seed = 1;
  std::size_t jobs = default_jobs();
  std::string log_level = "warn";
  std::string sublanguage;  // empty: take it from the files
};

struct ModelOptions {
  std::string model_dir;
  std::string stats;
  std::string embeddings;
  double cluster_threshold = kDefaultClusterThreshold;
};

struct TrainOptions {
  int epochs = 0;
  std::size_t batch = 0;
  double lr = 0.0;
  std::string optimizer;
};

void add_common(CLI::App& app, Common& c) {
  app.add_option("--seed", c.seed, "Seed for every random choice")->capture_default_str();
  app.add_option("--jobs", c.jobs, "Worker threads for document-level work")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--log-level", c.log_level, "quiet, warn, info or debug")
      ->check(CLI::IsMember({"quiet", "warn", "info", "debug"}))
      ->capture_default_str();
  app.add_option("--sublanguage", c.sublanguage, "Override the sublanguage of every document");
}

void add_model(CLI::App& app, ModelOptions& m, bool stats = true) {
  app.add_option("--model-dir", m.model_dir,
                 std::string("Model directory (default: $") + kModelDirEnv + ")");
  if (stats) app.add_option("--stats", m.stats, "Reference corpus statistics")->required();
  app.add_option("--embeddings", m.embeddings, "Embedding table for term clustering");
  app.add_option("--cluster-threshold", m.cluster_threshold, "Cosine distance for term groups")
      ->capture_default_str();
}

void add_training(CLI::App& app, TrainOptions& t, const pu::TrainingConfig& defaults) {
  t.epochs = defaults.epochs;
  t.batch = defaults.batch_size;
  t.lr = defaults.optimizer.learning_rate;
  t.optimizer = nn::to_string(defaults.optimizer.kind);
  app.add_option("--epochs", t.epochs)->capture_default_str();
  app.add_option("--batch", t.batch)->capture_default_str();
  app.add_option("--lr", t.lr)->capture_default_str();
  app.add_option("--optimizer", t.optimizer, "sgd, adam or adadelta")
      ->check(CLI::IsMember({"sgd", "adam", "adadelta"}))
      ->capture_default_str();
}

pu::TrainingConfig training_config(const pu::TrainingConfig& defaults, const TrainOptions& t,
                                   const Common& c) {
  auto cfg = defaults;
  cfg.epochs = t.epochs;
  cfg.batch_size = t.batch;
  cfg.optimizer.learning_rate = t.lr;
  cfg.optimizer.kind = nn::optimizer_from_string(t.optimizer);
  cfg.seed = c.seed;
  return cfg;
}

void apply_common(const Common& c) {
  if (c.log_level == "quiet") log::set_level(log::Level::quiet);
  if (c.log_level == "warn") log::set_level(log::Level::warn);
  if (c.log_level == "info") log::set_level(log::Level::info);
  if (c.log_level == "debug") log::set_level(log::Level::debug);
  if (!c.sublanguage.empty() && c.sublanguage != "unknown" && !is_registered_sublanguage(c.sublanguage)) {
    throw UsageError("unknown sublanguage '" + c.sublanguage + "'");
  }
}

json common_json(const Common& c) {
  return {{"seed", c.seed},
          {"sublanguage", c.sublanguage.empty() ? json(nullptr) : json(c.sublanguage)}};
}

fs::path model_dir(const ModelOptions& m) {
  if (!m.model_dir.empty()) return m.model_dir;
  if (const char* env = std::getenv(kModelDirEnv); env && *env) return env;
  throw UsageError(std::string("no model directory: pass --model-dir or set ") + kModelDirEnv);
}

std::vector<Dataset> load_manifests(const std::vector<std::string>& paths, const Common& c) {
  std::vector<Dataset> out;
  for (const auto& p : paths) {
    auto ds = load_dataset(p);
    if (!c.sublanguage.empty()) {
      ds.sublanguage = c.sublanguage;
      for (auto& d : ds.documents) d.sublanguage = c.sublanguage;
    }
    out.push_back(std::move(ds));
  }
  return out;
}

std::unique_ptr<Embedder> make_embedder(const ModelOptions& m) {
  if (m.embeddings.empty()) return std::make_unique<LexicalEmbedder>();
  return std::make_unique<TableEmbedder>(TableEmbedder::load(m.embeddings));
}

json model_json(const ModelOptions& m) {
  return {{"stats", m.stats},
          {"embeddings", m.embeddings.empty() ? json("lexical") : json(m.embeddings)},
          {"cluster_threshold", m.cluster_threshold}};
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  return out;
}

// Writes to `path`, or to stdout when it is empty or "-". File outputs get a
// `<path>.config.json` sidecar with the resolved configuration.
template <typename Fn>
void emit(const std::string& path, const json& config, Fn&& write) {
  if (path.empty() || path == "-") {
    write(std::cout);
    std::cout.flush();
    log::info("config: ", config.dump());
    return;
  }
  auto out = open_out(path);
  write(out);
  open_out(path + ".config.json") << config.dump(1) << '\n';
}

std::vector<std::vector<AnalyzedDocument>> analyze_all(const std::vector<Dataset>& sets,
                                                       const nn::IdentifierModel& identifier,
                                                       const Embedder& embedder,
                                                       const CorpusStats& stats,
                                                       const ModelOptions& m, std::size_t jobs) {
  std::vector<std::vector<AnalyzedDocument>> out;
  for (const auto& ds : sets) {
    out.push_back(with_context("dataset '" + ds.name + "'", [&] {
      return analyze_documents(ds.documents, identifier, embedder, stats, m.cluster_threshold, jobs);
    }));
  }
  return out;
}

// ---- subcommands -----------------------------------------------------------

int build_stats(const Common& c, const std::vector<std::string>& manifests, const std::string& out) {
  const auto sets = load_manifests(manifests, c);
  std::vector<const Document*> docs;
  for (const auto& ds : sets) {
    for (const auto& d : ds.documents) docs.push_back(&d);
  }
  auto j = to_json(build_corpus_stats(docs));
  j["config"] = {{"manifests", manifests}, {"documents", docs.size()}};
  open_out(out) << j.dump() << '\n';
  log::info("stats over ", docs.size(), " documents written to ", out);
  return 0;
}

int train_identifier(const Common& c, const std::vector<std::string>& manifests, const ModelOptions& m,
                     const pu::TrainingConfig& cfg) {
  const auto dir = model_dir(m);
  const auto sets = load_manifests(manifests, c);
  const auto proto = nn::IdentifierModel::create({}, derive_seed(cfg.seed, 0));
  std::vector<pu::IdentifierPool> pools;
  for (const auto& ds : sets) pools.push_back(pu::identifier_pool(ds, proto));
  fs::create_directories(dir);
  auto log_out = open_out(dir / "identifier_log.jsonl");
  auto run = pu::train_identifier(pools, cfg, {}, &log_out);
  run.model.training_config()["manifests"] = manifests;
  run.model.save(dir / kIdentifierFile);
  log::info("identifier written to ", (dir / kIdentifierFile).string());
  return 0;
}

int train_ranker(const Common& c, const std::vector<std::string>& manifests, const ModelOptions& m,
                 const pu::TrainingConfig& cfg) {
  const auto dir = model_dir(m);
  const auto sets = load_manifests(manifests, c);
  const auto identifier = nn::IdentifierModel::load(dir / kIdentifierFile);
  const auto stats = load_stats(m.stats);
  const auto embedder = make_embedder(m);
  const auto analyzed = analyze_all(sets, identifier, *embedder, stats, m, c.jobs);
  std::vector<pu::RankerPool> pools;
  for (std::size_t i = 0; i < sets.size(); ++i) pools.push_back(pu::ranker_pool(sets[i], analyzed[i]));
  auto log_out = open_out(dir / "ranker_log.jsonl");
  auto run = pu::train_ranker(pools, cfg, {}, &log_out);
  run.model.training_config()["manifests"] = manifests;
  run.model.training_config()["features"] = model_json(m);
  run.model.save(dir / kRankerFile);
  log::info("ranker written to ", (dir / kRankerFile).string());
  return 0;
}

int extract_cmd(const Common& c, const ModelOptions& m, const std::vector<std::string>& inputs,
                std::size_t top_k, const std::string& out) {
  const auto dir = model_dir(m);
  const auto identifier = nn::IdentifierModel::load(dir / kIdentifierFile);
  const auto ranker = nn::RankerModel::load(dir / kRankerFile);
  const auto stats = load_stats(m.stats);
  const auto embedder = make_embedder(m);
  std::optional<std::string> sub;
  if (!c.sublanguage.empty()) sub = c.sublanguage;
  std::vector<Document> docs;
  for (const auto& p : inputs) docs.push_back(load_parsed_document(p, sub));
  std::vector<RankedGroups> ranked(docs.size());
  parallel_for(docs.size(), c.jobs, [&](std::size_t i) {
    ranked[i] = extract(docs[i], identifier, ranker, stats, *embedder, top_k, m.cluster_threshold);
  });
  json config = common_json(c);
  config["command"] = "extract";
  config["top_k"] = top_k;
  config["inputs"] = inputs;
  config["model_dir"] = dir.string();
  config["features"] = model_json(m);
  emit(out, config, [&](std::ostream& os) {
    for (std::size_t i = 0; i < docs.size(); ++i) os << to_json(docs[i].id, ranked[i]).dump() << '\n';
  });
  return 0;
}

int eval_cmd(const Common& c, const ModelOptions& m, const std::vector<std::string>& manifests,
             std::size_t top_k, bool literal, bool baseline, const std::string& out) {
  const auto dir = model_dir(m);
  const auto identifier = nn::IdentifierModel::load(dir / kIdentifierFile);
  const auto ranker = nn::RankerModel::load(dir / kRankerFile);
  const auto stats = load_stats(m.stats);
  const auto embedder = make_embedder(m);
  const auto sets = load_manifests(manifests, c);
  const auto analyzed = analyze_all(sets, identifier, *embedder, stats, m, c.jobs);
  EvalReport report;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    report.datasets.push_back(evaluate_ranker(sets[i], analyzed[i], ranker, top_k, c.jobs));
    if (baseline) report.datasets.push_back(evaluate_tfidf(sets[i], analyzed[i], top_k));
  }
  if (literal) {
    for (auto& d : report.datasets) std::swap(d.mrr, d.mrr_literal);
  }
  report.config = common_json(c);
  report.config["command"] = "eval";
  report.config["top_k"] = top_k;
  report.config["mrr"] = literal ? "literal" : "first-correct";
  report.config["manifests"] = manifests;
  report.config["features"] = model_json(m);
  report.config["identifier"] = identifier.training_config();
  report.config["ranker"] = ranker.training_config();
  emit(out, report.config, [&](std::ostream& os) { os << report.to_json().dump(1) << '\n'; });
  return 0;
}

int sweep_cmd(const Common& c, const ModelOptions& m, const std::vector<std::string>& train,
              const std::vector<std::string>& test, const std::vector<double>& grid,
              const pu::TrainingConfig& cfg, std::size_t top_k, const std::string& out) {
  const auto dir = model_dir(m);
  const auto identifier = nn::IdentifierModel::load(dir / kIdentifierFile);
  const auto stats = load_stats(m.stats);
  const auto embedder = make_embedder(m);
  const auto train_sets = load_manifests(train, c);
  const auto test_sets = load_manifests(test, c);
  const auto train_an = analyze_all(train_sets, identifier, *embedder, stats, m, c.jobs);
  const auto test_an = analyze_all(test_sets, identifier, *embedder, stats, m, c.jobs);
  std::vector<pu::RankerPool> pools;
  for (std::size_t i = 0; i < train_sets.size(); ++i) pools.push_back(pu::ranker_pool(train_sets[i], train_an[i]));
  const auto curve = sweep_theta(pools, grid, cfg, {}, [&](const nn::RankerModel& r) {
    EvalReport rep;
    for (std::size_t i = 0; i < test_sets.size(); ++i) {
      rep.datasets.push_back(evaluate_ranker(test_sets[i], test_an[i], r, top_k, c.jobs));
    }
    return rep.macro();
  });
  json config = common_json(c);
  config["command"] = "sweep-theta";
  config["grid"] = grid;
  config["top_k"] = top_k;
  config["training"] = cfg.to_json();
  config["train"] = train;
  config["test"] = test;
  json failures = json::array();
  for (const auto& p : curve) {
    if (p.error) failures.push_back({{"theta", p.theta}, {"error", *p.error}});
  }
  config["failures"] = failures;
  emit(out, config, [&](std::ostream& os) { write_sweep_csv(os, curve); });
  return 0;
}

int export_cmd(const Common& c, const ModelOptions& m, const std::vector<std::string>& manifests,
               const std::string& out) {
  const auto dir = model_dir(m);
  const auto identifier = nn::IdentifierModel::load(dir / kIdentifierFile);
  const auto stats = load_stats(m.stats);
  const auto embedder = make_embedder(m);
  const auto sets = load_manifests(manifests, c);
  const auto analyzed = analyze_all(sets, identifier, *embedder, stats, m, c.jobs);
  std::vector<FeatureRow> rows;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    auto r = feature_rows(sets[i], analyzed[i]);
    rows.insert(rows.end(), r.begin(), r.end());
  }
  json config = common_json(c);
  config["command"] = "export-features";
  config["manifests"] = manifests;
  config["features"] = model_json(m);
  emit(out, config, [&](std::ostream& os) { write_feature_csv(os, rows); });
  return 0;
}

int coverage_cmd(const Common& c, const ModelOptions& m, const std::vector<std::string>& manifests,
                 double threshold, const std::string& out) {
  const auto dir = model_dir(m);
  const auto identifier = nn::IdentifierModel::load(dir / kIdentifierFile);
  const auto stats = load_stats(m.stats);
  const auto embedder = make_embedder(m);
  const auto sets = load_manifests(manifests, c);
  const auto analyzed = analyze_all(sets, identifier, *embedder, stats, m, c.jobs);
  const auto curve = pattern_coverage_curve(keyword_patterns(sets, analyzed), threshold);
  json config = common_json(c);
  config["command"] = "pattern-coverage";
  config["threshold"] = threshold;
  config["manifests"] = manifests;
  emit(out, config, [&](std::ostream& os) {
    os << "instances,coverage\n" << std::setprecision(10);
    for (const auto& p : curve) os << p.instances << ',' << p.coverage << '\n';
  });
  return 0;
}

int gradient_cmd(const Common& c) {
  auto identifier = nn::IdentifierModel::create({}, derive_seed(c.seed, 0));
  const auto enc = identifier.encode({Quadruple{"NNP", kUpperCase, kNotStop, "amod"},
                                      Quadruple{"NN", kLowerCase, kNotStop, "compound"},
                                      Quadruple{"NN", kLowerCase, kNotStop, "nsubj"}});
  const auto ir = nn::gradient_check(identifier.parameters(), [&](nn::Tape& t) {
    return nn::softmax_cross_entropy(t, identifier.logits(t, enc), 1);
  });
  auto ranker = nn::RankerModel::create({}, derive_seed(c.seed, 0));
  Rng rng(derive_seed(c.seed, 1));
  DependentVector x{};
  for (auto& v : x) v = rng.uniform();
  const auto rr = nn::gradient_check(ranker.parameters(), [&](nn::Tape& t) {
    return nn::softmax_cross_entropy(t, ranker.logits(t, 1, 2, x), 0);
  });
  const json j = {{"identifier", ir.max_rel_error()}, {"ranker", rr.max_rel_error()},
                  {"tolerance", ir.tolerance}, {"passed", ir.passed() && rr.passed()},
                  {"seed", c.seed}};
  std::cout << j.dump() << '\n';
  if (!(ir.passed() && rr.passed())) throw NumericError("gradient check failed");
  return 0;
}

std::string one_line(std::string s) {
  for (auto& ch : s) {
    if (ch == '\n' || ch == '\r') ch = ' ';
  }
  return s;
}

int run(int argc, char** argv) {
  CLI::App app{"Keyword extraction with keyness patterns", "keyness"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");
  Common c;
  ModelOptions m;
  TrainOptions t;
  std::vector<std::string> manifests, test_manifests, inputs;
  std::string out;
  std::size_t top_k = 10;
  double epsilon = 0.5, theta = 3.35, threshold = 0.1;
  bool literal = false, baseline = false;
  std::vector<double> grid = {0.5, 1, 2, 3, 4};

  auto* stats_cmd = app.add_subcommand("build-stats", "Reference corpus statistics from manifests");
  add_common(*stats_cmd, c);
  stats_cmd->add_option("--manifest", manifests, "Dataset manifests")->required();
  stats_cmd->add_option("--out", out, "Stats file")->required();

  const auto id_defaults = pu::TrainingConfig::identifier_defaults();
  auto* tid = app.add_subcommand("train-identifier", "Train the candidate identifier");
  add_common(*tid, c);
  tid->add_option("--manifest", manifests, "Training manifests")->required();
  tid->add_option("--model-dir", m.model_dir, std::string("Output directory (default: $") + kModelDirEnv + ")");
  tid->add_option("--epsilon", epsilon, "Filter on omega for unlabelled samples")->capture_default_str();
  add_training(*tid, t, id_defaults);

  const auto rk_defaults = pu::TrainingConfig::ranker_defaults();
  auto* trk = app.add_subcommand("train-ranker", "Train the keyness ranker");
  add_common(*trk, c);
  add_model(*trk, m);
  trk->add_option("--manifest", manifests, "Training manifests")->required();
  trk->add_option("--theta", theta, "Unlabelled-to-positive sampling ratio")->capture_default_str();
  TrainOptions tr;
  add_training(*trk, tr, rk_defaults);

  auto* ext = app.add_subcommand("extract", "Rank term groups of parsed documents");
  add_common(*ext, c);
  add_model(*ext, m);
  ext->add_option("--in", inputs, "CoNLL-U documents")->required()->check(CLI::ExistingFile);
  ext->add_option("--top-k", top_k)->check(CLI::PositiveNumber)->capture_default_str();
  ext->add_option("--out", out, "JSON-lines output (default: stdout)");

  auto* ev = app.add_subcommand("eval", "Evaluate against gold keywords");
  add_common(*ev, c);
  add_model(*ev, m);
  ev->add_option("--manifest", manifests, "Test manifests")->required();
  ev->add_option("--top-k", top_k)->check(CLI::PositiveNumber)->capture_default_str();
  ev->add_flag("--literal", literal, "Report MRR as (1/|P|) * sum of 1/rank over correct groups");
  ev->add_flag("--baseline", baseline, "Add a TF-IDF ranking per dataset");
  ev->add_option("--out", out, "JSON report (default: stdout)");

  auto* sw = app.add_subcommand("sweep-theta", "Train and evaluate one ranker per sampling ratio");
  add_common(*sw, c);
  add_model(*sw, m);
  sw->add_option("--manifest", manifests, "Training manifests")->required();
  sw->add_option("--eval-manifest", test_manifests, "Evaluation manifests")->required();
  sw->add_option("--grid", grid, "Comma-separated ratios")->delimiter(',')->capture_default_str();
  sw->add_option("--top-k", top_k)->check(CLI::PositiveNumber)->capture_default_str();
  sw->add_option("--out", out, "CSV curve (default: stdout)");
  TrainOptions ts;
  add_training(*sw, ts, rk_defaults);

  auto* ex = app.add_subcommand("export-features", "Long-format feature values per term");
  add_common(*ex, c);
  add_model(*ex, m);
  ex->add_option("--manifest", manifests, "Dataset manifests")->required();
  ex->add_option("--out", out, "CSV output (default: stdout)");

  auto* cov = app.add_subcommand("pattern-coverage", "Cluster coverage of keyword patterns");
  add_common(*cov, c);
  add_model(*cov, m);
  cov->add_option("--manifest", manifests, "Dataset manifests")->required();
  cov->add_option("--threshold", threshold, "Cosine distance threshold")->capture_default_str();
  cov->add_option("--out", out, "CSV output (default: stdout)");

  auto* gc = app.add_subcommand("gradient-check", "Finite-difference check of both networks");
  add_common(*gc, c);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: usage: " << one_line(e.what()) << '\n';
    return 2;
  }

  try {
    apply_common(c);
    if (*stats_cmd) return build_stats(c, manifests, out);
    if (*tid) {
      auto cfg = training_config(id_defaults, t, c);
      cfg.epsilon = epsilon;
      cfg.validate();
      return train_identifier(c, manifests, m, cfg);
    }
    if (*trk) {
      auto cfg = training_config(rk_defaults, tr, c);
      cfg.theta = theta;
      cfg.validate();
      return train_ranker(c, manifests, m, cfg);
    }
    if (*ext) return extract_cmd(c, m, inputs, top_k, out);
    if (*ev) return eval_cmd(c, m, manifests, top_k, literal, baseline, out);
    if (*sw) {
      auto cfg = training_config(rk_defaults, ts, c);
      cfg.validate();
      return sweep_cmd(c, m, manifests, test_manifests, grid, cfg, top_k, out);
    }
    if (*ex) return export_cmd(c, m, manifests, out);
    if (*cov) return coverage_cmd(c, m, manifests, threshold, out);
    if (*gc) return gradient_cmd(c);
  } catch (const UsageError& e) {
    std::cerr << "error: usage: " << one_line(e.what()) << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << one_line(e.what()) << '\n';
    return 1;
  }
  return 2;
}

}  // namespace
}  // namespace keyness::cli

int main(int argc, char** argv) { return keyness::cli::run(argc, argv); }
