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

// Acceptance run: one PASS/FAIL line per criterion, exit status 1 when any
// criterion fails. Behavioural criteria train on the bundled fixtures.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <numeric>
#include <random>
#include <sstream>

#include "keyness/evalx.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace keyness;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double x, int precision = 4) {
  std::ostringstream os;
  os << std::setprecision(precision) << x;
  return os.str();
}

// Tracks the largest deviation and the first failing case.
struct Deviation {
  double worst = 0.0;
  std::size_t checks = 0;
  std::string first_failure;

  void check(double got, double want, double tol, const std::string& what) {
    ++checks;
    const double d = std::abs(got - want);
    const bool ok = d <= tol || (std::isinf(got) && got == want);
    if (std::isfinite(d)) worst = std::max(worst, d);
    if (!ok && first_failure.empty()) first_failure = what + ": got " + fmt(got, 17) + " want " + fmt(want, 17);
  }
  bool ok() const { return first_failure.empty(); }
};

std::string path_of(const std::string& name) { return std::string(KEYNESS_FIXTURES) + "/" + name; }

// ---- exact suites ----------------------------------------------------------

Outcome formula_suite() {
  const auto t0 = Clock::now();
  std::vector<Document> docs;
  for (const char* m : {"news_train.json", "news_test.json", "abstracts_train.json", "abstracts_test.json"}) {
    for (auto& d : load_dataset(path_of(m)).documents) docs.push_back(std::move(d));
  }
  std::vector<const Document*> all;
  for (const auto& d : docs) all.push_back(&d);
  const auto stats_all = build_corpus_stats(all);

  // A few documents are also scored against a reference corpus without them.
  Rng rng(2026);
  struct Outside {
    std::size_t doc;
    std::vector<const Document*> ref;
    CorpusStats stats;
  };
  std::vector<Outside> outside;
  for (int i = 0; i < 4; ++i) {
    Outside o{rng.below(docs.size()), {}, {}};
    for (const auto* d : all) {
      if (d != all[o.doc]) o.ref.push_back(d);
    }
    o.stats = build_corpus_stats(o.ref);
    outside.push_back(std::move(o));
  }

  Deviation dev, tail;
  const int terms = 240;
  for (int trial = 0; trial < terms; ++trial) {
    const Outside* out = trial % 4 == 3 ? &outside[rng.below(outside.size())] : nullptr;
    const auto& d = out ? docs[out->doc] : docs[rng.below(docs.size())];
    const auto& stats = out ? out->stats : stats_all;
    const auto cands = generate_ngrams(d);
    const auto& t = cands[rng.below(cands.size())];
    const auto o = oracle::term_features(d, t.key, out ? out->ref : all);
    const auto profile = ngram_frequency_profile(d);
    const std::string tag = d.id + " '" + t.key + "'";
    dev.check(casing_score(t, d), o.casing, 1e-9, "casing " + tag);
    dev.check(position_score(t, d), o.position, 1e-9, "position " + tag);
    dev.check(frequency_score(t, profile), o.frequency, 1e-9, "frequency " + tag);
    dev.check(context_diversity_score(t, d), o.context, 1e-9, "context " + tag);
    dev.check(tfidf_score(t, profile, stats), o.tfidf, 1e-9, "tfidf " + tag);
    dev.check(effect_size_score(t, d, stats), o.effect, 1e-9, "effect size " + tag);
    tail.check(lexical_specificity_score(t, d, stats), o.specificity, 1e-6, "specificity " + tag);
    dev.check(dispersion_score(t, d), o.dispersion, 1e-9, "dispersion " + tag);
  }
  const double secs = seconds_since(t0);
  Outcome r;
  r.pass = dev.ok() && tail.ok() && secs < 60.0;
  r.detail = std::to_string(terms) + " terms, max dev " + fmt(dev.worst, 3) + " (specificity " +
             fmt(tail.worst, 3) + "), " + fmt(secs, 3) + " s";
  if (!dev.ok()) r.detail += "; " + dev.first_failure;
  if (!tail.ok()) r.detail += "; " + tail.first_failure;
  return r;
}

Outcome centrality_suite() {
  const auto t0 = Clock::now();
  Rng rng(31);
  Deviation dev;
  const int graphs = 500;
  for (int trial = 0; trial < graphs; ++trial) {
    const std::size_t n = 1 + rng.below(12);
    const auto g = oracle::random_graph(rng, n, trial % 3 == 0 ? 0.15 : 0.4);
    const std::string tag = "graph " + std::to_string(trial);
    const auto b = betweenness_centrality(g), bo = oracle::betweenness(g);
    const auto c = closeness_centrality(g), co = oracle::closeness(g);
    const auto e = eigenvector_centrality(g), eo = oracle::eigenvector(g);
    const auto topics = topic_scores(g);
    const auto uo = oracle::pagerank(g);
    for (std::size_t i = 0; i < n; ++i) {
      dev.check(b[i], bo[i], 1e-6, "betweenness " + tag);
      dev.check(c[i], co[i], 1e-6, "closeness " + tag);
      dev.check(e[i], eo[i], 1e-6, "eigenvector " + tag);
      dev.check(topics[i].topic_rank, uo[i], 1e-6, "topic_rank " + tag);
      dev.check(topics[i].betweenness, bo[i], 1e-6, "topic betweenness " + tag);
    }
    for (SeedKind kind : {SeedKind::uniform, SeedKind::position, SeedKind::tfidf, SeedKind::lexical}) {
      std::vector<double> seed(n);
      for (auto& x : seed) x = rng.uniform() < 0.3 ? 0.0 : rng.uniform(0.0, 3.0);
      const auto r = personalized_ranks(g, kind, seed);
      const auto o = oracle::pagerank(g, kind == SeedKind::uniform ? std::vector<double>{} : seed);
      for (std::size_t i = 0; i < n; ++i) dev.check(r[i], o[i], 1e-6, "pagerank " + tag);
    }
  }
  const double secs = seconds_since(t0);
  return {dev.ok() && secs < 120.0, std::to_string(graphs) + " graphs, " + std::to_string(dev.checks) +
                                        " values, max dev " + fmt(dev.worst, 3) + ", " + fmt(secs, 3) + " s" +
                                        (dev.ok() ? "" : "; " + dev.first_failure)};
}

Outcome gradient_suite() {
  const auto t0 = Clock::now();
  double worst = 0.0;
  std::string worst_name, failed;
  const auto cases = oracle::gradient_cases();
  for (const auto& c : cases) {
    const auto report = c.run();
    const double e = report.max_rel_error();
    if (e > worst) {
      worst = e;
      worst_name = c.name;
    }
    if (!(e < 1e-4) && failed.empty()) failed = c.name + " " + fmt(e, 3);
  }
  const double secs = seconds_since(t0);
  return {failed.empty() && secs < 300.0,
          std::to_string(cases.size()) + " cases, max rel error " + fmt(worst, 3) + " (" + worst_name + "), " +
              fmt(secs, 3) + " s" + (failed.empty() ? "" : "; failed " + failed)};
}

RankedGroups hits_list(std::size_t n, std::initializer_list<std::size_t> hits) {
  RankedGroups out;
  std::size_t g = 0;
  for (std::size_t r = 1; r <= n; ++r) {
    const bool hit = std::find(hits.begin(), hits.end(), r) != hits.end();
    RankedGroup grp;
    grp.score = static_cast<double>(n - r);
    grp.members.push_back({hit ? "g" + std::to_string(g++) : "x" + std::to_string(r), grp.score});
    out.push_back(grp);
  }
  return out;
}

std::vector<std::string> golds(std::size_t n) {
  std::vector<std::string> g;
  for (std::size_t i = 0; i < n; ++i) g.push_back("g" + std::to_string(i));
  return g;
}

Outcome metric_suite() {
  Deviation dev;
  dev.check(*identification_recall({"a", "b", "c"}, {"a", "c", "d", "e"}), 0.5, 1e-12, "identification recall");
  dev.check(*identification_recall({"a"}, {"a"}), 1.0, 1e-12, "identification recall, all found");
  const auto s = *topk_scores(hits_list(12, {1, 3, 6, 10}), golds(8), 10);
  dev.check(s.precision, 0.4, 1e-12, "P@10");
  dev.check(s.recall, 0.5, 1e-12, "R@10");
  dev.check(s.f, 0.4444444444444444, 1e-12, "F@10");
  const auto shortl = *topk_scores(hits_list(2, {1, 2}), golds(2), 10);
  dev.check(shortl.precision, 0.2, 1e-12, "P@10 on a two-group list");
  dev.check(mrr({hits_list(5, {2}), hits_list(5, {4})}, {golds(1), golds(1)}), 0.375, 1e-12, "MRR 0.375");
  dev.check(mrr({hits_list(5, {3})}, {golds(1)}), 1.0 / 3.0, 1e-12, "MRR 1/3");
  dev.check(mrr({hits_list(5, {1}), hits_list(5, {1, 2})}, {golds(1), golds(2)}), 1.0, 1e-12, "MRR 1");
  dev.check(mrr({hits_list(5, {2}), hits_list(5, {})}, {golds(1), {}}), 0.5, 1e-12, "MRR skipping no-gold");
  dev.check(literal_reciprocal_rank(hits_list(10, {1, 3}), golds(2)), (1.0 + 1.0 / 3.0) / 10.0, 1e-12,
            "literal reciprocal rank");
  return {dev.ok(), std::to_string(dev.checks) + " hand cases, max dev " + fmt(dev.worst, 3) +
                        (dev.ok() ? "" : "; " + dev.first_failure)};
}

Outcome risk_bound_suite() {
  Deviation dev;
  dev.check(pu::excess_risk_bound({1.0, 100.0, 1.0, 0.5}), 0.4, 1e-12, "bound(1, 100, 1, 0.5)");
  dev.check(pu::excess_risk_bound({1.0, 100.0, 1.0, 0.0}), 0.2, 1e-12, "bound(1, 100, 1, 0)");
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> a(0.01, 10.0), p(1.0, 1e5), th(0.05, 20.0), nu(0.0, 0.99);
  std::size_t violations = 0;
  const int inputs = 10000;
  for (int i = 0; i < inputs; ++i) {
    const pu::RiskBoundInput in{a(gen), p(gen), th(gen), nu(gen)};
    const double b = pu::excess_risk_bound(in);
    auto more_nu = in, more_p = in, more_theta = in, more_a = in;
    more_nu.nu_hat = in.nu_hat + (0.999 - in.nu_hat) * 0.5;
    more_p.p = in.p * 1.5;
    more_theta.theta = in.theta * 1.5;
    more_a.a = in.a * 2.0;
    if (!(pu::excess_risk_bound(more_nu) > b)) ++violations;
    if (!(pu::excess_risk_bound(more_p) < b)) ++violations;
    if (!(pu::excess_risk_bound(more_theta) < b)) ++violations;
    if (std::abs(pu::excess_risk_bound(more_a) - 2.0 * b) > 1e-12 * b) ++violations;
  }
  return {dev.ok() && violations == 0, "worked values max dev " + fmt(dev.worst, 3) + ", " +
                                           std::to_string(inputs) + " inputs, " + std::to_string(violations) +
                                           " monotonicity violations" + (dev.ok() ? "" : "; " + dev.first_failure)};
}

// ---- fixture runs ----------------------------------------------------------

// Everything trained once and shared by the behavioural criteria.
struct Runs {
  Dataset news_train, news_test, abs_train, abs_test;
  CorpusStats stats;
  LexicalEmbedder embedder;
  double threshold = 0.1;

  std::vector<pu::IdentifierPool> identifier_pools;
  pu::TrainingConfig identifier_cfg = pu::TrainingConfig::identifier_defaults();
  pu::TrainingConfig ranker_cfg = pu::TrainingConfig::ranker_defaults();
  std::optional<pu::IdentifierTraining> identifier, identifier_eps1;
  std::optional<pu::RankerTraining> ranker;
  std::vector<pu::RankerPool> ranker_pools;
  double identifier_seconds = 0, ranker_seconds = 0;

  std::vector<AnalyzedDocument> analyze(const Dataset& ds, const nn::IdentifierModel& id) const {
    return analyze_documents(ds.documents, id, embedder, stats, threshold, 1);
  }

  std::vector<pu::IdentifierPool> pools_for(const std::vector<const Dataset*>& sets) const {
    const auto proto = nn::IdentifierModel::create({}, derive_seed(identifier_cfg.seed, 0));
    std::vector<pu::IdentifierPool> out;
    for (const auto* ds : sets) out.push_back(pu::identifier_pool(*ds, proto));
    return out;
  }

  void load() {
    news_train = load_dataset(path_of("news_train.json"));
    news_test = load_dataset(path_of("news_test.json"));
    abs_train = load_dataset(path_of("abstracts_train.json"));
    abs_test = load_dataset(path_of("abstracts_test.json"));
    std::vector<const Document*> all;
    for (const auto* ds : {&news_train, &news_test, &abs_train, &abs_test}) {
      for (const auto& d : ds->documents) all.push_back(&d);
    }
    stats = build_corpus_stats(all);
  }

  void train() {
    identifier_pools = pools_for({&news_train, &abs_train});
    auto t0 = Clock::now();
    identifier = pu::train_identifier(identifier_pools, identifier_cfg);
    identifier_seconds = seconds_since(t0);
    auto eps1 = identifier_cfg;
    eps1.epsilon = 1.0;
    identifier_eps1 = pu::train_identifier(identifier_pools, eps1);

    ranker_pools = {pu::ranker_pool(news_train, analyze(news_train, identifier->model)),
                    pu::ranker_pool(abs_train, analyze(abs_train, identifier->model))};
    t0 = Clock::now();
    ranker = pu::train_ranker(ranker_pools, ranker_cfg);
    ranker_seconds = seconds_since(t0);
  }
};

template <typename Model>
std::string model_bytes(const Model& m, const std::string& name) {
  const auto path = fs::temp_directory_path() / ("keyness-acceptance-" + name);
  m.save(path);
  std::ifstream in(path, std::ios::binary);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  fs::remove(path);
  return bytes;
}

std::string check_refresh_cadence(const pu::TrainingLog& log, const std::string& which) {
  std::uint64_t last = 0;
  for (const auto& e : log.epochs) {
    const bool want = e.epoch == 1 || e.epoch % 5 == 0;
    if (e.refreshed != want) return which + " epoch " + std::to_string(e.epoch) + " refresh flag wrong";
    if (!want && e.digest != last) return which + " epoch " + std::to_string(e.epoch) + " sample changed";
    last = e.digest;
  }
  return "";
}

Outcome pu_conformance(const Runs& r) {
  std::vector<std::string> problems;
  const auto& ilog = r.identifier->log;
  const auto& first = ilog.epochs.front();
  std::string sizes = "identifier epoch 1:";
  for (std::size_t i = 0; i < first.datasets.size(); ++i) {
    const auto& d = first.datasets[i];
    const auto want = std::min(r.identifier_pools[i].positives.size(), r.identifier_pools[i].unlabelled.size());
    sizes += " " + std::to_string(d.sampled) + "/" + std::to_string(want);
    if (d.sampled != want || d.filtered != 0) problems.push_back(d.name + " identifier epoch-1 sample size");
  }
  const auto& rfirst = r.ranker->log.epochs.front();
  sizes += ", ranker epoch 1:";
  for (std::size_t i = 0; i < rfirst.datasets.size(); ++i) {
    const auto& d = rfirst.datasets[i];
    const double p = static_cast<double>(r.ranker_pools[i].positives.size());
    const auto u = r.ranker_pools[i].unlabelled.size();
    const auto want = std::min<std::size_t>(
        u, std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(p * r.ranker_cfg.theta))));
    sizes += " " + std::to_string(d.sampled) + "/" + std::to_string(want);
    if (d.sampled != want) problems.push_back(d.name + " ranker epoch-1 sample size");
  }
  for (const auto& msg : {check_refresh_cadence(ilog, "identifier"), check_refresh_cadence(r.ranker->log, "ranker")}) {
    if (!msg.empty()) problems.push_back(msg);
  }
  std::size_t filtered_eps1 = 0, filtered_eps05 = 0;
  for (const auto& e : r.identifier_eps1->log.epochs) {
    for (const auto& d : e.datasets) filtered_eps1 += d.filtered;
  }
  for (const auto& e : ilog.epochs) {
    for (const auto& d : e.datasets) filtered_eps05 += d.filtered;
  }
  if (filtered_eps1 != 0) problems.push_back("epsilon 1 filtered " + std::to_string(filtered_eps1));

  const auto again_id = pu::train_identifier(r.identifier_pools, r.identifier_cfg);
  const auto again_rk = pu::train_ranker(r.ranker_pools, r.ranker_cfg);
  const bool same_id = model_bytes(again_id.model, "id-a") == model_bytes(r.identifier->model, "id-b");
  const bool same_rk = model_bytes(again_rk.model, "rk-a") == model_bytes(r.ranker->model, "rk-b");
  if (!same_id) problems.push_back("identifier reruns differ");
  if (!same_rk) problems.push_back("ranker reruns differ");

  std::string detail = sizes + "; refresh at 1,5,10,...; filtered at eps 1: " + std::to_string(filtered_eps1) +
                       " (eps 0.5: " + std::to_string(filtered_eps05) + "); reruns bit-identical: " +
                       (same_id && same_rk ? "yes" : "no");
  for (const auto& p : problems) detail += "; " + p;
  return {problems.empty(), detail};
}

Outcome identification(const Runs& r) {
  bool pass = r.identifier_seconds < 600.0;
  std::string detail;
  for (const auto* ds : {&r.news_test, &r.abs_test}) {
    const double half = *dataset_identification_recall(*ds, r.identifier->model);
    const double one = *dataset_identification_recall(*ds, r.identifier_eps1->model);
    pass = pass && half >= 0.85 && half >= one;
    detail += ds->name + " recall " + fmt(half) + " at eps 0.5, " + fmt(one) + " at eps 1; ";
  }
  return {pass, detail + "training " + fmt(r.identifier_seconds, 3) + " s"};
}

Outcome ranking(const Runs& r) {
  const auto analyzed = r.analyze(r.news_test, r.identifier->model);
  const auto m = evaluate_ranker(r.news_test, analyzed, r.ranker->model, 10);
  const auto b = evaluate_tfidf(r.news_test, analyzed, 10);
  const double margin = m.f - b.f;
  const bool pass = margin >= 0.03 && m.f >= 0.15 && m.mrr >= 0.20 && r.ranker_seconds < 1800.0;
  return {pass, r.news_test.name + " F@10 " + fmt(m.f) + " vs TF-IDF " + fmt(b.f) + " (margin " + fmt(margin) +
                    "), MRR " + fmt(m.mrr) + " vs " + fmt(b.mrr) + ", training " + fmt(r.ranker_seconds, 3) + " s"};
}

// Identifier and ranker trained on one dataset, evaluated on `test`.
double single_domain_f(const Runs& r, const Dataset& train, const Dataset& test) {
  const auto id = pu::train_identifier(r.pools_for({&train}), r.identifier_cfg);
  const auto rk = pu::train_ranker({pu::ranker_pool(train, r.analyze(train, id.model))}, r.ranker_cfg);
  return evaluate_ranker(test, r.analyze(test, id.model), rk.model, 10).f;
}

Outcome cross_domain(const Runs& r) {
  Dataset unknown = r.abs_test;
  unknown.sublanguage = "unknown";
  for (auto& d : unknown.documents) d.sublanguage = "unknown";
  const double zero_shot = single_domain_f(r, r.news_train, unknown);
  const double in_domain = single_domain_f(r, r.abs_train, r.abs_test);
  const double drop = in_domain > 0 ? 1.0 - zero_shot / in_domain : 1.0;
  return {drop < 0.5, "abstracts F@10 zero-shot from news " + fmt(zero_shot) + " vs in-domain " + fmt(in_domain) +
                          " (relative drop " + fmt(drop) + ")"};
}

Outcome theta_sweep(const Runs& r) {
  const std::vector<double> grid = {0.5, 1, 2, 3, 4};
  const auto test = r.analyze(r.news_test, r.identifier->model);
  const auto curve = sweep_theta({r.ranker_pools[0]}, grid, r.ranker_cfg, {}, [&](const nn::RankerModel& m) {
    return evaluate_ranker(r.news_test, test, m, 10);
  });
  std::vector<double> theta, mrrs;
  std::string detail = "MRR by theta:";
  for (const auto& p : curve) {
    if (p.error) return {false, "theta " + fmt(p.theta) + " failed: " + *p.error};
    theta.push_back(p.theta);
    mrrs.push_back(p.metrics.mrr);
    detail += " " + fmt(p.theta) + "=" + fmt(p.metrics.mrr);
  }
  const double rho = spearman(theta, mrrs);
  return {rho < 0.0, detail + ", Spearman " + fmt(rho)};
}

Outcome coverage(const Runs& r) {
  const std::vector<Dataset> sets = {r.news_train, r.news_test, r.abs_train, r.abs_test};
  std::vector<std::vector<AnalyzedDocument>> analyzed;
  for (const auto& ds : sets) analyzed.push_back(r.analyze(ds, r.identifier->model));
  const auto curve = pattern_coverage_curve(keyword_patterns(sets, analyzed));
  bool monotone = true;
  for (std::size_t i = 1; i < curve.size(); ++i) monotone = monotone && curve[i].coverage >= curve[i - 1].coverage;
  const std::size_t n = curve.size();
  const auto at = [&](std::size_t i) { return i == 0 ? 0.0 : curve[i - 1].coverage; };
  // Clusters discovered in each quarter of the instance sequence.
  std::vector<double> gains;
  for (std::size_t q = 0; q < 4; ++q) gains.push_back(at(n * (q + 1) / 4) - at(n * q / 4));
  const double first_half = gains[0] + gains[1], second_half = gains[2] + gains[3];
  const bool concave = first_half > second_half && gains[0] > gains[3];
  const double terminal = curve.back().coverage;
  std::string detail = std::to_string(n) + " keyword patterns, terminal " + fmt(terminal) + ", quarter gains";
  for (double g : gains) detail += " " + fmt(g, 3);
  detail += monotone ? ", monotone" : ", NOT monotone";
  return {monotone && terminal == 1.0 && concave, detail};
}

}  // namespace

int main() {
  log::set_level(log::Level::warn);
  int failures = 0;
  const auto report = [&](const std::string& name, const std::function<Outcome()>& f) {
    Outcome o;
    try {
      o = f();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    failures += o.pass ? 0 : 1;
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
  };

  report("formula oracles", formula_suite);
  report("centrality oracles", centrality_suite);
  report("gradients", gradient_suite);
  report("metrics", metric_suite);
  report("risk bound", risk_bound_suite);

  Runs runs;
  std::string setup_error;
  try {
    runs.load();
    runs.train();
  } catch (const std::exception& e) {
    setup_error = e.what();
  }
  const auto behavioural = [&](const std::string& name, Outcome (*f)(const Runs&)) {
    if (!setup_error.empty()) {
      report(name, [&] { return Outcome{false, "fixture training failed: " + setup_error}; });
    } else {
      report(name, [&] { return f(runs); });
    }
  };
  behavioural("PU procedure conformance", pu_conformance);
  behavioural("identification", identification);
  behavioural("ranking", ranking);
  behavioural("cross-domain", cross_domain);
  behavioural("theta sweep", theta_sweep);
  behavioural("coverage curve", coverage);
  return failures == 0 ? 0 : 1;
}
