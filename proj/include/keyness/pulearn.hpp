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

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "keyness/corpus.hpp"
#include "keyness/error.hpp"
#include "keyness/log.hpp"
#include "keyness/neural/identifier.hpp"
#include "keyness/neural/optim.hpp"
#include "keyness/neural/ranker.hpp"
#include "keyness/pipeline.hpp"
#include "keyness/rng.hpp"
#include "keyness/text.hpp"

namespace keyness::pu {

// Uniform sample without replacement of min(count, pool_size) indices, in
// increasing order.
inline std::vector<std::size_t> sample_unlabelled(std::size_t pool_size, std::size_t count,
                                                  std::uint64_t seed) {
  Rng rng(seed);
  return rng.sample_indices(pool_size, count);
}

// k = round(p * theta), at least 1, at most |U|.
inline std::size_t ranker_sample_size(std::size_t positives, double theta, std::size_t unlabelled) {
  const auto k = static_cast<std::size_t>(std::llround(static_cast<double>(positives) * theta));
  return std::min(std::max<std::size_t>(k, 1), unlabelled);
}

struct RiskBoundInput {
  double a = 1.0;
  double p = 1.0;
  double theta = 1.0;
  double nu_hat = 0.0;
};

// a * p^(-1/2) * (1 + theta^(-1/2)) / (1 - nu_hat)
inline double excess_risk_bound(const RiskBoundInput& in) {
  if (!(in.nu_hat >= 0.0 && in.nu_hat < 1.0)) throw DataError("contamination rate must lie in [0, 1)");
  if (!(in.a > 0.0) || !(in.p > 0.0) || !(in.theta > 0.0)) {
    throw DataError("a, p and theta must be positive");
  }
  return in.a * (1.0 + 1.0 / std::sqrt(in.theta)) / std::sqrt(in.p) / (1.0 - in.nu_hat);
}

template <typename Input>
struct Instance {
  std::string doc_id;
  std::string key;
  Input input;
};

// Labelled positives and the unlabelled rest of one dataset.
template <typename Input>
struct Pool {
  std::string name;
  std::vector<Instance<Input>> positives;
  std::vector<Instance<Input>> unlabelled;
};

struct RankerInput {
  std::size_t sublanguage = 0;
  std::size_t length = 1;
  DependentVector x{};  // raw, unnormalized
};

using IdentifierPool = Pool<nn::EncodedQuadruples>;
using RankerPool = Pool<RankerInput>;

// One instance per distinct ngram per document; positive iff its key is a
// gold keyword present in the document.
inline IdentifierPool identifier_pool(const Dataset& ds, const nn::IdentifierModel& model) {
  IdentifierPool pool;
  pool.name = ds.name;
  for (const auto& doc : ds.documents) {
    const auto gold = present_gold_keys(doc);
    const std::set<std::string> gold_set(gold.begin(), gold.end());
    for (const auto& t : generate_ngrams(doc)) {
      Instance<nn::EncodedQuadruples> in{doc.id, t.key, model.encode(quadruples(t, doc))};
      (gold_set.count(t.key) ? pool.positives : pool.unlabelled).push_back(std::move(in));
    }
  }
  return pool;
}

// One instance per selected candidate; `analyzed[i]` belongs to
// ds.documents[i].
inline RankerPool ranker_pool(const Dataset& ds, const std::vector<AnalyzedDocument>& analyzed) {
  if (analyzed.size() != ds.documents.size()) throw Error("ranker_pool: one analysis per document required");
  RankerPool pool;
  pool.name = ds.name;
  for (std::size_t d = 0; d < analyzed.size(); ++d) {
    const auto& doc = ds.documents[d];
    const auto gold = present_gold_keys(doc);
    const std::set<std::string> gold_set(gold.begin(), gold.end());
    const auto& a = analyzed[d];
    for (std::size_t i = 0; i < a.candidates.size(); ++i) {
      const auto& p = a.patterns[i];
      Instance<RankerInput> in{doc.id, a.candidates[i].key,
                               {sublanguage_index(p.sublanguage).value_or(0), p.length, p.dependent}};
      (gold_set.count(in.key) ? pool.positives : pool.unlabelled).push_back(std::move(in));
    }
  }
  return pool;
}

struct TrainingConfig {
  int epochs = 20;
  std::size_t batch_size = 56;
  nn::OptimizerConfig optimizer{};
  double epsilon = 0.5;  // identifier filter on omega
  double theta = 3.35;   // ranker sampling ratio
  std::uint64_t seed = 1;
  int refresh_every = 5;

  // Adadelta at rate 1 for the identifier and Adam at rate 0.0008 for the
  // ranker; plain SGD at these rates diverges or underfits.
  static TrainingConfig identifier_defaults() {
    TrainingConfig c;
    c.optimizer.kind = nn::OptimizerKind::adadelta;
    c.optimizer.learning_rate = 1.0;
    return c;
  }

  static TrainingConfig ranker_defaults() {
    TrainingConfig c;
    c.epochs = 30;
    c.batch_size = 126;
    c.optimizer.kind = nn::OptimizerKind::adam;
    c.optimizer.learning_rate = 0.0008;
    return c;
  }

  void validate() const {
    if (epochs < 1) throw DataError("epochs must be at least 1");
    if (batch_size < 1) throw DataError("batch size must be at least 1");
    if (!(epsilon > 0.0 && epsilon <= 1.0)) throw DataError("epsilon must lie in (0, 1]");
    if (!(theta > 0.0)) throw DataError("theta must be positive");
    if (refresh_every < 1) throw DataError("refresh interval must be at least 1");
    if (!(optimizer.learning_rate >= 0.0)) throw DataError("learning rate must be nonnegative");
  }

  nlohmann::json to_json() const {
    return {{"epochs", epochs},     {"batch_size", batch_size}, {"optimizer", optimizer.to_json()},
            {"epsilon", epsilon},   {"theta", theta},           {"seed", seed},
            {"refresh_every", refresh_every}};
  }
};

struct DatasetSample {
  std::string name;
  std::size_t positives = 0;
  std::size_t unlabelled = 0;
  std::size_t sampled = 0;   // drawn from U
  std::size_t filtered = 0;  // removed by the identifier filter
  std::size_t kept = 0;      // sampled - filtered

  nlohmann::json to_json() const {
    return {{"name", name},       {"positives", positives}, {"unlabelled", unlabelled},
            {"sampled", sampled}, {"filtered", filtered},   {"kept", kept}};
  }
};

struct EpochRecord {
  int epoch = 0;
  bool refreshed = false;
  std::vector<DatasetSample> datasets;
  std::size_t train_size = 0;
  double mean_loss = 0.0;
  std::uint64_t digest = 0;  // of the training-set instance ids

  nlohmann::json to_json() const {
    nlohmann::json ds = nlohmann::json::array();
    for (const auto& d : datasets) ds.push_back(d.to_json());
    return {{"epoch", epoch},     {"refreshed", refreshed}, {"datasets", ds},
            {"train_size", train_size}, {"mean_loss", mean_loss}, {"digest", digest}};
  }
};

struct TrainingLog {
  std::vector<EpochRecord> epochs;

  void write_jsonl(std::ostream& out) const {
    for (const auto& e : epochs) out << e.to_json().dump() << '\n';
  }
};

inline bool is_refresh_epoch(int epoch, int every) { return epoch == 1 || epoch % every == 0; }

namespace detail {

struct Selected {
  std::size_t pool = 0;
  bool positive = false;
  std::size_t index = 0;
};

// Shared epoch loop. `draw(epoch, pool_index, rng, sample)` returns the
// indices of the unlabelled instances that join the training set and fills
// in the per-dataset counts; `loss(tape, pool, positive, index)` records the
// loss of one instance.
template <typename Input, typename Draw, typename Loss>
TrainingLog run(const std::vector<Pool<Input>>& pools, const TrainingConfig& cfg,
                nn::ParameterStore& params, Draw&& draw, Loss&& loss, std::ostream* log_out) {
  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < pools.size(); ++i) {
    if (pools[i].positives.empty()) {
      log::warn("dataset '", pools[i].name, "' has no positive instances; skipping it");
    } else {
      active.push_back(i);
    }
  }
  if (active.empty()) throw DataError("no dataset has positive instances");

  nn::Optimizer opt(cfg.optimizer, params);
  TrainingLog log;
  std::vector<Selected> train;
  std::vector<DatasetSample> samples;
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    EpochRecord rec;
    rec.epoch = epoch;
    rec.refreshed = is_refresh_epoch(epoch, cfg.refresh_every);
    if (rec.refreshed) {
      train.clear();
      samples.clear();
      for (auto pi : active) {
        const auto& pool = pools[pi];
        DatasetSample s;
        s.name = pool.name;
        s.positives = pool.positives.size();
        s.unlabelled = pool.unlabelled.size();
        Rng rng(derive_seed(cfg.seed, 1'000'000 + static_cast<std::uint64_t>(epoch) * 1000 + pi));
        const auto picked = draw(epoch, pi, rng, s);
        for (std::size_t i = 0; i < pool.positives.size(); ++i) train.push_back({pi, true, i});
        for (auto i : picked) train.push_back({pi, false, i});
        samples.push_back(s);
      }
    }
    rec.datasets = samples;
    rec.train_size = train.size();
    std::uint64_t h = text::fnv1a("");
    for (const auto& s : train) {
      h = text::fnv1a(std::to_string(s.pool) + (s.positive ? "P" : "U") + std::to_string(s.index) + ";", h);
    }
    rec.digest = h;

    std::vector<const Selected*> order;
    for (const auto& s : train) order.push_back(&s);
    Rng shuffle_rng(derive_seed(cfg.seed, 2'000'000 + static_cast<std::uint64_t>(epoch)));
    shuffle_rng.shuffle(order);
    double total = 0.0;
    std::size_t batches = 0;
    for (std::size_t b = 0; b < order.size(); b += cfg.batch_size) {
      const std::vector<const Selected*> batch(
          order.begin() + static_cast<std::ptrdiff_t>(b),
          order.begin() + static_cast<std::ptrdiff_t>(std::min(order.size(), b + cfg.batch_size)));
      total += nn::train_step(params, opt, batch,
                              [&](nn::Tape& t, const Selected& s) { return loss(t, s); },
                              batches) * static_cast<double>(batch.size());
      ++batches;
    }
    rec.mean_loss = order.empty() ? 0.0 : total / static_cast<double>(order.size());
    log::info("epoch ", epoch, ": ", rec.train_size, " instances, mean loss ", rec.mean_loss);
    if (log_out) *log_out << rec.to_json().dump() << '\n';
    log.epochs.push_back(std::move(rec));
  }
  return log;
}

}  // namespace detail

struct IdentifierTraining {
  nn::IdentifierModel model;
  TrainingLog log;
};

// Epoch 1 samples p unlabelled instances per dataset. Every refresh epoch
// after that draws a fresh sample and drops the instances the current model
// scores above epsilon; the smaller set is kept.
inline IdentifierTraining train_identifier(const std::vector<IdentifierPool>& pools,
                                           const TrainingConfig& cfg,
                                           const nn::IdentifierDims& dims = {},
                                           std::ostream* log_out = nullptr) {
  cfg.validate();
  IdentifierTraining out{nn::IdentifierModel::create(dims, derive_seed(cfg.seed, 0)), {}};
  auto& model = out.model;
  const auto draw = [&](int epoch, std::size_t pi, Rng& rng, DatasetSample& s) {
    const auto& pool = pools[pi];
    auto picked = rng.sample_indices(pool.unlabelled.size(), pool.positives.size());
    s.sampled = picked.size();
    if (epoch > 1) {
      std::vector<std::size_t> kept;
      for (auto i : picked) {
        if (model.forward(pool.unlabelled[i].input).omega() <= cfg.epsilon) kept.push_back(i);
      }
      picked.swap(kept);
    }
    s.kept = picked.size();
    s.filtered = s.sampled - s.kept;
    if (s.filtered) log::info("dataset '", pool.name, "': filter removed ", s.filtered, " instances");
    return picked;
  };
  const auto loss = [&](nn::Tape& t, const detail::Selected& s) {
    const auto& pool = pools[s.pool];
    const auto& in = s.positive ? pool.positives[s.index] : pool.unlabelled[s.index];
    return nn::softmax_cross_entropy(t, model.logits(t, in.input), s.positive ? 1 : 0);
  };
  out.log = detail::run(pools, cfg, model.parameters(), draw, loss, log_out);
  model.training_config() = cfg.to_json();
  return out;
}

struct RankerTraining {
  nn::RankerModel model;
  TrainingLog log;
};

// Each refresh draws k = round(p * theta) unlabelled instances per dataset.
// Min-max normalization is fitted on every instance of every pool.
inline RankerTraining train_ranker(const std::vector<RankerPool>& pools, const TrainingConfig& cfg,
                                   const nn::RankerDims& dims = {},
                                   std::ostream* log_out = nullptr) {
  cfg.validate();
  RankerTraining out{nn::RankerModel::create(dims, derive_seed(cfg.seed, 0)), {}};
  auto& model = out.model;
  std::vector<DependentVector> rows;
  for (const auto& pool : pools) {
    for (const auto& in : pool.positives) rows.push_back(in.input.x);
    for (const auto& in : pool.unlabelled) rows.push_back(in.input.x);
  }
  model.set_normalization(nn::FeatureNormalization::fit(rows));
  // Normalized copies, so training never renormalizes.
  std::vector<RankerPool> norm = pools;
  for (auto& pool : norm) {
    for (auto* part : {&pool.positives, &pool.unlabelled}) {
      for (auto& in : *part) in.input.x = model.normalization().apply(in.input.x);
    }
  }
  const auto draw = [&](int, std::size_t pi, Rng& rng, DatasetSample& s) {
    const auto& pool = norm[pi];
    const auto k = ranker_sample_size(pool.positives.size(), cfg.theta, pool.unlabelled.size());
    auto picked = rng.sample_indices(pool.unlabelled.size(), k);
    s.sampled = s.kept = picked.size();
    return picked;
  };
  const auto loss = [&](nn::Tape& t, const detail::Selected& s) {
    const auto& pool = norm[s.pool];
    const auto& in = (s.positive ? pool.positives[s.index] : pool.unlabelled[s.index]).input;
    return nn::softmax_cross_entropy(t, model.logits(t, in.sublanguage, in.length, in.x),
                                     s.positive ? 1 : 0);
  };
  out.log = detail::run(norm, cfg, model.parameters(), draw, loss, log_out);
  model.training_config() = cfg.to_json();
  return out;
}

}  // namespace keyness::pu
