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

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "keyness/corpus/document.hpp"
#include "keyness/error.hpp"
#include "keyness/features/pattern.hpp"
#include "keyness/neural/autograd.hpp"
#include "keyness/neural/layers.hpp"
#include "keyness/neural/serialize.hpp"
#include "keyness/rng.hpp"

namespace keyness::nn {

struct RankerDims {
  int d_model = 32;
  int heads = 4;
  int ff = 64;
  int encoder_layers = 2;
  int channels = 32;
  int kernel = 3;
  int pool = 2;
  int conv_layers = 3;

  nlohmann::json to_json() const {
    return {{"d_model", d_model}, {"heads", heads},       {"ff", ff},
            {"encoder_layers", encoder_layers},            {"channels", channels},
            {"kernel", kernel},   {"pool", pool},         {"conv_layers", conv_layers}};
  }
  static RankerDims from_json(const nlohmann::json& j) {
    RankerDims d;
    d.d_model = j.at("d_model");
    d.heads = j.at("heads");
    d.ff = j.at("ff");
    d.encoder_layers = j.at("encoder_layers");
    d.channels = j.at("channels");
    d.kernel = j.at("kernel");
    d.pool = j.at("pool");
    d.conv_layers = j.at("conv_layers");
    return d;
  }
};

// Per-feature min-max scaling fitted on training patterns. Constant features
// map to 0.
struct FeatureNormalization {
  DependentVector min{};
  DependentVector max{};

  static FeatureNormalization identity() {
    FeatureNormalization n;
    n.min.fill(0.0);
    n.max.fill(1.0);
    return n;
  }

  static FeatureNormalization fit(const std::vector<DependentVector>& rows) {
    if (rows.empty()) return identity();
    FeatureNormalization n;
    n.min = rows.front();
    n.max = rows.front();
    for (const auto& r : rows) {
      for (std::size_t i = 0; i < kDependentFeatures; ++i) {
        n.min[i] = std::min(n.min[i], r[i]);
        n.max[i] = std::max(n.max[i], r[i]);
      }
    }
    return n;
  }

  DependentVector apply(const DependentVector& x) const {
    DependentVector y{};
    for (std::size_t i = 0; i < kDependentFeatures; ++i) {
      const double range = max[i] - min[i];
      y[i] = range > 0.0 ? (x[i] - min[i]) / range : 0.0;
    }
    return y;
  }

  friend bool operator==(const FeatureNormalization&, const FeatureNormalization&) = default;
};

struct Keyness {
  double negative = 0.5;  // N-score
  double positive = 0.5;  // P-score
  double r() const { return positive - negative; }
};

// Candidate ranking network. The sublanguage and length embeddings (17-dim
// each) modulate the dependent vector elementwise; each of the 17 modulated
// scalars is lifted to d_model by its own affine map, sinusoidal positions
// are added, and the sequence passes through the encoder stack and three
// conv+relu+maxpool stages before the final 2-way affine layer.
class RankerModel {
 public:
  static constexpr std::string_view kMagic = "KNSRNK01";
  static constexpr std::size_t kLengths = kMaxNgram;

  static RankerModel create(const RankerDims& dims, std::uint64_t seed) {
    return RankerModel(dims, seed);
  }

  RankerModel(const RankerDims& dims, std::uint64_t seed) : dims_(dims) {
    if (dims_.d_model % dims_.heads != 0) throw Error("ranker d_model not divisible by heads");
    Rng rng(seed);
    const auto f = static_cast<Eigen::Index>(kDependentFeatures);
    sub_embed_ = params_.add("embed.sublanguage",
                             Matrix::Ones(static_cast<Eigen::Index>(kSublanguages.size()), f));
    len_embed_ = params_.add("embed.length", Matrix::Ones(kLengths, f));
    lift_weight_ = params_.add("lift.weight", normal_init(rng, f, dims_.d_model, 1.0));
    lift_bias_ = params_.add("lift.bias", Matrix::Zero(f, dims_.d_model));
    for (int i = 0; i < dims_.encoder_layers; ++i) {
      encoders_.push_back(EncoderLayer::create(params_, "encoder" + std::to_string(i),
                                               dims_.d_model, dims_.heads, dims_.ff, rng));
    }
    int len = static_cast<int>(kDependentFeatures);
    int in = dims_.d_model;
    for (int i = 0; i < dims_.conv_layers; ++i) {
      convs_.push_back(Conv1d::create(params_, "conv" + std::to_string(i), in, dims_.channels,
                                      dims_.kernel, dims_.kernel / 2, rng));
      in = dims_.channels;
      len = (len - dims_.pool) / dims_.pool + 1;
      if (len < 1) throw Error("ranker has too many pooling stages for 17 positions");
    }
    out_ = Linear::create(params_, "output", len * dims_.channels, 2, rng);
    positions_ = sinusoidal_positions(f, dims_.d_model);
    normalization_ = FeatureNormalization::identity();
  }

  // Logits (1 x 2): column 0 N-score, column 1 P-score. `x` is already normalized.
  Var logits(Tape& t, std::size_t sublanguage, std::size_t length, const DependentVector& x) const {
    Matrix xv(1, static_cast<Eigen::Index>(kDependentFeatures));
    for (std::size_t i = 0; i < kDependentFeatures; ++i) xv(0, static_cast<Eigen::Index>(i)) = x[i];
    const Var es = gather_rows(t, t.param(sub_embed_), {static_cast<int>(sublanguage)});
    const Var el = gather_rows(t, t.param(len_embed_), {static_cast<int>(length - 1)});
    const Var modulated = hadamard(t, hadamard(t, es, el), t.constant(std::move(xv)));
    Var h = add(t, scale_rows(t, t.param(lift_weight_), modulated), t.param(lift_bias_));
    h = add(t, h, t.constant(positions_));
    for (const auto& enc : encoders_) h = enc(t, h);
    for (const auto& conv : convs_) h = pool()(t, relu(t, conv(t, h)));
    return out_(t, flatten(t, h));
  }

  std::size_t sublanguage_id(const std::string& label) const {
    return sublanguage_index(label).value_or(0);
  }

  void check(const KeynessPattern& p) const {
    for (std::size_t i = 0; i < kDependentFeatures; ++i) {
      if (!std::isfinite(p.dependent[i])) {
        throw NumericError("non-finite feature '" + std::string(kFeatureNames[i]) + "'");
      }
    }
    if (p.length < 1 || p.length > kLengths) throw Error("term length outside 1..4");
  }

  Keyness forward(const KeynessPattern& p) const {
    check(p);
    Tape t(&params_);
    const Matrix prob = softmax_rows_value(
        t.value(logits(t, sublanguage_id(p.sublanguage), p.length, normalization_.apply(p.dependent))));
    return {prob(0, 0), prob(0, 1)};
  }

  ParameterStore& parameters() { return params_; }
  const ParameterStore& parameters() const { return params_; }
  const RankerDims& dims() const { return dims_; }
  const FeatureNormalization& normalization() const { return normalization_; }
  void set_normalization(const FeatureNormalization& n) { normalization_ = n; }
  nlohmann::json& training_config() { return training_config_; }
  const nlohmann::json& training_config() const { return training_config_; }

  void save(const std::filesystem::path& path) const {
    ModelWriter w;
    std::vector<std::string> subs(kSublanguages.begin(), kSublanguages.end());
    std::vector<std::string> names(kFeatureNames.begin(), kFeatureNames.end());
    w.header(kMagic, kFeatureOrderVersion,
             {{"architecture", "ranker"},
              {"dims", dims_.to_json()},
              {"sublanguages", subs},
              {"features", names},
              {"normalization", {{"min", normalization_.min}, {"max", normalization_.max}}},
              {"training", training_config_}});
    w.tensors(params_);
    w.save(path);
  }

  static RankerModel load(const std::filesystem::path& path) {
    ModelReader r(path, kMagic);
    if (r.feature_order_version() != static_cast<std::uint32_t>(kFeatureOrderVersion)) {
      r.fail("feature-order version " + std::to_string(r.feature_order_version()) +
             " does not match " + std::to_string(kFeatureOrderVersion));
    }
    const auto& m = r.meta();
    try {
      const auto subs = m.at("sublanguages").get<std::vector<std::string>>();
      if (!std::equal(subs.begin(), subs.end(), kSublanguages.begin(), kSublanguages.end())) {
        r.fail("sublanguage vocabulary does not match this build");
      }
      RankerModel model(RankerDims::from_json(m.at("dims")), 0);
      model.normalization_.min = m.at("normalization").at("min").get<DependentVector>();
      model.normalization_.max = m.at("normalization").at("max").get<DependentVector>();
      model.training_config_ = m.value("training", nlohmann::json::object());
      r.tensors(model.params_);
      return model;
    } catch (const nlohmann::json::exception& e) {
      r.fail(std::string("bad ranker header: ") + e.what());
    }
  }

 private:
  MaxPool pool() const { return {dims_.pool, dims_.pool}; }

  RankerDims dims_;
  ParameterStore params_;
  std::size_t sub_embed_ = 0, len_embed_ = 0, lift_weight_ = 0, lift_bias_ = 0;
  std::vector<EncoderLayer> encoders_;
  std::vector<Conv1d> convs_;
  Linear out_;
  Matrix positions_;
  FeatureNormalization normalization_;
  nlohmann::json training_config_ = nlohmann::json::object();
};

}  // namespace keyness::nn
