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
#include <utility>

#include <json.hpp>

#include "keyness/candidates/quadruple.hpp"
#include "keyness/neural/autograd.hpp"
#include "keyness/neural/layers.hpp"
#include "keyness/neural/serialize.hpp"
#include "keyness/neural/vocabulary.hpp"
#include "keyness/rng.hpp"

namespace keyness::nn {

struct IdentifierDims {
  int pos_dim = 16;
  int case_dim = 4;
  int stop_dim = 4;
  int dep_dim = 16;
  int channels = 64;  // conv channels and encoder width
  int heads = 4;
  int ff = 128;
  int hidden = 64;
  int kernel = 3;

  nlohmann::json to_json() const {
    return {{"pos_dim", pos_dim}, {"case_dim", case_dim}, {"stop_dim", stop_dim},
            {"dep_dim", dep_dim}, {"channels", channels}, {"heads", heads},
            {"ff", ff},           {"hidden", hidden},     {"kernel", kernel}};
  }
  static IdentifierDims from_json(const nlohmann::json& j) {
    IdentifierDims d;
    d.pos_dim = j.at("pos_dim");
    d.case_dim = j.at("case_dim");
    d.stop_dim = j.at("stop_dim");
    d.dep_dim = j.at("dep_dim");
    d.channels = j.at("channels");
    d.heads = j.at("heads");
    d.ff = j.at("ff");
    d.hidden = j.at("hidden");
    d.kernel = j.at("kernel");
    return d;
  }
};

// Symbol ids of one padded quadruple sequence: [position][pos, case, stop, dep].
using EncodedQuadruples = std::array<std::array<int, 4>, kQuadrupleLength>;

struct Wellformedness {
  double ill = 0.5;   // I-prob
  double well = 0.5;  // W-prob
  double omega() const { return well - ill; }
};

// Candidate identification network:
//   embeddings(pos|case|stop|dep) -> conv+relu -> maxpool -> conv+relu ->
//   maxpool -> transformer encoder -> linear -> relu -> linear -> softmax.
// Both convolutions run over the four-word axis ("same" padding); pools use
// window 2, stride 1, so the encoder sees two positions.
class IdentifierModel {
 public:
  static constexpr std::string_view kMagic = "KNSIDF01";

  static IdentifierModel create(const IdentifierDims& dims, std::uint64_t seed) {
    return IdentifierModel(dims, default_pos_vocabulary(), default_case_vocabulary(),
                           default_stop_vocabulary(), default_dep_vocabulary(), seed);
  }

  IdentifierModel(const IdentifierDims& dims, Vocabulary pos, Vocabulary cas, Vocabulary stop,
                  Vocabulary dep, std::uint64_t seed)
      : dims_(dims), pos_(std::move(pos)), case_(std::move(cas)), stop_(std::move(stop)),
        dep_(std::move(dep)) {
    if (dims_.channels % dims_.heads != 0) throw Error("identifier channels not divisible by heads");
    Rng rng(seed);
    emb_pos_ = Embedding::create(params_, "embed.pos", static_cast<Eigen::Index>(pos_.size()), dims_.pos_dim, rng);
    emb_case_ = Embedding::create(params_, "embed.case", static_cast<Eigen::Index>(case_.size()), dims_.case_dim, rng);
    emb_stop_ = Embedding::create(params_, "embed.stop", static_cast<Eigen::Index>(stop_.size()), dims_.stop_dim, rng);
    emb_dep_ = Embedding::create(params_, "embed.dep", static_cast<Eigen::Index>(dep_.size()), dims_.dep_dim, rng);
    const int in = dims_.pos_dim + dims_.case_dim + dims_.stop_dim + dims_.dep_dim;
    const int pad = dims_.kernel / 2;
    conv1_ = Conv1d::create(params_, "conv1", in, dims_.channels, dims_.kernel, pad, rng);
    conv2_ = Conv1d::create(params_, "conv2", dims_.channels, dims_.channels, dims_.kernel, pad, rng);
    encoder_ = EncoderLayer::create(params_, "encoder", dims_.channels, dims_.heads, dims_.ff, rng);
    const int len = sequence_after_pools();
    fc1_ = Linear::create(params_, "fc1", len * dims_.channels, dims_.hidden, rng);
    fc2_ = Linear::create(params_, "fc2", dims_.hidden, 2, rng);
  }

  EncodedQuadruples encode(const QuadrupleSeq& seq) const {
    EncodedQuadruples e{};
    for (std::size_t i = 0; i < kQuadrupleLength; ++i) {
      e[i] = {pos_.id(seq[i].pos), case_.id(seq[i].case_status), stop_.id(seq[i].is_stop),
              dep_.id(seq[i].dep_type)};
    }
    return e;
  }

  // Logits (1 x 2): column 0 ill-formed, column 1 well-formed.
  Var logits(Tape& t, const EncodedQuadruples& e) const {
    std::vector<int> p, c, s, d;
    for (const auto& q : e) {
      p.push_back(q[0]);
      c.push_back(q[1]);
      s.push_back(q[2]);
      d.push_back(q[3]);
    }
    Var x = concat_cols(t, {emb_pos_(t, p), emb_case_(t, c), emb_stop_(t, s), emb_dep_(t, d)});
    x = pool_(t, relu(t, conv1_(t, x)));
    x = pool_(t, relu(t, conv2_(t, x)));
    x = encoder_(t, x);
    return fc2_(t, relu(t, fc1_(t, flatten(t, x))));
  }

  Wellformedness forward(const EncodedQuadruples& e) const {
    Tape t(&params_);
    const Matrix p = softmax_rows_value(t.value(logits(t, e)));
    return {p(0, 0), p(0, 1)};
  }

  Wellformedness forward(const QuadrupleSeq& seq) const { return forward(encode(seq)); }

  ParameterStore& parameters() { return params_; }
  const ParameterStore& parameters() const { return params_; }
  const IdentifierDims& dims() const { return dims_; }

  nlohmann::json& training_config() { return training_config_; }
  const nlohmann::json& training_config() const { return training_config_; }

  void save(const std::filesystem::path& path) const {
    ModelWriter w;
    w.header(kMagic, 0,
             {{"architecture", "identifier"},
              {"dims", dims_.to_json()},
              {"vocabularies",
               {{"pos", pos_.to_json()},
                {"case", case_.to_json()},
                {"stop", stop_.to_json()},
                {"dep", dep_.to_json()}}},
              {"training", training_config_}});
    w.tensors(params_);
    w.save(path);
  }

  static IdentifierModel load(const std::filesystem::path& path) {
    ModelReader r(path, kMagic);
    const auto& m = r.meta();
    try {
      const auto& v = m.at("vocabularies");
      IdentifierModel model(IdentifierDims::from_json(m.at("dims")), Vocabulary::from_json(v.at("pos")),
                            Vocabulary::from_json(v.at("case")), Vocabulary::from_json(v.at("stop")),
                            Vocabulary::from_json(v.at("dep")), 0);
      model.training_config_ = m.value("training", nlohmann::json::object());
      r.tensors(model.params_);
      return model;
    } catch (const nlohmann::json::exception& e) {
      r.fail(std::string("bad identifier header: ") + e.what());
    }
  }

 private:
  int sequence_after_pools() const {
    int len = static_cast<int>(kQuadrupleLength);
    len = (len - pool_.kernel) / pool_.stride + 1;
    len = (len - pool_.kernel) / pool_.stride + 1;
    return len;
  }

  IdentifierDims dims_;
  Vocabulary pos_, case_, stop_, dep_;
  ParameterStore params_;
  Embedding emb_pos_, emb_case_, emb_stop_, emb_dep_;
  Conv1d conv1_, conv2_;
  MaxPool pool_{2, 1};
  EncoderLayer encoder_;
  Linear fc1_, fc2_;
  nlohmann::json training_config_ = nlohmann::json::object();
};

}  // namespace keyness::nn
