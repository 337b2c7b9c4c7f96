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

#include <cmath>
#include <string>
#include <vector>

#include <json.hpp>

#include "keyness/error.hpp"
#include "keyness/neural/autograd.hpp"

namespace keyness::nn {

enum class OptimizerKind { sgd, adam, adadelta };

inline std::string to_string(OptimizerKind k) {
  switch (k) {
    case OptimizerKind::sgd: return "sgd";
    case OptimizerKind::adam: return "adam";
    case OptimizerKind::adadelta: return "adadelta";
  }
  return "sgd";
}

inline OptimizerKind optimizer_from_string(const std::string& s) {
  if (s == "sgd") return OptimizerKind::sgd;
  if (s == "adam") return OptimizerKind::adam;
  if (s == "adadelta") return OptimizerKind::adadelta;
  throw Error("unknown optimizer '" + s + "' (expected sgd, adam or adadelta)");
}

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::sgd;
  double learning_rate = 0.01;
  double beta1 = 0.9;    // adam
  double beta2 = 0.999;  // adam
  double rho = 0.9;      // adadelta
  double eps = 1e-8;

  nlohmann::json to_json() const {
    return {{"kind", to_string(kind)}, {"learning_rate", learning_rate}, {"beta1", beta1},
            {"beta2", beta2},         {"rho", rho},                     {"eps", eps}};
  }
};

class Optimizer {
 public:
  Optimizer(const OptimizerConfig& cfg, const ParameterStore& ps)
      : cfg_(cfg), m_(ps.zeros_like()), v_(ps.zeros_like()) {}

  void step(ParameterStore& ps, const Gradients& grads) {
    ++steps_;
    for (std::size_t i = 0; i < ps.size(); ++i) {
      auto& w = ps[i].value;
      const auto& g = grads[i];
      switch (cfg_.kind) {
        case OptimizerKind::sgd:
          w -= cfg_.learning_rate * g;
          break;
        case OptimizerKind::adam: {
          m_[i] = cfg_.beta1 * m_[i] + (1.0 - cfg_.beta1) * g;
          v_[i] = cfg_.beta2 * v_[i] + (1.0 - cfg_.beta2) * g.cwiseProduct(g);
          const double c1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(steps_));
          const double c2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(steps_));
          w.array() -= cfg_.learning_rate * (m_[i].array() / c1) /
                       ((v_[i].array() / c2).sqrt() + cfg_.eps);
          break;
        }
        case OptimizerKind::adadelta: {
          // m_ holds the running E[g^2], v_ the running E[dx^2].
          const double eps = 1e-6;
          m_[i] = cfg_.rho * m_[i] + (1.0 - cfg_.rho) * g.cwiseProduct(g);
          const Matrix delta = (((v_[i].array() + eps).sqrt() / (m_[i].array() + eps).sqrt()) *
                                g.array()).matrix();
          v_[i] = cfg_.rho * v_[i] + (1.0 - cfg_.rho) * delta.cwiseProduct(delta);
          w -= cfg_.learning_rate * delta;
          break;
        }
      }
    }
  }

  std::size_t steps() const { return steps_; }

 private:
  OptimizerConfig cfg_;
  std::vector<Matrix> m_, v_;
  std::size_t steps_ = 0;
};

// One optimizer update on the mean loss of a batch. `build_loss(tape, example)`
// records the per-example loss. Returns the mean loss before the update.
template <typename Example, typename BuildLoss>
double train_step(ParameterStore& ps, Optimizer& opt, const std::vector<const Example*>& batch,
                  BuildLoss&& build_loss, std::size_t batch_id = 0) {
  if (batch.empty()) return 0.0;
  Gradients grads = ps.zeros_like();
  double total = 0.0;
  for (const Example* ex : batch) {
    Tape t(&ps);
    const Var loss = build_loss(t, *ex);
    total += t.value(loss)(0, 0);
    t.backward(loss, &grads);
  }
  const double n = static_cast<double>(batch.size());
  const double mean = total / n;
  if (!std::isfinite(mean)) {
    throw NumericError("non-finite loss in batch " + std::to_string(batch_id));
  }
  for (auto& g : grads) g /= n;
  opt.step(ps, grads);
  return mean;
}

}  // namespace keyness::nn
