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
#include <functional>
#include <string>
#include <vector>

#include "keyness/neural/autograd.hpp"

namespace keyness::nn {

struct TensorGradientCheck {
  std::string name;
  std::size_t entries = 0;
  std::size_t refined = 0;  // entries re-checked with a smaller step (kink crossings)
  double max_rel_error = 0.0;
};

struct GradientReport {
  std::vector<TensorGradientCheck> tensors;
  double tolerance = 1e-4;

  double max_rel_error() const {
    double m = 0.0;
    for (const auto& t : tensors) m = std::max(m, t.max_rel_error);
    return m;
  }
  bool passed() const { return max_rel_error() < tolerance; }
};

// Relative error with an absolute floor. Central differences in double
// precision carry round-off near 1e-10 for O(1) losses, so gradients that are
// exactly zero (e.g. attention key biases) are judged against the floor.
inline double relative_error(double analytic, double numeric, double floor = 1e-5) {
  return std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), floor});
}

// Compares tape gradients of a scalar loss with central finite differences,
// entry by entry, for every tensor in `ps`. An entry that misses the
// tolerance is re-measured with step h/100: a ReLU or max-pool kink inside
// [x - h, x + h] spoils the first difference but not the analytic value.
inline GradientReport gradient_check(ParameterStore& ps, const std::function<Var(Tape&)>& build_loss,
                                     double h = 1e-5, double tolerance = 1e-4) {
  Gradients analytic = ps.zeros_like();
  {
    Tape t(&ps);
    const Var loss = build_loss(t);
    t.backward(loss, &analytic);
  }
  const auto eval = [&] {
    Tape t(&ps);
    return t.value(build_loss(t))(0, 0);
  };
  const auto central = [&](double& x, double step) {
    const double saved = x;
    x = saved + step;
    const double up = eval();
    x = saved - step;
    const double down = eval();
    x = saved;
    return (up - down) / (2.0 * step);
  };
  GradientReport report;
  report.tolerance = tolerance;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    TensorGradientCheck tc;
    tc.name = ps[i].name;
    auto& w = ps[i].value;
    for (Eigen::Index j = 0; j < w.size(); ++j) {
      const double a = analytic[i].data()[j];
      double err = relative_error(a, central(w.data()[j], h));
      if (err >= tolerance) {
        ++tc.refined;
        err = std::min(err, relative_error(a, central(w.data()[j], h / 100.0)));
      }
      tc.max_rel_error = std::max(tc.max_rel_error, err);
      ++tc.entries;
    }
    report.tensors.push_back(tc);
  }
  return report;
}

}  // namespace keyness::nn
