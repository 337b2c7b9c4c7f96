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

#include "keyness/neural/autograd.hpp"
#include "keyness/rng.hpp"

namespace keyness::nn {

inline Matrix uniform_init(Rng& rng, Eigen::Index rows, Eigen::Index cols, double bound) {
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform(-bound, bound);
  return m;
}

inline Matrix normal_init(Rng& rng, Eigen::Index rows, Eigen::Index cols, double stddev) {
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = stddev * rng.normal();
  return m;
}

// y = x W + b, with W (in x out) and b (1 x out).
struct Linear {
  std::size_t weight = 0, bias = 0;

  static Linear create(ParameterStore& ps, const std::string& name, Eigen::Index in,
                       Eigen::Index out, Rng& rng) {
    const double bound = std::sqrt(6.0 / static_cast<double>(in + out));
    return {ps.add(name + ".weight", uniform_init(rng, in, out, bound)),
            ps.add(name + ".bias", Matrix::Zero(1, out))};
  }

  Var operator()(Tape& t, Var x) const {
    return add_row(t, matmul(t, x, t.param(weight)), t.param(bias));
  }
};

struct Embedding {
  std::size_t table = 0;

  static Embedding create(ParameterStore& ps, const std::string& name, Eigen::Index vocab,
                          Eigen::Index dim, Rng& rng) {
    return {ps.add(name + ".table", normal_init(rng, vocab, dim, 1.0 / std::sqrt(double(dim))))};
  }

  Var operator()(Tape& t, std::vector<int> ids) const {
    return gather_rows(t, t.param(table), std::move(ids));
  }
};

// 1-D convolution along the row (sequence) axis; channels are columns.
struct Conv1d {
  std::size_t weight = 0, bias = 0;
  int kernel = 3;
  int pad = 1;

  static Conv1d create(ParameterStore& ps, const std::string& name, Eigen::Index in_channels,
                       Eigen::Index out_channels, int kernel, int pad, Rng& rng) {
    const double fan_in = static_cast<double>(in_channels * kernel);
    const double bound = std::sqrt(6.0 / fan_in);
    return {ps.add(name + ".weight", uniform_init(rng, in_channels * kernel, out_channels, bound)),
            ps.add(name + ".bias", Matrix::Zero(1, out_channels)), kernel, pad};
  }

  Var operator()(Tape& t, Var x) const {
    return add_row(t, matmul(t, unfold_rows(t, x, kernel, pad), t.param(weight)), t.param(bias));
  }
};

struct MaxPool {
  int kernel = 2;
  int stride = 2;

  Var operator()(Tape& t, Var x) const { return maxpool_rows(t, x, kernel, stride); }
};

struct LayerNorm {
  std::size_t gain = 0, bias = 0;

  static LayerNorm create(ParameterStore& ps, const std::string& name, Eigen::Index dim) {
    return {ps.add(name + ".gain", Matrix::Ones(1, dim)),
            ps.add(name + ".bias", Matrix::Zero(1, dim))};
  }

  Var operator()(Tape& t, Var x) const {
    return layer_norm(t, x, t.param(gain), t.param(bias));
  }
};

// Scaled dot-product self-attention with `heads` heads over a (len x d) input.
struct MultiHeadAttention {
  Linear query, key, value, output;
  int heads = 1;

  static MultiHeadAttention create(ParameterStore& ps, const std::string& name, Eigen::Index d,
                                   int heads, Rng& rng) {
    return {Linear::create(ps, name + ".query", d, d, rng),
            Linear::create(ps, name + ".key", d, d, rng),
            Linear::create(ps, name + ".value", d, d, rng),
            Linear::create(ps, name + ".output", d, d, rng), heads};
  }

  Var operator()(Tape& t, Var x) const {
    const auto d = t.value(x).cols();
    const auto dh = d / heads;
    const Var q = query(t, x), k = key(t, x), v = value(t, x);
    std::vector<Var> per_head;
    per_head.reserve(static_cast<std::size_t>(heads));
    for (int h = 0; h < heads; ++h) {
      const Var qh = slice_cols(t, q, h * dh, dh);
      const Var kh = slice_cols(t, k, h * dh, dh);
      const Var vh = slice_cols(t, v, h * dh, dh);
      const Var scores = scale(t, matmul_nt(t, qh, kh), 1.0 / std::sqrt(static_cast<double>(dh)));
      per_head.push_back(matmul(t, softmax_rows(t, scores), vh));
    }
    return output(t, heads == 1 ? per_head.front() : concat_cols(t, per_head));
  }
};

// Post-norm transformer encoder layer:
//   h = LN(x + MHA(x)); y = LN(h + W2 relu(W1 h)).
struct EncoderLayer {
  MultiHeadAttention attention;
  LayerNorm norm1;
  Linear ff1, ff2;
  LayerNorm norm2;

  static EncoderLayer create(ParameterStore& ps, const std::string& name, Eigen::Index d,
                             int heads, Eigen::Index ff, Rng& rng) {
    EncoderLayer e;
    e.attention = MultiHeadAttention::create(ps, name + ".attention", d, heads, rng);
    e.norm1 = LayerNorm::create(ps, name + ".norm1", d);
    e.ff1 = Linear::create(ps, name + ".ff1", d, ff, rng);
    e.ff2 = Linear::create(ps, name + ".ff2", ff, d, rng);
    e.norm2 = LayerNorm::create(ps, name + ".norm2", d);
    return e;
  }

  Var operator()(Tape& t, Var x) const {
    const Var h = norm1(t, add(t, x, attention(t, x)));
    return norm2(t, add(t, h, ff2(t, relu(t, ff1(t, h)))));
  }
};

// Sinusoidal position table (len x d).
inline Matrix sinusoidal_positions(Eigen::Index len, Eigen::Index d) {
  Matrix pe(len, d);
  for (Eigen::Index pos = 0; pos < len; ++pos) {
    for (Eigen::Index i = 0; i < d; ++i) {
      const double rate = std::pow(10000.0, static_cast<double>(2 * (i / 2)) / static_cast<double>(d));
      const double angle = static_cast<double>(pos) / rate;
      pe(pos, i) = (i % 2 == 0) ? std::sin(angle) : std::cos(angle);
    }
  }
  return pe;
}

}  // namespace keyness::nn
