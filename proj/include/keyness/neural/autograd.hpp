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
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "keyness/error.hpp"

namespace keyness::nn {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct Parameter {
  std::string name;
  Matrix value;
};

// Ordered, named parameter tensors of one network.
class ParameterStore {
 public:
  std::size_t add(std::string name, Matrix init) {
    params_.push_back({std::move(name), std::move(init)});
    return params_.size() - 1;
  }

  std::size_t size() const { return params_.size(); }
  Parameter& operator[](std::size_t i) { return params_[i]; }
  const Parameter& operator[](std::size_t i) const { return params_[i]; }
  auto begin() { return params_.begin(); }
  auto end() { return params_.end(); }
  auto begin() const { return params_.begin(); }
  auto end() const { return params_.end(); }

  std::vector<Matrix> zeros_like() const {
    std::vector<Matrix> out;
    out.reserve(params_.size());
    for (const auto& p : params_) out.push_back(Matrix::Zero(p.value.rows(), p.value.cols()));
    return out;
  }

  std::size_t scalar_count() const {
    std::size_t n = 0;
    for (const auto& p : params_) n += static_cast<std::size_t>(p.value.size());
    return n;
  }

  bool all_finite() const {
    for (const auto& p : params_) {
      if (!p.value.allFinite()) return false;
    }
    return true;
  }

 private:
  std::vector<Parameter> params_;
};

using Gradients = std::vector<Matrix>;

// Reverse-mode tape. Each recorded operation stores its value and a closure
// that pushes the node's gradient to its inputs. Nodes are topologically
// ordered by construction, so backward() is a single reverse sweep.
class Tape {
 public:
  struct Var {
    std::uint32_t id;
  };

  explicit Tape(const ParameterStore* params = nullptr) : params_(params) {}

  Var constant(Matrix v) {
    nodes_.push_back(Node{std::move(v), {}, {}, nullptr, -1});
    return {static_cast<std::uint32_t>(nodes_.size() - 1)};
  }

  Var param(std::size_t index) {
    nodes_.push_back(Node{{}, {}, {}, &(*params_)[index].value, static_cast<int>(index)});
    return {static_cast<std::uint32_t>(nodes_.size() - 1)};
  }

  Var record(Matrix value, std::function<void(Tape&, std::uint32_t)> backward) {
    nodes_.push_back(Node{std::move(value), {}, std::move(backward), nullptr, -1});
    return {static_cast<std::uint32_t>(nodes_.size() - 1)};
  }

  const Matrix& value(Var v) const { return value(v.id); }
  const Matrix& value(std::uint32_t id) const {
    const auto& n = nodes_[id];
    return n.ref ? *n.ref : n.value;
  }

  const Matrix& grad(std::uint32_t id) const { return nodes_[id].grad; }

  template <typename Expr>
  void accumulate(std::uint32_t id, const Expr& g) {
    auto& n = nodes_[id];
    if (n.grad.size() == 0) {
      n.grad = g;
    } else {
      n.grad += g;
    }
  }

  // Accumulates into a single row of a node's gradient (used by gathers).
  template <typename Expr>
  void accumulate_row(std::uint32_t id, Eigen::Index row, const Expr& g) {
    auto& n = nodes_[id];
    if (n.grad.size() == 0) {
      const auto& v = value(id);
      n.grad = Matrix::Zero(v.rows(), v.cols());
    }
    n.grad.row(row) += g;
  }

  // Back-propagates from a scalar node, adding parameter gradients into
  // `param_grads` (indexed like the ParameterStore).
  void backward(Var loss, Gradients* param_grads, double seed = 1.0) {
    nodes_[loss.id].grad = Matrix::Constant(1, 1, seed);
    for (std::int64_t i = loss.id; i >= 0; --i) {
      auto& n = nodes_[static_cast<std::size_t>(i)];
      if (n.grad.size() == 0) continue;
      if (n.backward) n.backward(*this, static_cast<std::uint32_t>(i));
      if (n.param >= 0 && param_grads) (*param_grads)[static_cast<std::size_t>(n.param)] += n.grad;
    }
  }

  // Gradient of the last backward() with respect to a (constant) node.
  Matrix input_grad(Var v) const {
    const auto& n = nodes_[v.id];
    if (n.grad.size() == 0) return Matrix::Zero(value(v).rows(), value(v).cols());
    return n.grad;
  }

  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Matrix value;
    Matrix grad;
    std::function<void(Tape&, std::uint32_t)> backward;
    const Matrix* ref;
    int param;
  };

  std::vector<Node> nodes_;
  const ParameterStore* params_;
};

using Var = Tape::Var;

// ---------------------------------------------------------------------------
// Operations

inline Var matmul(Tape& t, Var a, Var b) {
  Matrix v = t.value(a) * t.value(b);
  return t.record(std::move(v), [a, b](Tape& t, std::uint32_t self) {
    const auto& g = t.grad(self);
    t.accumulate(a.id, g * t.value(b).transpose());
    t.accumulate(b.id, t.value(a).transpose() * g);
  });
}

// a * b^T
inline Var matmul_nt(Tape& t, Var a, Var b) {
  Matrix v = t.value(a) * t.value(b).transpose();
  return t.record(std::move(v), [a, b](Tape& t, std::uint32_t self) {
    const auto& g = t.grad(self);
    t.accumulate(a.id, g * t.value(b));
    t.accumulate(b.id, g.transpose() * t.value(a));
  });
}

inline Var add(Tape& t, Var a, Var b) {
  Matrix v = t.value(a) + t.value(b);
  return t.record(std::move(v), [a, b](Tape& t, std::uint32_t self) {
    const auto& g = t.grad(self);
    t.accumulate(a.id, g);
    t.accumulate(b.id, g);
  });
}

// Adds a 1 x c row to every row of a.
inline Var add_row(Tape& t, Var a, Var row) {
  Matrix v = t.value(a).rowwise() + t.value(row).row(0);
  return t.record(std::move(v), [a, row](Tape& t, std::uint32_t self) {
    const auto& g = t.grad(self);
    t.accumulate(a.id, g);
    t.accumulate(row.id, g.colwise().sum());
  });
}

inline Var hadamard(Tape& t, Var a, Var b) {
  Matrix v = t.value(a).cwiseProduct(t.value(b));
  return t.record(std::move(v), [a, b](Tape& t, std::uint32_t self) {
    const auto& g = t.grad(self);
    t.accumulate(a.id, g.cwiseProduct(t.value(b)));
    t.accumulate(b.id, g.cwiseProduct(t.value(a)));
  });
}

inline Var scale(Tape& t, Var a, double s) {
  Matrix v = t.value(a) * s;
  return t.record(std::move(v), [a, s](Tape& t, std::uint32_t self) {
    t.accumulate(a.id, t.grad(self) * s);
  });
}

inline Var relu(Tape& t, Var a) {
  Matrix v = t.value(a).cwiseMax(0.0);
  return t.record(std::move(v), [a](Tape& t, std::uint32_t self) {
    const auto& x = t.value(a);
    t.accumulate(a.id, t.grad(self).cwiseProduct(
                           x.unaryExpr([](double z) { return z > 0.0 ? 1.0 : 0.0; })));
  });
}

inline Matrix softmax_rows_value(const Matrix& x) {
  Matrix y(x.rows(), x.cols());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    const double m = x.row(r).maxCoeff();
    y.row(r) = (x.row(r).array() - m).exp();
    y.row(r) /= y.row(r).sum();
  }
  return y;
}

inline Var softmax_rows(Tape& t, Var a) {
  Matrix y = softmax_rows_value(t.value(a));
  return t.record(std::move(y), [a](Tape& t, std::uint32_t self) {
    const auto& g = t.grad(self);
    const auto& y = t.value(self);
    const Eigen::VectorXd dots = g.cwiseProduct(y).rowwise().sum();
    Matrix ga = y.cwiseProduct(g - dots.replicate(1, g.cols()));
    t.accumulate(a.id, ga);
  });
}

// Per-row layer normalization with learned gain and bias (both 1 x c).
inline Var layer_norm(Tape& t, Var x, Var gamma, Var beta, double eps = 1e-5) {
  const auto& xv = t.value(x);
  const auto c = static_cast<double>(xv.cols());
  Matrix xhat(xv.rows(), xv.cols());
  Eigen::VectorXd inv_std(xv.rows());
  for (Eigen::Index r = 0; r < xv.rows(); ++r) {
    const double mu = xv.row(r).mean();
    const double var = (xv.row(r).array() - mu).square().sum() / c;
    inv_std(r) = 1.0 / std::sqrt(var + eps);
    xhat.row(r) = (xv.row(r).array() - mu) * inv_std(r);
  }
  Matrix y = (xhat.array().rowwise() * t.value(gamma).row(0).array()).rowwise() +
             t.value(beta).row(0).array();
  return t.record(std::move(y), [x, gamma, beta, xhat = std::move(xhat),
                                 inv_std = std::move(inv_std)](Tape& t, std::uint32_t self) {
    const auto& g = t.grad(self);
    const double c = static_cast<double>(g.cols());
    t.accumulate(gamma.id, g.cwiseProduct(xhat).colwise().sum());
    t.accumulate(beta.id, g.colwise().sum());
    Matrix gx(g.rows(), g.cols());
    for (Eigen::Index r = 0; r < g.rows(); ++r) {
      const Eigen::RowVectorXd gh = g.row(r).cwiseProduct(t.value(gamma).row(0));
      const double m1 = gh.sum() / c;
      const double m2 = gh.cwiseProduct(xhat.row(r)).sum() / c;
      gx.row(r) = inv_std(r) * (gh.array() - m1 - xhat.row(r).array() * m2);
    }
    t.accumulate(x.id, gx);
  });
}

// Selects rows of a table (embedding lookup).
inline Var gather_rows(Tape& t, Var table, std::vector<int> ids) {
  const auto& tv = t.value(table);
  Matrix v(static_cast<Eigen::Index>(ids.size()), tv.cols());
  for (std::size_t i = 0; i < ids.size(); ++i) v.row(static_cast<Eigen::Index>(i)) = tv.row(ids[i]);
  return t.record(std::move(v), [table, ids = std::move(ids)](Tape& t, std::uint32_t self) {
    const auto& g = t.grad(self);
    for (std::size_t i = 0; i < ids.size(); ++i) {
      t.accumulate_row(table.id, ids[i], g.row(static_cast<Eigen::Index>(i)));
    }
  });
}

inline Var concat_cols(Tape& t, const std::vector<Var>& parts) {
  Eigen::Index rows = t.value(parts.front()).rows(), cols = 0;
  for (auto p : parts) cols += t.value(p).cols();
  Matrix v(rows, cols);
  Eigen::Index off = 0;
  for (auto p : parts) {
    const auto& pv = t.value(p);
    v.middleCols(off, pv.cols()) = pv;
    off += pv.cols();
  }
  return t.record(std::move(v), [parts](Tape& t, std::uint32_t self) {
    const auto& g = t.grad(self);
    Eigen::Index off = 0;
    for (auto p : parts) {
      const auto w = t.value(p).cols();
      t.accumulate(p.id, g.middleCols(off, w));
      off += w;
    }
  });
}

inline Var slice_cols(Tape& t, Var a, Eigen::Index start, Eigen::Index count) {
  Matrix v = t.value(a).middleCols(start, count);
  return t.record(std::move(v), [a, start, count](Tape& t, std::uint32_t self) {
    const auto& av = t.value(a);
    Matrix ga = Matrix::Zero(av.rows(), av.cols());
    ga.middleCols(start, count) = t.grad(self);
    t.accumulate(a.id, ga);
  });
}

// Row i of the result is s[i] * a.row(i); s is 1 x rows(a).
inline Var scale_rows(Tape& t, Var a, Var s) {
  const auto& av = t.value(a);
  const auto& sv = t.value(s);
  Matrix v = av.array().colwise() * sv.row(0).transpose().array();
  return t.record(std::move(v), [a, s](Tape& t, std::uint32_t self) {
    const auto& g = t.grad(self);
    const auto& av = t.value(a);
    const auto& sv = t.value(s);
    t.accumulate(a.id, (g.array().colwise() * sv.row(0).transpose().array()).matrix());
    t.accumulate(s.id, g.cwiseProduct(av).rowwise().sum().transpose());
  });
}

// Sliding windows over rows: output row j concatenates input rows
// j - pad .. j - pad + k - 1 (zeros outside the input).
inline Var unfold_rows(Tape& t, Var x, int k, int pad) {
  const auto& xv = t.value(x);
  const auto len = static_cast<int>(xv.rows());
  const auto c = xv.cols();
  const int out_len = len + 2 * pad - k + 1;
  if (out_len <= 0) throw Error("unfold_rows: window longer than padded input");
  Matrix v = Matrix::Zero(out_len, c * k);
  for (int j = 0; j < out_len; ++j) {
    for (int w = 0; w < k; ++w) {
      const int src = j - pad + w;
      if (src >= 0 && src < len) v.block(j, w * c, 1, c) = xv.row(src);
    }
  }
  return t.record(std::move(v), [x, k, pad](Tape& t, std::uint32_t self) {
    const auto& g = t.grad(self);
    const auto& xv = t.value(x);
    const auto len = static_cast<int>(xv.rows());
    const auto c = xv.cols();
    Matrix gx = Matrix::Zero(xv.rows(), c);
    for (int j = 0; j < static_cast<int>(g.rows()); ++j) {
      for (int w = 0; w < k; ++w) {
        const int src = j - pad + w;
        if (src >= 0 && src < len) gx.row(src) += g.block(j, w * c, 1, c);
      }
    }
    t.accumulate(x.id, gx);
  });
}

// Max over row windows of size k with the given stride, per column. Ties
// resolve to the earliest row.
inline Var maxpool_rows(Tape& t, Var x, int k, int stride) {
  const auto& xv = t.value(x);
  const auto len = static_cast<int>(xv.rows());
  const int out_len = (len - k) / stride + 1;
  if (out_len <= 0) throw Error("maxpool_rows: window longer than input");
  Matrix v(out_len, xv.cols());
  std::vector<int> arg(static_cast<std::size_t>(out_len * xv.cols()));
  for (int j = 0; j < out_len; ++j) {
    for (Eigen::Index col = 0; col < xv.cols(); ++col) {
      int best = j * stride;
      for (int w = 1; w < k; ++w) {
        if (xv(j * stride + w, col) > xv(best, col)) best = j * stride + w;
      }
      v(j, col) = xv(best, col);
      arg[static_cast<std::size_t>(j * xv.cols() + col)] = best;
    }
  }
  return t.record(std::move(v), [x, arg = std::move(arg)](Tape& t, std::uint32_t self) {
    const auto& g = t.grad(self);
    const auto& xv = t.value(x);
    Matrix gx = Matrix::Zero(xv.rows(), xv.cols());
    for (Eigen::Index j = 0; j < g.rows(); ++j) {
      for (Eigen::Index col = 0; col < g.cols(); ++col) {
        gx(arg[static_cast<std::size_t>(j * g.cols() + col)], col) += g(j, col);
      }
    }
    t.accumulate(x.id, gx);
  });
}

// Row-major flatten into a single row.
inline Var flatten(Tape& t, Var x) {
  const auto& xv = t.value(x);
  Matrix v = Eigen::Map<const Matrix>(xv.data(), 1, xv.size());
  return t.record(std::move(v), [x](Tape& t, std::uint32_t self) {
    const auto& xv = t.value(x);
    const auto& g = t.grad(self);
    t.accumulate(x.id, Eigen::Map<const Matrix>(g.data(), xv.rows(), xv.cols()));
  });
}

inline Var sum(Tape& t, Var a) {
  Matrix v = Matrix::Constant(1, 1, t.value(a).sum());
  return t.record(std::move(v), [a](Tape& t, std::uint32_t self) {
    const auto& av = t.value(a);
    t.accumulate(a.id, Matrix::Constant(av.rows(), av.cols(), t.grad(self)(0, 0)));
  });
}

// Cross-entropy of softmax(logits) against a class index; logits are 1 x c.
inline Var softmax_cross_entropy(Tape& t, Var logits, int label) {
  const Matrix p = softmax_rows_value(t.value(logits));
  const double loss = -std::log(std::max(p(0, label), std::numeric_limits<double>::min()));
  return t.record(Matrix::Constant(1, 1, loss), [logits, label, p](Tape& t, std::uint32_t self) {
    Matrix g = p;
    g(0, label) -= 1.0;
    t.accumulate(logits.id, g * t.grad(self)(0, 0));
  });
}

}  // namespace keyness::nn
