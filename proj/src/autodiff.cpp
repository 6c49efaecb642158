// Copyright 2026 The CGVAE Authors.
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

#include "cgvae/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "cgvae/errors.hpp"

namespace cgvae::ad {

namespace {

std::string shape_str(const Tensor& t) {
  return std::to_string(t.rows()) + "x" + std::to_string(t.cols());
}

void require_same_shape(Var a, Var b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError(std::string(op) + ": shape mismatch " + shape_str(a.value()) + " vs " +
                         shape_str(b.value()));
  }
}

void require_vector(Var a, const char* op) {
  if (a.rows() != 1 && a.cols() != 1) {
    throw DimensionError(std::string(op) + ": expected a vector, got " + shape_str(a.value()));
  }
}

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

// ---- Var / Tape -------------------------------------------------------------

const Tensor& Var::value() const { return tape_->value(id_); }

double Var::scalar() const {
  const Tensor& v = value();
  if (v.size() != 1) throw DimensionError("scalar(): tensor is " + shape_str(v));
  return v(0, 0);
}

bool Var::requires_grad() const { return tape_->requires_grad(id_); }

const Tensor& Tape::value(int id) const {
  const Node& n = nodes_[id];
  return n.external ? *n.external : n.value;
}

Var Tape::constant(Tensor value) {
  Node n;
  n.value = std::move(value);
  nodes_.push_back(std::move(n));
  return {this, static_cast<int>(nodes_.size()) - 1};
}

Var Tape::constant_scalar(double value) { return constant(Tensor::Constant(1, 1, value)); }

Var Tape::param(const ParameterSet& params, ParamId id) {
  for (const auto& [pid, node] : param_nodes_) {
    if (pid == id) return {this, node};
  }
  Node n;
  n.external = &params.value(id);
  n.requires_grad = record_;
  n.param = static_cast<long>(id);
  nodes_.push_back(std::move(n));
  const int node = static_cast<int>(nodes_.size()) - 1;
  param_nodes_.emplace_back(id, node);
  return {this, node};
}

Var Tape::variable(Tensor value) {
  Node n;
  n.value = std::move(value);
  n.requires_grad = record_;
  nodes_.push_back(std::move(n));
  return {this, static_cast<int>(nodes_.size()) - 1};
}

Var Tape::record(Tensor value, std::initializer_list<Var> parents, Backprop backprop) {
  return record(std::move(value), std::span<const Var>(parents.begin(), parents.size()),
                std::move(backprop));
}

Var Tape::record(Tensor value, std::span<const Var> parents, Backprop backprop) {
  Node n;
  n.value = std::move(value);
  if (record_) {
    for (const Var& p : parents) {
      if (nodes_[p.id()].requires_grad) {
        n.requires_grad = true;
        break;
      }
    }
  }
  if (n.requires_grad) n.backprop = std::move(backprop);
  nodes_.push_back(std::move(n));
  return {this, static_cast<int>(nodes_.size()) - 1};
}

void Tape::accumulate(int id, const Tensor& g) {
  Node& n = nodes_[id];
  if (!n.requires_grad) return;
  if (n.grad.size() == 0) {
    n.grad = g;
  } else {
    n.grad += g;
  }
}

void Tape::mix_fingerprint(std::uint64_t bits) { fingerprint_ = splitmix(fingerprint_ ^ bits); }

void Tape::sweep(Var loss) {
  if (loss.tape() != this) throw UsageError("backward(): loss belongs to another tape");
  if (loss.value().size() != 1) {
    throw DimensionError("backward(): loss must be scalar, got " + shape_str(loss.value()));
  }
  if (swept_) throw UsageError("backward(): tape already swept");
  swept_ = true;
  if (!nodes_[loss.id()].requires_grad) return;
  nodes_[loss.id()].grad = Tensor::Ones(1, 1);
  for (int i = loss.id(); i >= 0; --i) {
    Node& n = nodes_[i];
    if (n.backprop && n.grad.size() != 0) n.backprop(*this, n.grad);
  }
}

void Tape::backward(Var loss, GradientBuffer& into) {
  sweep(loss);
  for (const auto& [pid, node] : param_nodes_) {
    const Tensor& g = nodes_[node].grad;
    if (g.size() == 0) continue;
    if (pid >= into.size()) throw DimensionError("backward(): gradient buffer too small");
    into[pid] += g;
  }
}

void Tape::backward(Var loss) { sweep(loss); }

// ---- ops ----------------------------------------------------------------------

Var matmul(Var a, Var b) {
  if (a.cols() != b.rows()) {
    throw DimensionError("matmul: " + shape_str(a.value()) + " * " + shape_str(b.value()));
  }
  Tape& t = *a.tape();
  Tensor out = a.value() * b.value();
  const int ia = a.id(), ib = b.id();
  return t.record(std::move(out), {a, b}, [ia, ib](Tape& tp, const Tensor& g) {
    if (tp.requires_grad(ia)) tp.accumulate(ia, g * tp.value(ib).transpose());
    if (tp.requires_grad(ib)) tp.accumulate(ib, tp.value(ia).transpose() * g);
  });
}

Var add(Var a, Var b) {
  require_same_shape(a, b, "add");
  Tensor out = a.value() + b.value();
  const int ia = a.id(), ib = b.id();
  return a.tape()->record(std::move(out), {a, b}, [ia, ib](Tape& tp, const Tensor& g) {
    tp.accumulate(ia, g);
    tp.accumulate(ib, g);
  });
}

Var sub(Var a, Var b) {
  require_same_shape(a, b, "sub");
  Tensor out = a.value() - b.value();
  const int ia = a.id(), ib = b.id();
  return a.tape()->record(std::move(out), {a, b}, [ia, ib](Tape& tp, const Tensor& g) {
    tp.accumulate(ia, g);
    if (tp.requires_grad(ib)) tp.accumulate(ib, -g);
  });
}

Var hadamard(Var a, Var b) {
  require_same_shape(a, b, "hadamard");
  Tensor out = a.value().cwiseProduct(b.value());
  const int ia = a.id(), ib = b.id();
  return a.tape()->record(std::move(out), {a, b}, [ia, ib](Tape& tp, const Tensor& g) {
    if (tp.requires_grad(ia)) tp.accumulate(ia, g.cwiseProduct(tp.value(ib)));
    if (tp.requires_grad(ib)) tp.accumulate(ib, g.cwiseProduct(tp.value(ia)));
  });
}

Var affine(Var a, double alpha, double beta) {
  Tensor out = (alpha * a.value().array() + beta).matrix();
  const int ia = a.id();
  return a.tape()->record(std::move(out), {a},
                          [ia, alpha](Tape& tp, const Tensor& g) { tp.accumulate(ia, alpha * g); });
}

Var add_rowvec(Var a, Var row) {
  if (row.rows() != 1 || row.cols() != a.cols()) {
    throw DimensionError("add_rowvec: " + shape_str(a.value()) + " + row " + shape_str(row.value()));
  }
  Tensor out = a.value().rowwise() + row.value().row(0);
  const int ia = a.id(), ir = row.id();
  return a.tape()->record(std::move(out), {a, row}, [ia, ir](Tape& tp, const Tensor& g) {
    tp.accumulate(ia, g);
    if (tp.requires_grad(ir)) tp.accumulate(ir, g.colwise().sum());
  });
}

Var sum_all(std::span<const Var> terms) {
  if (terms.empty()) throw DimensionError("sum_all: no terms");
  Tape& t = *terms.front().tape();
  Tensor out = terms.front().value();
  for (std::size_t i = 1; i < terms.size(); ++i) {
    require_same_shape(terms.front(), terms[i], "sum_all");
    out += terms[i].value();
  }
  std::vector<int> ids;
  ids.reserve(terms.size());
  for (const Var& v : terms) ids.push_back(v.id());
  return t.record(std::move(out), terms, [ids = std::move(ids)](Tape& tp, const Tensor& g) {
    for (int id : ids) tp.accumulate(id, g);
  });
}

Var sigmoid(Var a) {
  Tensor out = (1.0 / (1.0 + (-a.value().array()).exp())).matrix();
  Tape& t = *a.tape();
  const int ia = a.id();
  const int self = static_cast<int>(t.size());
  return t.record(std::move(out), {a}, [ia, self](Tape& tp, const Tensor& g) {
    const auto y = tp.value(self).array();
    tp.accumulate(ia, (g.array() * y * (1.0 - y)).matrix());
  });
}

Var tanh(Var a) {
  Tensor out = a.value().array().tanh().matrix();
  Tape& t = *a.tape();
  const int ia = a.id();
  const int self = static_cast<int>(t.size());
  return t.record(std::move(out), {a}, [ia, self](Tape& tp, const Tensor& g) {
    const auto y = tp.value(self).array();
    tp.accumulate(ia, (g.array() * (1.0 - y * y)).matrix());
  });
}

Var relu(Var a) {
  Tape& t = *a.tape();
  const Tensor& x = a.value();
  Tensor out = x.cwiseMax(0.0);
  std::uint64_t bits = 0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x.data()[i] > 0.0) bits = bits * 31 + static_cast<std::uint64_t>(i + 1);
  }
  t.mix_fingerprint(bits);
  const int ia = a.id();
  return t.record(std::move(out), {a}, [ia](Tape& tp, const Tensor& g) {
    const Tensor& xv = tp.value(ia);
    tp.accumulate(ia, (xv.array() > 0.0).select(g.array(), 0.0).matrix());
  });
}

Var exp(Var a) {
  Tensor out = a.value().array().exp().matrix();
  Tape& t = *a.tape();
  const int ia = a.id();
  const int self = static_cast<int>(t.size());
  return t.record(std::move(out), {a}, [ia, self](Tape& tp, const Tensor& g) {
    tp.accumulate(ia, g.cwiseProduct(tp.value(self)));
  });
}

Var log(Var a) {
  Tape& t = *a.tape();
  const Tensor& x = a.value();
  std::uint64_t clamped = 0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x.data()[i] < kLogFloor) clamped = clamped * 31 + static_cast<std::uint64_t>(i + 1);
  }
  t.mix_fingerprint(clamped);
  Tensor out = x.cwiseMax(kLogFloor).array().log().matrix();
  const int ia = a.id();
  return t.record(std::move(out), {a}, [ia](Tape& tp, const Tensor& g) {
    const Tensor& xv = tp.value(ia);
    tp.accumulate(ia, (xv.array() >= kLogFloor).select(g.array() / xv.array(), 0.0).matrix());
  });
}

Var log_sigmoid(Var a) {
  // log sigma(x) = min(x, 0) - log(1 + exp(-|x|))
  const auto x = a.value().array();
  Tensor out = (x.min(0.0) - (-x.abs()).exp().log1p()).matrix();
  const int ia = a.id();
  return a.tape()->record(std::move(out), {a}, [ia](Tape& tp, const Tensor& g) {
    const auto xv = tp.value(ia).array();
    tp.accumulate(ia, (g.array() / (1.0 + xv.exp())).matrix());
  });
}

Var square(Var a) {
  Tensor out = a.value().array().square().matrix();
  const int ia = a.id();
  return a.tape()->record(std::move(out), {a}, [ia](Tape& tp, const Tensor& g) {
    tp.accumulate(ia, 2.0 * g.cwiseProduct(tp.value(ia)));
  });
}

Var sum(Var a) {
  Tensor out = Tensor::Constant(1, 1, a.value().sum());
  const int ia = a.id();
  const Eigen::Index r = a.rows(), c = a.cols();
  return a.tape()->record(std::move(out), {a}, [ia, r, c](Tape& tp, const Tensor& g) {
    tp.accumulate(ia, Tensor::Constant(r, c, g(0, 0)));
  });
}

Var mean_rows(Var a) {
  if (a.rows() == 0) throw DimensionError("mean_rows: empty tensor");
  const Eigen::Index r = a.rows();
  Tensor out = a.value().colwise().mean();
  const int ia = a.id();
  return a.tape()->record(std::move(out), {a}, [ia, r](Tape& tp, const Tensor& g) {
    Tensor spread = g.replicate(r, 1) / static_cast<double>(r);
    tp.accumulate(ia, spread);
  });
}

Var gather_rows(Var a, std::span<const int> rows) {
  Tensor out(static_cast<Eigen::Index>(rows.size()), a.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] < 0 || rows[i] >= a.rows()) throw DimensionError("gather_rows: index out of range");
    out.row(static_cast<Eigen::Index>(i)) = a.value().row(rows[i]);
  }
  const int ia = a.id();
  const Eigen::Index r = a.rows(), c = a.cols();
  std::vector<int> idx(rows.begin(), rows.end());
  return a.tape()->record(std::move(out), {a},
                          [ia, r, c, idx = std::move(idx)](Tape& tp, const Tensor& g) {
                            Tensor full = Tensor::Zero(r, c);
                            for (std::size_t i = 0; i < idx.size(); ++i) {
                              full.row(idx[i]) += g.row(static_cast<Eigen::Index>(i));
                            }
                            tp.accumulate(ia, full);
                          });
}

Var concat_cols(std::span<const Var> parts) {
  if (parts.empty()) throw DimensionError("concat_cols: no parts");
  const Eigen::Index r = parts.front().rows();
  Eigen::Index c = 0;
  for (const Var& p : parts) {
    if (p.rows() != r) throw DimensionError("concat_cols: row mismatch");
    c += p.cols();
  }
  Tensor out(r, c);
  std::vector<std::pair<int, Eigen::Index>> layout;
  Eigen::Index at = 0;
  for (const Var& p : parts) {
    out.middleCols(at, p.cols()) = p.value();
    layout.emplace_back(p.id(), at);
    at += p.cols();
  }
  return parts.front().tape()->record(
      std::move(out), parts, [layout = std::move(layout)](Tape& tp, const Tensor& g) {
        for (const auto& [id, offset] : layout) {
          if (tp.requires_grad(id)) tp.accumulate(id, g.middleCols(offset, tp.value(id).cols()));
        }
      });
}

Var concat_rows(std::span<const Var> parts) {
  if (parts.empty()) throw DimensionError("concat_rows: no parts");
  const Eigen::Index c = parts.front().cols();
  Eigen::Index r = 0;
  for (const Var& p : parts) {
    if (p.cols() != c) throw DimensionError("concat_rows: column mismatch");
    r += p.rows();
  }
  Tensor out(r, c);
  std::vector<std::pair<int, Eigen::Index>> layout;
  Eigen::Index at = 0;
  for (const Var& p : parts) {
    out.middleRows(at, p.rows()) = p.value();
    layout.emplace_back(p.id(), at);
    at += p.rows();
  }
  return parts.front().tape()->record(
      std::move(out), parts, [layout = std::move(layout)](Tape& tp, const Tensor& g) {
        for (const auto& [id, offset] : layout) {
          if (tp.requires_grad(id)) tp.accumulate(id, g.middleRows(offset, tp.value(id).rows()));
        }
      });
}

Var slice_cols(Var a, Eigen::Index start, Eigen::Index count) {
  if (start < 0 || count < 0 || start + count > a.cols()) {
    throw DimensionError("slice_cols: range out of bounds for " + shape_str(a.value()));
  }
  Tensor out = a.value().middleCols(start, count);
  const int ia = a.id();
  const Eigen::Index r = a.rows(), c = a.cols();
  return a.tape()->record(std::move(out), {a}, [ia, r, c, start, count](Tape& tp, const Tensor& g) {
    Tensor full = Tensor::Zero(r, c);
    full.middleCols(start, count) = g;
    tp.accumulate(ia, full);
  });
}

Var element(Var a, Eigen::Index row, Eigen::Index col) {
  if (row < 0 || row >= a.rows() || col < 0 || col >= a.cols()) {
    throw DimensionError("element: index out of range");
  }
  Tensor out = Tensor::Constant(1, 1, a.value()(row, col));
  const int ia = a.id();
  const Eigen::Index r = a.rows(), c = a.cols();
  return a.tape()->record(std::move(out), {a}, [ia, r, c, row, col](Tape& tp, const Tensor& g) {
    Tensor full = Tensor::Zero(r, c);
    full(row, col) = g(0, 0);
    tp.accumulate(ia, full);
  });
}

Tensor masked_softmax_values(const Tensor& logits, std::span<const std::uint8_t> mask) {
  if (static_cast<std::size_t>(logits.size()) != mask.size()) {
    throw DimensionError("masked_softmax: mask length differs from logits");
  }
  double top = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < logits.size(); ++i) {
    if (mask[i]) top = std::max(top, logits.data()[i]);
  }
  if (top == -std::numeric_limits<double>::infinity()) {
    throw NoLegalChoiceError("masked_softmax: no legal choice (all entries masked)");
  }
  Tensor p = Tensor::Zero(logits.rows(), logits.cols());
  double z = 0.0;
  for (Eigen::Index i = 0; i < logits.size(); ++i) {
    if (mask[i]) {
      p.data()[i] = std::exp(logits.data()[i] - top);
      z += p.data()[i];
    }
  }
  p /= z;
  return p;
}

Var masked_softmax(Var logits, std::span<const std::uint8_t> mask) {
  require_vector(logits, "masked_softmax");
  Tensor p = masked_softmax_values(logits.value(), mask);
  Tape& t = *logits.tape();
  const int il = logits.id();
  const int self = static_cast<int>(t.size());
  return t.record(std::move(p), {logits}, [il, self](Tape& tp, const Tensor& g) {
    const Tensor& pv = tp.value(self);
    const double dot = (g.array() * pv.array()).sum();
    tp.accumulate(il, (pv.array() * (g.array() - dot)).matrix());
  });
}

Var masked_log_softmax(Var logits, std::span<const std::uint8_t> mask) {
  require_vector(logits, "masked_log_softmax");
  Tensor p = masked_softmax_values(logits.value(), mask);
  const Tensor& x = logits.value();
  double top = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (mask[i]) top = std::max(top, x.data()[i]);
  }
  double z = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (mask[i]) z += std::exp(x.data()[i] - top);
  }
  const double lse = top + std::log(z);
  Tensor out(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    out.data()[i] = mask[i] ? x.data()[i] - lse : -std::numeric_limits<double>::infinity();
  }
  std::vector<std::uint8_t> m(mask.begin(), mask.end());
  const int il = logits.id();
  return logits.tape()->record(
      std::move(out), {logits},
      [il, p = std::move(p), m = std::move(m)](Tape& tp, const Tensor& g) {
        double total = 0.0;
        for (Eigen::Index i = 0; i < g.size(); ++i) {
          if (m[i]) total += g.data()[i];
        }
        Tensor d = Tensor::Zero(g.rows(), g.cols());
        for (Eigen::Index i = 0; i < g.size(); ++i) {
          if (m[i]) d.data()[i] = g.data()[i] - p.data()[i] * total;
        }
        tp.accumulate(il, d);
      });
}

Var log_softmax_rows(Var logits) {
  const Tensor& x = logits.value();
  Tensor out(x.rows(), x.cols());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    const double top = x.row(r).maxCoeff();
    const double lse = top + std::log((x.row(r).array() - top).exp().sum());
    out.row(r) = x.row(r).array() - lse;
  }
  const int il = logits.id();
  const int self = static_cast<int>(logits.tape()->size());
  return logits.tape()->record(std::move(out), {logits}, [il, self](Tape& tp, const Tensor& g) {
    const Tensor p = tp.value(self).array().exp().matrix();
    Tensor d = g - (p.array().colwise() * g.rowwise().sum().array()).matrix();
    tp.accumulate(il, d);
  });
}

}  // namespace cgvae::ad
