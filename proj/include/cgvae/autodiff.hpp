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

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "cgvae/tensor.hpp"

namespace cgvae::ad {

// Arguments of log() are clamped to this floor, and sigma floors derive
// from it as well.
inline constexpr double kLogFloor = 1e-10;

class Tape;

// Handle to a value recorded on a Tape. Cheap to copy; only valid while the
// owning tape is alive.
class Var {
 public:
  Var() = default;
  Var(Tape* tape, int id) : tape_(tape), id_(id) {}

  [[nodiscard]] const Tensor& value() const;
  [[nodiscard]] Eigen::Index rows() const { return value().rows(); }
  [[nodiscard]] Eigen::Index cols() const { return value().cols(); }
  [[nodiscard]] double scalar() const;
  [[nodiscard]] bool requires_grad() const;

  [[nodiscard]] Tape* tape() const { return tape_; }
  [[nodiscard]] int id() const { return id_; }
  [[nodiscard]] bool valid() const { return tape_ != nullptr; }

 private:
  Tape* tape_ = nullptr;
  int id_ = -1;
};

// Reverse-mode tape. Nodes are appended in evaluation order, so the node
// vector is already a topological order and backward() is a single reverse
// sweep. A tape is single-writer.
class Tape {
 public:
  using Backprop = std::function<void(Tape&, const Tensor&)>;

  // With record=false parameters enter as constants and no backward
  // closures are stored (inference mode).
  explicit Tape(bool record = true) : record_(record) {}

  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(Tensor value);
  Var constant_scalar(double value);

  // The tensor is referenced, not copied; it must outlive the tape and stay
  // unchanged until backward() has run.
  Var param(const ParameterSet& params, ParamId id);

  // Gradient-carrying leaf that is not a ParameterSet entry (e.g. latent
  // vectors being optimised). Gradients are read back with grad().
  Var variable(Tensor value);

  // Records an op output. `parents` decides requires_grad; the closure is
  // dropped when no parent needs a gradient.
  Var record(Tensor value, std::initializer_list<Var> parents, Backprop backprop);
  Var record(Tensor value, std::span<const Var> parents, Backprop backprop);

  // Reverse sweep from a 1x1 loss. Parameter gradients are added into
  // `into`, which must be shaped like the ParameterSet used for param().
  void backward(Var loss, GradientBuffer& into);
  // Reverse sweep without a parameter buffer (variables only).
  void backward(Var loss);

  [[nodiscard]] const Tensor& value(int id) const;
  // Gradient of a node after backward(); zero-sized if it was unreached.
  [[nodiscard]] const Tensor& grad(int id) const { return nodes_[id].grad; }
  void accumulate(int id, const Tensor& g);
  template <typename Derived>
  void accumulate(int id, const Eigen::MatrixBase<Derived>& g);

  [[nodiscard]] bool requires_grad(int id) const { return nodes_[id].requires_grad; }
  [[nodiscard]] bool recording() const { return record_; }
  [[nodiscard]] std::size_t size() const { return nodes_.size(); }

  // Fingerprint of every data-dependent branch taken (ReLU signs, clamps).
  // Two evaluations with equal fingerprints took the same smooth piece.
  [[nodiscard]] std::uint64_t branch_fingerprint() const { return fingerprint_; }
  void mix_fingerprint(std::uint64_t bits);

 private:
  struct Node {
    Tensor value;
    const Tensor* external = nullptr;
    Tensor grad;
    Backprop backprop;
    long param = -1;
    bool requires_grad = false;
  };

  void sweep(Var loss);

  std::vector<Node> nodes_;
  std::vector<std::pair<ParamId, int>> param_nodes_;
  bool record_;
  bool swept_ = false;
  std::uint64_t fingerprint_ = 0x9e3779b97f4a7c15ULL;
};

template <typename Derived>
void Tape::accumulate(int id, const Eigen::MatrixBase<Derived>& g) {
  Node& n = nodes_[id];
  if (!n.requires_grad) return;
  if (n.grad.size() == 0) {
    n.grad = g;
  } else {
    n.grad += g;
  }
}

// ---- element-wise and linear algebra ---------------------------------------

Var matmul(Var a, Var b);
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var hadamard(Var a, Var b);
// alpha * a + beta, element-wise.
Var affine(Var a, double alpha, double beta = 0.0);
// Adds a 1 x c row to every row of an r x c matrix.
Var add_rowvec(Var a, Var row);
Var sum_all(std::span<const Var> terms);

Var sigmoid(Var a);
Var tanh(Var a);
Var relu(Var a);
Var exp(Var a);
// log(max(a, kLogFloor)).
Var log(Var a);
Var log_sigmoid(Var a);
Var square(Var a);

// ---- reductions and reshaping ----------------------------------------------

// Sum of all entries, as 1x1.
Var sum(Var a);
// Column means over rows, as 1 x c.
Var mean_rows(Var a);
Var gather_rows(Var a, std::span<const int> rows);
Var concat_cols(std::span<const Var> parts);
Var concat_rows(std::span<const Var> parts);
Var slice_cols(Var a, Eigen::Index start, Eigen::Index count);
Var element(Var a, Eigen::Index row, Eigen::Index col);

// ---- masked distributions --------------------------------------------------

// Softmax over all entries of a vector-shaped tensor restricted to entries
// with mask != 0. Masked entries are exactly 0 and receive no gradient.
// Throws NoLegalChoiceError when the mask is all zero.
Var masked_softmax(Var logits, std::span<const std::uint8_t> mask);
// Log of masked_softmax; masked entries hold -infinity.
Var masked_log_softmax(Var logits, std::span<const std::uint8_t> mask);

// Plain-tensor version shared by the op and by inference-only callers.
// Row-wise log-softmax of a matrix, no masking.
Var log_softmax_rows(Var logits);

Tensor masked_softmax_values(const Tensor& logits, std::span<const std::uint8_t> mask);

}  // namespace cgvae::ad
