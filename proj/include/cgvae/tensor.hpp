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

#include <Eigen/Dense>

#include <cstddef>
#include <random>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace cgvae {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename Scalar>
using RowVector = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

// All model quantities are dense row-major 64-bit matrices. Vectors are
// stored as 1 x n rows unless an op says otherwise.
using Tensor = Matrix<double>;

using ParamId = std::size_t;

struct Parameter {
  std::string name;
  Tensor value;
};

// Ordered, name-addressable collection of trainable tensors. Order is the
// insertion order and defines checkpoint and gradient layout.
class ParameterSet {
 public:
  ParamId add(std::string name, Tensor value);

  // Glorot-uniform initialised matrix of shape rows x cols.
  ParamId add_glorot(std::string name, Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng);
  ParamId add_uniform(std::string name, Eigen::Index rows, Eigen::Index cols, double limit,
                      std::mt19937_64& rng);
  ParamId add_zeros(std::string name, Eigen::Index rows, Eigen::Index cols);

  [[nodiscard]] std::size_t size() const { return params_.size(); }
  [[nodiscard]] bool contains(std::string_view name) const;
  [[nodiscard]] ParamId id(std::string_view name) const;

  [[nodiscard]] const Parameter& operator[](ParamId i) const { return params_[i]; }
  [[nodiscard]] Parameter& operator[](ParamId i) { return params_[i]; }
  [[nodiscard]] const Tensor& value(ParamId i) const { return params_[i].value; }
  [[nodiscard]] Tensor& value(ParamId i) { return params_[i].value; }

  [[nodiscard]] std::size_t scalar_count() const;

  auto begin() const { return params_.begin(); }
  auto end() const { return params_.end(); }

 private:
  std::vector<Parameter> params_;
  std::unordered_map<std::string, ParamId> index_;
};

// Per-parameter gradient accumulators, shaped like a ParameterSet.
class GradientBuffer {
 public:
  GradientBuffer() = default;
  explicit GradientBuffer(const ParameterSet& params);

  void zero();
  void add(const GradientBuffer& other);
  void scale(double factor);

  [[nodiscard]] std::size_t size() const { return grads_.size(); }
  [[nodiscard]] Tensor& operator[](ParamId i) { return grads_[i]; }
  [[nodiscard]] const Tensor& operator[](ParamId i) const { return grads_[i]; }
  [[nodiscard]] bool all_finite() const;
  [[nodiscard]] double max_abs() const;

 private:
  std::vector<Tensor> grads_;
};

}  // namespace cgvae
