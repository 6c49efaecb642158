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

#include "cgvae/tensor.hpp"

#include <cmath>

#include "cgvae/errors.hpp"

namespace cgvae {

ParamId ParameterSet::add(std::string name, Tensor value) {
  if (index_.contains(name)) throw UsageError("duplicate parameter name: " + name);
  ParamId id = params_.size();
  index_.emplace(name, id);
  params_.push_back({std::move(name), std::move(value)});
  return id;
}

ParamId ParameterSet::add_glorot(std::string name, Eigen::Index rows, Eigen::Index cols,
                                 std::mt19937_64& rng) {
  return add_uniform(std::move(name), rows, cols,
                     std::sqrt(6.0 / static_cast<double>(rows + cols)), rng);
}

ParamId ParameterSet::add_uniform(std::string name, Eigen::Index rows, Eigen::Index cols,
                                  double limit, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-limit, limit);
  Tensor value(rows, cols);
  for (Eigen::Index i = 0; i < value.size(); ++i) value.data()[i] = dist(rng);
  return add(std::move(name), std::move(value));
}

ParamId ParameterSet::add_zeros(std::string name, Eigen::Index rows, Eigen::Index cols) {
  return add(std::move(name), Tensor::Zero(rows, cols));
}

bool ParameterSet::contains(std::string_view name) const {
  return index_.contains(std::string(name));
}

ParamId ParameterSet::id(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) throw UsageError("unknown parameter: " + std::string(name));
  return it->second;
}

std::size_t ParameterSet::scalar_count() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += static_cast<std::size_t>(p.value.size());
  return n;
}

GradientBuffer::GradientBuffer(const ParameterSet& params) {
  grads_.reserve(params.size());
  for (const auto& p : params) grads_.push_back(Tensor::Zero(p.value.rows(), p.value.cols()));
}

void GradientBuffer::zero() {
  for (auto& g : grads_) g.setZero();
}

void GradientBuffer::add(const GradientBuffer& other) {
  if (other.grads_.size() != grads_.size()) throw DimensionError("gradient buffer size mismatch");
  for (std::size_t i = 0; i < grads_.size(); ++i) grads_[i] += other.grads_[i];
}

void GradientBuffer::scale(double factor) {
  for (auto& g : grads_) g *= factor;
}

bool GradientBuffer::all_finite() const {
  for (const auto& g : grads_) {
    if (!g.allFinite()) return false;
  }
  return true;
}

double GradientBuffer::max_abs() const {
  double m = 0.0;
  for (const auto& g : grads_) {
    if (g.size() > 0) m = std::max(m, g.cwiseAbs().maxCoeff());
  }
  return m;
}

}  // namespace cgvae
