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

#include <nlohmann/json.hpp>

#include <string>

#include "cgvae/optim.hpp"
#include "cgvae/tensor.hpp"

namespace cgvae {

inline constexpr int kCheckpointFormatVersion = 1;

// {"name": {"shape": [r, c], "data": [row-major values]}, ...}
nlohmann::json tensors_to_json(const ParameterSet& params);
// Loads values into an already-shaped set; names and shapes must match.
void tensors_from_json(const nlohmann::json& j, ParameterSet& params);

nlohmann::json tensor_to_json(const Tensor& t);
Tensor tensor_from_json(const nlohmann::json& j);

nlohmann::json adam_to_json(const AdamState& state);
AdamState adam_from_json(const nlohmann::json& j, const ParameterSet& params);

nlohmann::json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const nlohmann::json& j);

}  // namespace cgvae
