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

#include "cgvae/checkpoint.hpp"

#include <fstream>

#include "cgvae/errors.hpp"

namespace cgvae {

using nlohmann::json;

json tensor_to_json(const Tensor& t) {
  json j;
  j["shape"] = {t.rows(), t.cols()};
  j["data"] = std::vector<double>(t.data(), t.data() + t.size());
  return j;
}

Tensor tensor_from_json(const json& j) {
  const auto shape = j.at("shape").get<std::vector<Eigen::Index>>();
  const auto data = j.at("data").get<std::vector<double>>();
  if (shape.size() != 2 || shape[0] * shape[1] != static_cast<Eigen::Index>(data.size())) {
    throw DataError("checkpoint: tensor shape does not match data length");
  }
  Tensor t(shape[0], shape[1]);
  std::copy(data.begin(), data.end(), t.data());
  return t;
}

json tensors_to_json(const ParameterSet& params) {
  json j = json::object();
  for (const auto& p : params) j[p.name] = tensor_to_json(p.value);
  return j;
}

void tensors_from_json(const json& j, ParameterSet& params) {
  for (ParamId i = 0; i < params.size(); ++i) {
    const std::string& name = params[i].name;
    if (!j.contains(name)) throw DataError("checkpoint: missing parameter " + name);
    Tensor t = tensor_from_json(j.at(name));
    if (t.rows() != params.value(i).rows() || t.cols() != params.value(i).cols()) {
      throw DataError("checkpoint: shape mismatch for parameter " + name);
    }
    params.value(i) = std::move(t);
  }
  if (j.size() != params.size()) throw DataError("checkpoint: unexpected extra parameters");
}

json adam_to_json(const AdamState& state) {
  json j;
  j["lr"] = state.config.lr;
  j["beta1"] = state.config.beta1;
  j["beta2"] = state.config.beta2;
  j["eps"] = state.config.eps;
  j["t"] = state.t;
  j["m"] = json::array();
  j["v"] = json::array();
  for (const auto& m : state.m) j["m"].push_back(tensor_to_json(m));
  for (const auto& v : state.v) j["v"].push_back(tensor_to_json(v));
  return j;
}

AdamState adam_from_json(const json& j, const ParameterSet& params) {
  AdamConfig cfg;
  cfg.lr = j.at("lr").get<double>();
  cfg.beta1 = j.at("beta1").get<double>();
  cfg.beta2 = j.at("beta2").get<double>();
  cfg.eps = j.at("eps").get<double>();
  AdamState state(params, cfg);
  state.t = j.at("t").get<std::int64_t>();
  if (j.at("m").size() != params.size() || j.at("v").size() != params.size()) {
    throw DataError("checkpoint: optimizer state does not match parameters");
  }
  for (ParamId i = 0; i < params.size(); ++i) {
    state.m[i] = tensor_from_json(j.at("m")[i]);
    state.v[i] = tensor_from_json(j.at("v")[i]);
  }
  return state;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw DataError(path + ": " + e.what());
  }
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  out << j.dump();
  if (!out) throw DataError("write failed: " + path);
}

}  // namespace cgvae
