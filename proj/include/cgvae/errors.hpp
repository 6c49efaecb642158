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

#include <stdexcept>
#include <string>

namespace cgvae {

// Exception hierarchy. The CLI maps each family to an exit code:
// UsageError -> 1, DataError -> 2, NumericError -> 3.

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Tensor shape disagreement inside the autodiff engine.
class DimensionError : public NumericError {
 public:
  using NumericError::NumericError;
};

// A masked distribution with every entry forbidden.
class NoLegalChoiceError : public NumericError {
 public:
  using NumericError::NumericError;
};

class InvalidGraphError : public DataError {
 public:
  using DataError::DataError;
};

}  // namespace cgvae
