// Copyright 2026 The hrt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef HRT_ERRORS_HPP
#define HRT_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hrt {

/// Caller violated a documented precondition. The CLI maps these to exit 1.
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Operand shapes do not agree.
class DimensionError : public ContractError {
 public:
  using ContractError::ContractError;
};

/// Input data is out of range (token ids, sequence length, malformed records).
class InputError : public ContractError {
 public:
  using ContractError::ContractError;
};

/// A masked reduction was asked to average over zero positions.
class EmptyMaskError : public ContractError {
 public:
  using ContractError::ContractError;
};

/// File system or network failure. The CLI maps these to exit 2.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Training produced a non-finite loss.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(std::size_t step, const std::string& what)
      : std::runtime_error(what), step_(step) {}
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

}  // namespace hrt

#endif  // HRT_ERRORS_HPP
