// Copyright 2026 The fdmcar Authors
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

#ifndef FDMCAR_ERROR_HPP_
#define FDMCAR_ERROR_HPP_

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

namespace fdmcar {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input: I/O failures, CSV format/parse problems, bad dimensions,
// out-of-range arguments. Rows and columns are 1-based when present.
class InputError : public Error {
 public:
  explicit InputError(const std::string& what,
                      std::optional<std::size_t> row = std::nullopt,
                      std::optional<std::size_t> column = std::nullopt)
      : Error(what), row_(row), column_(column) {}

  std::optional<std::size_t> row() const noexcept { return row_; }
  std::optional<std::size_t> column() const noexcept { return column_; }

 private:
  std::optional<std::size_t> row_;
  std::optional<std::size_t> column_;
};

// The data cannot be tested as given: empty subdomain, a single group,
// degenerate columns, zero variance, degenerate spectra, too many degenerate
// bootstrap replicates. `kind` is a stable machine-readable code.
class ValidationError : public Error {
 public:
  ValidationError(std::string kind, const std::string& what)
      : Error(what), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace fdmcar

#endif  // FDMCAR_ERROR_HPP_
