/*
 * Copyright 2026 The memorability authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <stdexcept>
#include <string>

namespace memorability {

/// Malformed or inconsistent input data (bad CSV, out-of-range scores,
/// violated protocol constraints). The CLI maps this to exit code 2.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid arguments to a numeric routine (dimension mismatch, degenerate
/// input). Also reported as a data error by the CLI.
class InvalidArgument : public DataError {
 public:
  using DataError::DataError;
};

inline std::string at_line(const std::string& path, std::size_t line) {
  return path + ":" + std::to_string(line);
}

}  // namespace memorability
