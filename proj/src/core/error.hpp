/*
 * Copyright 2026 The MTMT Uplift Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef MTMT_CORE_ERROR_HPP_
#define MTMT_CORE_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace mtmt {

// Error categories surfaced across the library and mapped onto C API status
// codes and CLI exit codes.
enum class ErrorKind {
  kShape,
  kIndex,
  kContract,
  kData,
  kSchema,
  kSpec,
  kMetric,
  kIo,
  kConfig,
};

const char* error_kind_name(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

inline void check(bool condition, ErrorKind kind, const std::string& message) {
  if (!condition) fail(kind, message);
}

}  // namespace mtmt

#endif  // MTMT_CORE_ERROR_HPP_
