/* Copyright 2026 The BaSNet Engine Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#ifndef BASNET_ERROR_H_
#define BASNET_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace basnet {

enum class ErrorKind {
  kInvalidArgument,
  kShape,
  kBadMagic,
  kVersion,
  kTruncated,
  kDimensionOverflow,
  kIo,
  kParse,
  kMismatch,
  kCheckFailed,
};

std::string_view ErrorKindName(ErrorKind kind);

// All library failures are reported through this exception type; `kind()`
// lets callers (and the CLI exit-code mapping) tell failure classes apart.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void Fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

inline void Require(bool condition, ErrorKind kind,
                    const std::string& message) {
  if (!condition) Fail(kind, message);
}

}  // namespace basnet

#endif  // BASNET_ERROR_H_
