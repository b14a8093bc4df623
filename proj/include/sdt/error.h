// Copyright 2026 The sdtag Authors.
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

#ifndef SDT_ERROR_H_
#define SDT_ERROR_H_

#include <stdexcept>
#include <string>

namespace sdt {

// Error categories double as CLI exit codes.
enum class ErrorKind : int {
  kIo = 2,
  kValidation = 3,
  kInternal = 4,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

inline Error IoError(const std::string& message) {
  return Error(ErrorKind::kIo, message);
}

inline Error ValidationError(const std::string& message) {
  return Error(ErrorKind::kValidation, message);
}

inline Error InternalError(const std::string& message) {
  return Error(ErrorKind::kInternal, message);
}

}  // namespace sdt

#endif  // SDT_ERROR_H_
