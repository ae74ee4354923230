// gtse/error.h

// Copyright 2026  The gtse authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef GTSE_ERROR_H_
#define GTSE_ERROR_H_

#include <sstream>
#include <stdexcept>
#include <string>

namespace gtse {

enum class ErrorKind {
  kInvalidArgument,
  kDegenerateSignal,
  kUnsupportedSize,
  kIo,
  kDataIntegrity,
  kCheckpoint,
  kDiverged,
};

const char *ErrorKindName(ErrorKind kind);

/// All library failures are reported through this exception; the kind
/// decides the CLI exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string &what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

/// Process exit code for an error kind: 2 invalid arguments, 3 data
/// integrity / I/O, 4 checkpoint, 5 divergence.
int ExitCodeFor(ErrorKind kind);

namespace internal {
inline void Append(std::ostringstream &) {}
template <typename T, typename... Rest>
void Append(std::ostringstream &os, const T &v, const Rest &...rest) {
  os << v;
  Append(os, rest...);
}
}  // namespace internal

template <typename... Args>
[[noreturn]] void Fail(ErrorKind kind, const Args &...args) {
  std::ostringstream os;
  internal::Append(os, args...);
  throw Error(kind, os.str());
}

#define GTSE_REQUIRE(cond, ...)                                  \
  do {                                                           \
    if (!(cond)) ::gtse::Fail(::gtse::ErrorKind::kInvalidArgument, \
                              __VA_ARGS__);                      \
  } while (0)

}  // namespace gtse

#endif  // GTSE_ERROR_H_
