// src/error.cc

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

#include "gtse/error.h"

namespace gtse {

const char *ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "invalid-argument";
    case ErrorKind::kDegenerateSignal: return "degenerate-signal";
    case ErrorKind::kUnsupportedSize: return "unsupported-size";
    case ErrorKind::kIo: return "io-error";
    case ErrorKind::kDataIntegrity: return "data-integrity";
    case ErrorKind::kCheckpoint: return "checkpoint-error";
    case ErrorKind::kDiverged: return "training-diverged";
  }
  return "unknown";
}

int ExitCodeFor(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument:
    case ErrorKind::kUnsupportedSize:
    case ErrorKind::kDegenerateSignal:
      return 2;
    case ErrorKind::kIo:
    case ErrorKind::kDataIntegrity:
      return 3;
    case ErrorKind::kCheckpoint:
      return 4;
    case ErrorKind::kDiverged:
      return 5;
  }
  return 1;
}

}  // namespace gtse
