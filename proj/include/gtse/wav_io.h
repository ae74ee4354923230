// gtse/wav_io.h

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

#ifndef GTSE_WAV_IO_H_
#define GTSE_WAV_IO_H_

#include <string>

#include "gtse/signal.h"

namespace gtse {

enum class WavFormat { kPcm16, kFloat32 };

/// Reads a mono RIFF/WAVE file holding 16-bit PCM or 32-bit IEEE float
/// samples. PCM is scaled to [-1, 1).
Waveform ReadWav(const std::string &path);

void WriteWav(const std::string &path, const Waveform &wave,
              WavFormat format = WavFormat::kFloat32);

}  // namespace gtse

#endif  // GTSE_WAV_IO_H_
