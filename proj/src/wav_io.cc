// src/wav_io.cc

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

#include "gtse/wav_io.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include "gtse/error.h"

namespace gtse {

namespace {

uint32_t ReadU32(const unsigned char *p) {
  return uint32_t(p[0]) | (uint32_t(p[1]) << 8) | (uint32_t(p[2]) << 16) |
         (uint32_t(p[3]) << 24);
}
uint16_t ReadU16(const unsigned char *p) {
  return uint16_t(p[0] | (p[1] << 8));
}

void PutU32(std::vector<unsigned char> *out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out->push_back((v >> (8 * i)) & 0xff);
}
void PutU16(std::vector<unsigned char> *out, uint16_t v) {
  out->push_back(v & 0xff);
  out->push_back((v >> 8) & 0xff);
}

}  // namespace

Waveform ReadWav(const std::string &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) Fail(ErrorKind::kIo, "cannot open WAV file ", path);
  std::vector<unsigned char> buf((std::istreambuf_iterator<char>(is)),
                                 std::istreambuf_iterator<char>());
  if (buf.size() < 12 || std::memcmp(buf.data(), "RIFF", 4) != 0 ||
      std::memcmp(buf.data() + 8, "WAVE", 4) != 0)
    Fail(ErrorKind::kIo, "not a RIFF/WAVE file: ", path);

  uint16_t format = 0, channels = 0, bits = 0;
  uint32_t rate = 0;
  const unsigned char *data = nullptr;
  size_t data_bytes = 0;
  size_t pos = 12;
  while (pos + 8 <= buf.size()) {
    const unsigned char *chunk = buf.data() + pos;
    uint32_t size = ReadU32(chunk + 4);
    size_t body = pos + 8;
    if (body + size > buf.size()) size = static_cast<uint32_t>(buf.size() - body);
    if (std::memcmp(chunk, "fmt ", 4) == 0 && size >= 16) {
      format = ReadU16(buf.data() + body);
      channels = ReadU16(buf.data() + body + 2);
      rate = ReadU32(buf.data() + body + 4);
      bits = ReadU16(buf.data() + body + 14);
      if (format == 0xFFFE && size >= 26)  // WAVE_FORMAT_EXTENSIBLE
        format = ReadU16(buf.data() + body + 24);
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = buf.data() + body;
      data_bytes = size;
    }
    pos = body + size + (size & 1);
  }
  if (format == 0 || data == nullptr)
    Fail(ErrorKind::kIo, "WAV file lacks fmt or data chunk: ", path);
  if (channels != 1)
    Fail(ErrorKind::kDataIntegrity, "expected mono audio, got ", channels,
         " channels in ", path);

  std::vector<double> samples;
  if (format == 1 && bits == 16) {
    samples.resize(data_bytes / 2);
    for (size_t i = 0; i < samples.size(); ++i) {
      int16_t v = static_cast<int16_t>(ReadU16(data + 2 * i));
      samples[i] = v / 32768.0;
    }
  } else if (format == 3 && bits == 32) {
    samples.resize(data_bytes / 4);
    for (size_t i = 0; i < samples.size(); ++i) {
      uint32_t bitsv = ReadU32(data + 4 * i);
      float f;
      std::memcpy(&f, &bitsv, 4);
      samples[i] = f;
    }
  } else {
    Fail(ErrorKind::kDataIntegrity, "unsupported WAV encoding (format ",
         format, ", ", bits, " bits) in ", path);
  }
  if (samples.empty()) Fail(ErrorKind::kDataIntegrity, "empty WAV file ", path);
  return Waveform(std::move(samples), static_cast<int>(rate));
}

void WriteWav(const std::string &path, const Waveform &wave,
              WavFormat format) {
  const uint16_t bits = format == WavFormat::kPcm16 ? 16 : 32;
  const uint16_t tag = format == WavFormat::kPcm16 ? 1 : 3;
  const uint32_t data_bytes = static_cast<uint32_t>(wave.size() * bits / 8);
  std::vector<unsigned char> out;
  out.reserve(44 + data_bytes);
  out.insert(out.end(), {'R', 'I', 'F', 'F'});
  PutU32(&out, 36 + data_bytes);
  out.insert(out.end(), {'W', 'A', 'V', 'E', 'f', 'm', 't', ' '});
  PutU32(&out, 16);
  PutU16(&out, tag);
  PutU16(&out, 1);
  PutU32(&out, static_cast<uint32_t>(wave.sample_rate()));
  PutU32(&out, static_cast<uint32_t>(wave.sample_rate()) * bits / 8);
  PutU16(&out, bits / 8);
  PutU16(&out, bits);
  out.insert(out.end(), {'d', 'a', 't', 'a'});
  PutU32(&out, data_bytes);
  for (double v : wave.samples()) {
    if (format == WavFormat::kPcm16) {
      double s = std::clamp(std::round(v * 32768.0), -32768.0, 32767.0);
      PutU16(&out, static_cast<uint16_t>(static_cast<int16_t>(s)));
    } else {
      float f = static_cast<float>(v);
      uint32_t u;
      std::memcpy(&u, &f, 4);
      PutU32(&out, u);
    }
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) Fail(ErrorKind::kIo, "cannot write WAV file ", path);
  os.write(reinterpret_cast<const char *>(out.data()),
           static_cast<std::streamsize>(out.size()));
  if (!os) Fail(ErrorKind::kIo, "short write to ", path);
}

}  // namespace gtse
