// src/config_file.cc

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

#include "gtse/config_file.h"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "gtse/error.h"

namespace gtse {

namespace {

std::string Trim(const std::string &s) {
  const size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

KeyValues KeyValues::Parse(const std::string &text) {
  KeyValues kv;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = Trim(line);
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    GTSE_REQUIRE(eq != std::string::npos, "config line ", lineno,
                 " is not of the form key = value");
    const std::string key = Trim(line.substr(0, eq));
    GTSE_REQUIRE(!key.empty(), "empty key on config line ", lineno);
    kv.values_[key] = Trim(line.substr(eq + 1));
  }
  return kv;
}

KeyValues KeyValues::Load(const std::string &path) {
  std::ifstream is(path);
  if (!is) Fail(ErrorKind::kIo, "cannot open config file ", path);
  std::stringstream ss;
  ss << is.rdbuf();
  return Parse(ss.str());
}

std::string KeyValues::Serialize() const {
  std::ostringstream os;
  for (const auto &[k, v] : values_) os << k << " = " << v << "\n";
  return os.str();
}

void KeyValues::Save(const std::string &path) const {
  std::ofstream os(path);
  if (!os) Fail(ErrorKind::kIo, "cannot write config file ", path);
  os << Serialize();
}

void KeyValues::Set(const std::string &key, int value) {
  values_[key] = std::to_string(value);
}

void KeyValues::Set(const std::string &key, double value) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  values_[key] = std::string(buf, res.ptr);
}

std::string KeyValues::GetString(const std::string &key,
                                 const std::string &fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

int KeyValues::GetInt(const std::string &key, int fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  int v = 0;
  auto res = std::from_chars(it->second.data(),
                             it->second.data() + it->second.size(), v);
  GTSE_REQUIRE(res.ec == std::errc() &&
                   res.ptr == it->second.data() + it->second.size(),
               "config key ", key, " expects an integer, got '", it->second, "'");
  return v;
}

double KeyValues::GetDouble(const std::string &key, double fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  double v = 0;
  auto res = std::from_chars(it->second.data(),
                             it->second.data() + it->second.size(), v);
  GTSE_REQUIRE(res.ec == std::errc() &&
                   res.ptr == it->second.data() + it->second.size(),
               "config key ", key, " expects a number, got '", it->second, "'");
  return v;
}

void KeyValues::Merge(const KeyValues &other) {
  for (const auto &[k, v] : other.values_) values_[k] = v;
}

KeyValues KeyValues::Section(const std::string &prefix) const {
  KeyValues out;
  for (const auto &[k, v] : values_)
    if (k.compare(0, prefix.size(), prefix) == 0)
      out.values_[k.substr(prefix.size())] = v;
  return out;
}

KeyValues KeyValues::Prefixed(const std::string &prefix) const {
  KeyValues out;
  for (const auto &[k, v] : values_) out.values_[prefix + k] = v;
  return out;
}

}  // namespace gtse
