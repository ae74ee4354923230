// gtse/config_file.h

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

#ifndef GTSE_CONFIG_FILE_H_
#define GTSE_CONFIG_FILE_H_

#include <map>
#include <string>

namespace gtse {

/// Flat "key = value" settings. Keys are dotted (seg.encoder_channels).
class KeyValues {
 public:
  static KeyValues Parse(const std::string &text);
  static KeyValues Load(const std::string &path);
  std::string Serialize() const;
  void Save(const std::string &path) const;

  bool Has(const std::string &key) const { return values_.count(key) > 0; }
  void Set(const std::string &key, const std::string &value) { values_[key] = value; }
  void Set(const std::string &key, int value);
  void Set(const std::string &key, double value);

  std::string GetString(const std::string &key, const std::string &fallback) const;
  int GetInt(const std::string &key, int fallback) const;
  double GetDouble(const std::string &key, double fallback) const;

  /// Copies every entry of other, overwriting duplicates.
  void Merge(const KeyValues &other);
  /// Entries whose key starts with prefix, with the prefix removed.
  KeyValues Section(const std::string &prefix) const;
  KeyValues Prefixed(const std::string &prefix) const;

  const std::map<std::string, std::string> &entries() const { return values_; }
  friend bool operator==(const KeyValues &, const KeyValues &) = default;

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace gtse

#endif  // GTSE_CONFIG_FILE_H_
