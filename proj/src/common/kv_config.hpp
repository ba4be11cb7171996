// Copyright 2026 The FloodSight Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// "key = value" configuration text: one pair per line, '#' starts a comment.

#ifndef FLOODSIGHT_SRC_COMMON_KV_CONFIG_HPP
#define FLOODSIGHT_SRC_COMMON_KV_CONFIG_HPP

#include <cstdint>
#include <map>
#include <string>
#include <string_view>

namespace floodsight::detail {

class KeyValues {
 public:
  /// Throws ParseError on a line without '=', an empty key or a duplicate key.
  static KeyValues parse(std::string_view text);

  [[nodiscard]] bool has(const std::string& key) const { return entries_.count(key) != 0; }
  [[nodiscard]] const std::map<std::string, std::string>& entries() const { return entries_; }

  // Typed getters. Missing keys return the fallback; malformed values throw
  // ParseError naming the key and its line.
  [[nodiscard]] std::string get(const std::string& key, const std::string& fallback) const;
  [[nodiscard]] double get_double(const std::string& key, double fallback) const;
  [[nodiscard]] std::uint64_t get_uint(const std::string& key, std::uint64_t fallback) const;
  [[nodiscard]] bool get_bool(const std::string& key, bool fallback) const;

  [[nodiscard]] std::size_t line_of(const std::string& key) const { return lines_.at(key); }

 private:
  std::map<std::string, std::string> entries_;
  std::map<std::string, std::size_t> lines_;
};

}  // namespace floodsight::detail

#endif  // FLOODSIGHT_SRC_COMMON_KV_CONFIG_HPP
