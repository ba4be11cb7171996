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

// Minimal URL handling for the outbound HTTP clients.

#ifndef FLOODSIGHT_SRC_SERVICE_URL_HPP
#define FLOODSIGHT_SRC_SERVICE_URL_HPP

#include <string>
#include <string_view>

#include "floodsight/error.hpp"

namespace floodsight::detail {

struct SplitUrl {
  std::string origin;  // http://host[:port]
  std::string path;    // everything after the origin, may be empty
};

/// Only plain http is supported.
inline SplitUrl split_url(std::string_view url) {
  constexpr std::string_view kScheme = "http://";
  if (url.substr(0, kScheme.size()) != kScheme) {
    throw ArgumentError("unsupported URL (expected http://...): " + std::string(url));
  }
  const auto slash = url.find('/', kScheme.size());
  const auto host_end = slash == std::string_view::npos ? url.size() : slash;
  if (host_end == kScheme.size()) throw ArgumentError("URL has no host: " + std::string(url));
  SplitUrl out{std::string(url.substr(0, host_end)), std::string(url.substr(host_end))};
  while (!out.path.empty() && out.path.back() == '/' &&
         out.path.find('?') == std::string::npos) {
    out.path.pop_back();
  }
  return out;
}

inline std::string percent_encode(std::string_view s) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : s) {
    if ((c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-' ||
        c == '_' || c == '.' || c == '~') {
      out.push_back(static_cast<char>(c));
    } else {
      out.push_back('%');
      out.push_back(kHex[c >> 4]);
      out.push_back(kHex[c & 15]);
    }
  }
  return out;
}

}  // namespace floodsight::detail

#endif  // FLOODSIGHT_SRC_SERVICE_URL_HPP
