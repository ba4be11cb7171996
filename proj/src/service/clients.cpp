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

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>

#include <httplib.h>
#include <json.hpp>

#include "common/byte_io.hpp"
#include "floodsight/error.hpp"
#include "floodsight/service.hpp"
#include "service/url.hpp"

namespace floodsight::service {

using nlohmann::json;

// ------------------------------------------------------------------ base64

namespace {
constexpr char kAlphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
}

std::string base64_encode(std::span<const std::uint8_t> bytes) {
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 3 <= bytes.size(); i += 3) {
    const std::uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8) | bytes[i + 2];
    for (int s = 18; s >= 0; s -= 6) out.push_back(kAlphabet[(v >> s) & 63]);
  }
  if (const std::size_t rest = bytes.size() - i; rest > 0) {
    std::uint32_t v = bytes[i] << 16;
    if (rest == 2) v |= bytes[i + 1] << 8;
    out.push_back(kAlphabet[(v >> 18) & 63]);
    out.push_back(kAlphabet[(v >> 12) & 63]);
    out.push_back(rest == 2 ? kAlphabet[(v >> 6) & 63] : '=');
    out.push_back('=');
  }
  return out;
}

std::vector<std::uint8_t> base64_decode(std::string_view text) {
  static const std::array<int, 256> kIndex = [] {
    std::array<int, 256> t{};
    t.fill(-1);
    for (int i = 0; i < 64; ++i) t[static_cast<unsigned char>(kAlphabet[i])] = i;
    return t;
  }();
  if (text.size() % 4 != 0) throw ArgumentError("base64: length is not a multiple of 4");
  std::vector<std::uint8_t> out;
  out.reserve(text.size() / 4 * 3);
  for (std::size_t i = 0; i < text.size(); i += 4) {
    const bool last = i + 4 == text.size();
    const int pad = last ? (text[i + 3] == '=') + (text[i + 2] == '=') : 0;
    if (pad == 1 && text[i + 2] == '=') throw ArgumentError("base64: bad padding");
    std::uint32_t v = 0;
    for (int k = 0; k < 4; ++k) {
      const char ch = text[i + k];
      int d = 0;
      if (k >= 4 - pad) {
        if (ch != '=') throw ArgumentError("base64: bad padding");
      } else if ((d = kIndex[static_cast<unsigned char>(ch)]) < 0) {
        throw ArgumentError("base64: invalid character");
      }
      v = (v << 6) | static_cast<std::uint32_t>(d);
    }
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    if (pad < 2) out.push_back(static_cast<std::uint8_t>(v >> 8));
    if (pad < 1) out.push_back(static_cast<std::uint8_t>(v));
  }
  return out;
}

// --------------------------------------------------------------- geocoders

namespace {

Coords checked_coords(double lat, double lon) {
  if (!std::isfinite(lat) || !std::isfinite(lon) || lat < -90.0 || lat > 90.0 || lon < -180.0 ||
      lon > 180.0) {
    throw ArgumentError("coordinates out of range");
  }
  return {lat, lon};
}

void set_timeouts(httplib::Client& client, double seconds) {
  const auto us = static_cast<long long>(std::max(0.001, seconds) * 1e6);
  const time_t sec = static_cast<time_t>(us / 1000000);
  const time_t usec = static_cast<time_t>(us % 1000000);
  client.set_connection_timeout(sec, usec);
  client.set_read_timeout(sec, usec);
  client.set_write_timeout(sec, usec);
}

}  // namespace

FixtureGeocoder FixtureGeocoder::from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(0, std::string("geocoder fixture: ") + e.what());
  }
  if (!doc.is_object()) throw ArgumentError("geocoder fixture: expected a JSON object");
  std::map<std::string, Coords> table;
  for (const auto& [address, value] : doc.items()) {
    if (!value.is_array() || value.size() != 2 || !value[0].is_number() ||
        !value[1].is_number()) {
      throw ArgumentError("geocoder fixture: '" + address + "' must map to [lat, lon]");
    }
    table.emplace(address, checked_coords(value[0].get<double>(), value[1].get<double>()));
  }
  return FixtureGeocoder(std::move(table));
}

FixtureGeocoder FixtureGeocoder::from_file(const std::string& path) {
  const auto bytes = detail::read_file(path);
  return from_json(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

Coords FixtureGeocoder::resolve(const std::string& address) const {
  const auto it = table_.find(address);
  if (it == table_.end()) throw NotFoundError("address not found: '" + address + "'");
  return it->second;
}

HttpGeocoder::HttpGeocoder(std::string base_url, double timeout_s)
    : base_url_(std::move(base_url)), timeout_s_(timeout_s) {
  (void)detail::split_url(base_url_);
}

Coords HttpGeocoder::resolve(const std::string& address) const {
  if (address.empty()) throw ArgumentError("empty address");
  const auto url = detail::split_url(base_url_);
  httplib::Client client(url.origin);
  set_timeouts(client, timeout_s_);
  const std::string target =
      url.path + "/search?q=" + detail::percent_encode(address) + "&format=json";
  const auto res = client.Get(target);
  if (!res) throw UpstreamError(provider(), "request failed: " + httplib::to_string(res.error()));
  if (res->status != 200) {
    throw UpstreamError(provider(), "HTTP status " + std::to_string(res->status));
  }
  json doc = json::parse(res->body, nullptr, false);
  if (!doc.is_array()) throw UpstreamError(provider(), "response is not a JSON array");
  if (doc.empty()) throw NotFoundError("address not found: '" + address + "'");
  const auto& first = doc.front();
  auto field = [&](const char* key) {
    if (!first.is_object() || !first.contains(key)) {
      throw UpstreamError(provider(), std::string("result lacks '") + key + "'");
    }
    const auto& v = first.at(key);
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
      const auto& s = v.get_ref<const std::string&>();
      char* end = nullptr;
      const double d = std::strtod(s.c_str(), &end);
      if (!s.empty() && end == s.c_str() + s.size()) return d;
    }
    throw UpstreamError(provider(), std::string("result field '") + key + "' is not numeric");
  };
  try {
    return checked_coords(field("lat"), field("lon"));
  } catch (const ArgumentError& e) {
    throw UpstreamError(provider(), e.what());
  }
}

// ----------------------------------------------------------------- imagery

std::string FixtureImagery::path_for(const Coords& c) const {
  char name[64];
  std::snprintf(name, sizeof name, "%.4f_%.4f.png", c.lat, c.lon);
  return (std::filesystem::path(dir_) / name).string();
}

Image FixtureImagery::fetch(const Coords& coords) const {
  return load_png_file(path_for(coords));
}

TemplateImagery::TemplateImagery(std::string url_template, double timeout_s)
    : template_(std::move(url_template)), timeout_s_(timeout_s) {
  (void)detail::split_url(template_);
}

std::string TemplateImagery::url_for(const Coords& c) const {
  char lat[32], lon[32];
  std::snprintf(lat, sizeof lat, "%.6f", c.lat);
  std::snprintf(lon, sizeof lon, "%.6f", c.lon);
  std::string url = template_;
  for (const auto& [key, value] : {std::pair{"{lat}", lat}, std::pair{"{lon}", lon}}) {
    for (auto pos = url.find(key); pos != std::string::npos; pos = url.find(key)) {
      url.replace(pos, std::string_view(key).size(), value);
    }
  }
  return url;
}

Image TemplateImagery::fetch(const Coords& coords) const {
  const auto url = detail::split_url(url_for(coords));
  httplib::Client client(url.origin);
  set_timeouts(client, timeout_s_);
  const auto res = client.Get(url.path.empty() ? "/" : url.path);
  if (!res) {
    throw ImageryError(provider() + ": request failed: " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw ImageryError(provider() + ": HTTP status " + std::to_string(res->status));
  }
  const auto* data = reinterpret_cast<const std::uint8_t*>(res->body.data());
  return load_png(std::span(data, res->body.size()));
}

}  // namespace floodsight::service
