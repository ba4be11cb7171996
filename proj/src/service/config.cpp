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

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <string>

#include "common/byte_io.hpp"
#include "common/kv_config.hpp"
#include "floodsight/error.hpp"
#include "floodsight/service.hpp"

namespace floodsight::service {

namespace fs = std::filesystem;

namespace {

std::string resolve_path(const std::string& value, const std::string& base_dir) {
  if (value.empty() || base_dir.empty() || fs::path(value).is_absolute()) return value;
  return (fs::path(base_dir) / value).lexically_normal().string();
}

int parse_int(std::string_view s, std::size_t line, const std::string& what) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError(line, what + " is not an integer: '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

ServiceConfig parse_service_config(std::string_view text, const std::string& base_dir) {
  const auto kv = detail::KeyValues::parse(text);
  ServiceConfig c;
  static const std::string kInlandPrefix = "inland_map.";
  for (const auto& [key, value] : kv.entries()) {
    const std::size_t line = kv.line_of(key);
    if (key == "bind") {
      const auto colon = value.rfind(':');
      if (colon == std::string::npos || colon == 0) {
        throw ParseError(line, "bind must be host:port");
      }
      c.host = value.substr(0, colon);
      c.port = parse_int(std::string_view(value).substr(colon + 1), line, "bind port");
      if (c.port < 0 || c.port > 65535) throw ParseError(line, "bind port out of range");
    } else if (key.rfind(kInlandPrefix, 0) == 0) {
      const int rp = parse_int(std::string_view(key).substr(kInlandPrefix.size()), line,
                               "inland map return period");
      if (!is_valid_return_period(rp)) {
        throw ParseError(line, "inland map return period must be 10, 20, 50 or 100");
      }
      c.inland_maps[rp] = resolve_path(value, base_dir);
    } else if (key == "coastal_map") {
      c.coastal_map = resolve_path(value, base_dir);
    } else if (key == "checkpoint") {
      c.checkpoint = resolve_path(value, base_dir);
    } else if (key == "geocoder") {
      if (value != "fixture" && value != "http") {
        throw ParseError(line, "geocoder must be fixture or http");
      }
      c.geocoder = value;
    } else if (key == "geocoder.fixture") {
      c.geocoder_fixture = resolve_path(value, base_dir);
    } else if (key == "geocoder.base_url") {
      c.geocoder_base_url = value;
    } else if (key == "geocoder.timeout_s") {
      c.geocoder_timeout_s = kv.get_double(key, c.geocoder_timeout_s);
    } else if (key == "imagery") {
      if (value != "fixture" && value != "template") {
        throw ParseError(line, "imagery must be fixture or template");
      }
      c.imagery = value;
    } else if (key == "imagery.fixture_dir") {
      c.imagery_fixture_dir = resolve_path(value, base_dir);
    } else if (key == "imagery.url_template") {
      c.imagery_url_template = value;
    } else if (key == "imagery.timeout_s") {
      c.imagery_timeout_s = kv.get_double(key, c.imagery_timeout_s);
    } else {
      throw ParseError(line, "unknown key '" + key + "'");
    }
  }
  if (!(c.geocoder_timeout_s > 0.0) || !(c.imagery_timeout_s > 0.0)) {
    throw ArgumentError("service config: timeouts must be positive");
  }
  return c;
}

ServiceConfig load_service_config(const std::string& path) {
  const auto bytes = detail::read_file(path);
  const auto dir = fs::path(path).parent_path().string();
  return parse_service_config(
      std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()), dir);
}

std::string effective_config_path(const std::string& path) {
  const char* env = std::getenv("FLOODSIGHT_CONFIG");
  return env && *env ? std::string(env) : path;
}

ServiceResources load_resources(const ServiceConfig& c) {
  if (c.inland_maps.empty()) throw ArgumentError("service config: no inland_map.<rp> entry");
  if (c.checkpoint.empty()) throw ArgumentError("service config: checkpoint is required");

  ServiceResources r;
  for (const auto& [rp, path] : c.inland_maps) r.inland_maps.emplace(rp, load_bfm(path));
  if (!c.coastal_map.empty()) r.coastal_map = load_bfm(c.coastal_map);
  r.model = std::make_shared<const cyclegan::ModelState>(
      cyclegan::load_checkpoint_file(c.checkpoint));

  if (c.geocoder == "fixture") {
    if (c.geocoder_fixture.empty()) {
      throw ArgumentError("service config: geocoder.fixture is required");
    }
    r.geocoder = std::make_shared<const FixtureGeocoder>(
        FixtureGeocoder::from_file(c.geocoder_fixture));
  } else {
    r.geocoder = std::make_shared<const HttpGeocoder>(c.geocoder_base_url, c.geocoder_timeout_s);
  }
  if (c.imagery == "fixture") {
    if (c.imagery_fixture_dir.empty()) {
      throw ArgumentError("service config: imagery.fixture_dir is required");
    }
    r.imagery = std::make_shared<const FixtureImagery>(c.imagery_fixture_dir);
  } else {
    r.imagery =
        std::make_shared<const TemplateImagery>(c.imagery_url_template, c.imagery_timeout_s);
  }
  return r;
}

}  // namespace floodsight::service
