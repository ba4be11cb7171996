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

/**
 * @file
 * @brief Address-to-visualization pipeline and its HTTP/JSON API.
 *
 * The Service owns immutable flood maps and a trained model; handlers are
 * const and safe to call from concurrent request threads.
 */

#ifndef FLOODSIGHT_SERVICE_HPP
#define FLOODSIGHT_SERVICE_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "floodsight/cyclegan.hpp"
#include "floodsight/hazard_raster.hpp"
#include "floodsight/image.hpp"

namespace floodsight::service {

struct Coords {
  double lat = 0.0;
  double lon = 0.0;
  bool operator==(const Coords&) const = default;
};

class GeocoderClient {
 public:
  virtual ~GeocoderClient() = default;
  /// Throws NotFoundError when nothing matches, UpstreamError on transport failure.
  [[nodiscard]] virtual Coords resolve(const std::string& address) const = 0;
  [[nodiscard]] virtual std::string provider() const = 0;
};

class ImageryClient {
 public:
  virtual ~ImageryClient() = default;
  /// Throws ImageryError when no usable image is available.
  [[nodiscard]] virtual Image fetch(const Coords& coords) const = 0;
  [[nodiscard]] virtual std::string provider() const = 0;
};

/// Exact-match lookup in a JSON object {"address": [lat, lon], ...}.
class FixtureGeocoder final : public GeocoderClient {
 public:
  explicit FixtureGeocoder(std::map<std::string, Coords> table) : table_(std::move(table)) {}
  /// Throws ParseError / ArgumentError on a malformed table.
  static FixtureGeocoder from_json(std::string_view json);
  static FixtureGeocoder from_file(const std::string& path);
  [[nodiscard]] Coords resolve(const std::string& address) const override;
  [[nodiscard]] std::string provider() const override { return "fixture-geocoder"; }

 private:
  std::map<std::string, Coords> table_;
};

/// GET <base_url>/search?q=<address>&format=json; first result's lat/lon.
class HttpGeocoder final : public GeocoderClient {
 public:
  HttpGeocoder(std::string base_url, double timeout_s);
  [[nodiscard]] Coords resolve(const std::string& address) const override;
  [[nodiscard]] std::string provider() const override { return "http-geocoder"; }

 private:
  std::string base_url_;
  double timeout_s_;
};

/// <dir>/<lat>_<lon>.png with both coordinates printed to 4 decimals.
class FixtureImagery final : public ImageryClient {
 public:
  explicit FixtureImagery(std::string dir) : dir_(std::move(dir)) {}
  [[nodiscard]] Image fetch(const Coords& coords) const override;
  [[nodiscard]] std::string provider() const override { return "fixture-imagery"; }
  [[nodiscard]] std::string path_for(const Coords& coords) const;

 private:
  std::string dir_;
};

/// GET of url_template with {lat} and {lon} replaced; the body must be a PNG.
class TemplateImagery final : public ImageryClient {
 public:
  TemplateImagery(std::string url_template, double timeout_s);
  [[nodiscard]] Image fetch(const Coords& coords) const override;
  [[nodiscard]] std::string provider() const override { return "template-imagery"; }
  [[nodiscard]] std::string url_for(const Coords& coords) const;

 private:
  std::string template_;
  double timeout_s_;
};

struct VisualizationRequest {
  std::optional<std::string> address;
  std::optional<Coords> coords;
  int return_period_years = 50;
  bool include_coastal = true;
};

/// Strict JSON parsing: unknown keys, wrong types, address and coords both or
/// neither present, and unsupported return periods throw ArgumentError.
[[nodiscard]] VisualizationRequest parse_visualization_request(std::string_view body);

struct LayerReport {
  bool queried = false;  // false when the layer was skipped or not loaded
  bool flooded = false;
  bool in_extent = false;
};

struct VisualizationResponse {
  Coords coords;
  FloodStatus status = FloodStatus::kNone;
  int return_period_years = 50;
  bool include_coastal = true;
  LayerReport inland;
  LayerReport coastal;
  std::vector<std::uint8_t> original_png;
  std::vector<std::uint8_t> transformed_png;
};

struct ServiceResources {
  std::map<int, BinaryFloodMap> inland_maps;  // keyed by return period
  std::optional<BinaryFloodMap> coastal_map;
  std::shared_ptr<const cyclegan::ModelState> model;
  std::shared_ptr<const GeocoderClient> geocoder;
  std::shared_ptr<const ImageryClient> imagery;
};

struct HttpResult {
  int status = 200;
  std::string body;  // JSON
};

class Service {
 public:
  /// Throws ArgumentError when the model or a client is missing or no map is loaded.
  explicit Service(ServiceResources resources);

  [[nodiscard]] VisualizationResponse visualize(const VisualizationRequest& request) const;
  [[nodiscard]] RegionGrid region(const BBox& bbox, int return_period_years,
                                  std::uint32_t max_cells, bool include_coastal = true) const;

  /// Transport-independent router. query holds the decoded URL parameters.
  /// Never throws: every failure becomes a JSON error body and status code.
  [[nodiscard]] HttpResult handle(std::string_view method, std::string_view path,
                                  const std::multimap<std::string, std::string>& query,
                                  std::string_view body) const;

  [[nodiscard]] std::string response_json(const VisualizationResponse& response) const;
  [[nodiscard]] const ServiceResources& resources() const noexcept { return res_; }

 private:
  ServiceResources res_;
};

inline constexpr std::uint32_t kMaxRegionCells = 512;

// Configuration

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::map<int, std::string> inland_maps;
  std::string coastal_map;
  std::string checkpoint;
  std::string geocoder = "fixture";  // fixture | http
  std::string geocoder_fixture;
  std::string geocoder_base_url;
  double geocoder_timeout_s = 5.0;
  std::string imagery = "fixture";  // fixture | template
  std::string imagery_fixture_dir;
  std::string imagery_url_template;
  double imagery_timeout_s = 10.0;
};

/// Relative paths are resolved against base_dir. Unknown keys are rejected.
[[nodiscard]] ServiceConfig parse_service_config(std::string_view text,
                                                 const std::string& base_dir = "");
[[nodiscard]] ServiceConfig load_service_config(const std::string& path);
/// FLOODSIGHT_CONFIG, when set and non-empty, wins over the given path.
[[nodiscard]] std::string effective_config_path(const std::string& path);
/// Loads maps, checkpoint and clients named by the config.
[[nodiscard]] ServiceResources load_resources(const ServiceConfig& config);

/// Blocking HTTP server around a Service.
class HttpServer {
 public:
  explicit HttpServer(const Service& service);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds; port 0 picks a free port. Returns the bound port. Throws IoError.
  int bind(const std::string& host, int port);
  /// Serves until stop() is called.
  void listen();
  void stop();
  /// Blocks until the server is accepting connections.
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

std::string base64_encode(std::span<const std::uint8_t> bytes);
/// Throws ArgumentError on characters outside the standard alphabet or bad padding.
std::vector<std::uint8_t> base64_decode(std::string_view text);

}  // namespace floodsight::service

#endif  // FLOODSIGHT_SERVICE_HPP
