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
#include <cmath>

#include <json.hpp>

#include "floodsight/error.hpp"
#include "floodsight/service.hpp"

namespace floodsight::service {

using nlohmann::json;

// ---------------------------------------------------------------- requests

VisualizationRequest parse_visualization_request(std::string_view body) {
  const json doc = json::parse(body, nullptr, false);
  if (doc.is_discarded()) throw ArgumentError("request body is not valid JSON");
  if (!doc.is_object()) throw ArgumentError("request body must be a JSON object");

  VisualizationRequest req;
  for (const auto& [key, value] : doc.items()) {
    if (key == "address") {
      if (!value.is_string() || value.get_ref<const std::string&>().empty()) {
        throw ArgumentError("'address' must be a non-empty string");
      }
      req.address = value.get<std::string>();
    } else if (key == "coords") {
      if (!value.is_object() || value.size() != 2 || !value.contains("lat") ||
          !value.contains("lon") || !value["lat"].is_number() || !value["lon"].is_number()) {
        throw ArgumentError("'coords' must be {\"lat\": number, \"lon\": number}");
      }
      const double lat = value["lat"].get<double>();
      const double lon = value["lon"].get<double>();
      if (!(lat >= -90.0 && lat <= 90.0) || !(lon >= -180.0 && lon <= 180.0)) {
        throw ArgumentError("'coords' out of range");
      }
      req.coords = Coords{lat, lon};
    } else if (key == "return_period_years") {
      if (!value.is_number_integer() || !is_valid_return_period(value.get<int>())) {
        throw ArgumentError("'return_period_years' must be one of 10, 20, 50, 100");
      }
      req.return_period_years = value.get<int>();
    } else if (key == "include_coastal") {
      if (!value.is_boolean()) throw ArgumentError("'include_coastal' must be a boolean");
      req.include_coastal = value.get<bool>();
    } else {
      throw ArgumentError("unknown field '" + key + "'");
    }
  }
  if (req.address.has_value() == req.coords.has_value()) {
    throw ArgumentError("exactly one of 'address' or 'coords' is required");
  }
  return req;
}

// ----------------------------------------------------------------- service

Service::Service(ServiceResources resources) : res_(std::move(resources)) {
  if (!res_.model) throw ArgumentError("service: no model loaded");
  if (!res_.geocoder || !res_.imagery) throw ArgumentError("service: missing client");
  if (res_.inland_maps.empty()) throw ArgumentError("service: no inland map loaded");
  for (const auto& [rp, map] : res_.inland_maps) {
    const auto* src = std::get_if<InlandSource>(&map.source());
    if (!src || src->return_period_years != rp) {
      throw ArgumentError("service: map registered for " + std::to_string(rp) +
                          " years is not that inland layer");
    }
  }
  if (res_.coastal_map && !res_.coastal_map->is_coastal()) {
    throw ArgumentError("service: coastal slot holds an inland map");
  }
}

namespace {

const BinaryFloodMap& inland_for(const ServiceResources& res, int return_period) {
  if (!is_valid_return_period(return_period)) {
    throw ArgumentError("return period must be one of 10, 20, 50, 100");
  }
  const auto it = res.inland_maps.find(return_period);
  if (it == res.inland_maps.end()) {
    throw NotFoundError("no inland map loaded for a " + std::to_string(return_period) +
                        "-year return period");
  }
  return it->second;
}

}  // namespace

VisualizationResponse Service::visualize(const VisualizationRequest& req) const {
  VisualizationResponse out;
  out.coords = req.coords ? *req.coords : res_.geocoder->resolve(*req.address);
  out.return_period_years = req.return_period_years;
  out.include_coastal = req.include_coastal;

  const BinaryFloodMap& inland = inland_for(res_, req.return_period_years);
  const BinaryFloodMap* coastal =
      req.include_coastal && res_.coastal_map ? &*res_.coastal_map : nullptr;
  out.status = query_combined(&inland, coastal, out.coords.lat, out.coords.lon);
  const auto bits = static_cast<unsigned>(out.status);
  out.inland = {true, (bits & 1u) != 0, inland.georef().contains(out.coords.lat, out.coords.lon)};
  if (coastal) {
    out.coastal = {true, (bits & 2u) != 0,
                   coastal->georef().contains(out.coords.lat, out.coords.lon)};
  }

  const auto size = res_.model->config.image_size;
  const Image original = resize(res_.imagery->fetch(out.coords), size, size);
  out.original_png = save_png(original);
  out.transformed_png = out.status == FloodStatus::kNone
                            ? out.original_png
                            : save_png(cyclegan::translate(*res_.model, original));
  return out;
}

RegionGrid Service::region(const BBox& bbox, int return_period, std::uint32_t max_cells,
                           bool include_coastal) const {
  if (max_cells < 1 || max_cells > kMaxRegionCells) {
    throw ArgumentError("max_cells must lie in [1, " + std::to_string(kMaxRegionCells) + "]");
  }
  const BinaryFloodMap* coastal =
      include_coastal && res_.coastal_map ? &*res_.coastal_map : nullptr;
  return region_grid(&inland_for(res_, return_period), coastal, bbox, max_cells);
}

// ------------------------------------------------------------------- JSON

namespace {

json layer_json(const BinaryFloodMap& map, const LayerReport& report) {
  json j = {{"queried", report.queried},
            {"in_extent", report.in_extent},
            {"flooded", report.flooded},
            {"threshold_m", map.threshold_m()},
            {"cell_size_deg", map.georef().cell_size_deg}};
  if (const auto* in = std::get_if<InlandSource>(&map.source())) {
    j["source"] = "inland";
    j["return_period_years"] = in->return_period_years;
  } else {
    const auto& c = std::get<CoastalSource>(map.source());
    j["source"] = "coastal";
    j["scenario"] = c.rcp_label;
    j["quantile"] = c.quantile;
    j["decade"] = c.decade;
    j["baseline"] = c.baseline;
  }
  return j;
}

HttpResult error_result(int status, const char* code, const std::string& message) {
  return {status, json{{"error", code}, {"message", message}}.dump()};
}

double number_param(const std::multimap<std::string, std::string>& q, const std::string& key,
                    std::optional<double> fallback) {
  const auto n = q.count(key);
  if (n == 0) {
    if (!fallback) throw ArgumentError("missing query parameter '" + key + "'");
    return *fallback;
  }
  if (n > 1) throw ArgumentError("query parameter '" + key + "' given more than once");
  const std::string& s = q.find(key)->second;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw ArgumentError("query parameter '" + key + "' is not a number");
  }
  return v;
}

std::int64_t int_param(const std::multimap<std::string, std::string>& q, const std::string& key,
                       std::int64_t fallback) {
  const double v = number_param(q, key, static_cast<double>(fallback));
  if (v != std::floor(v) || std::abs(v) > 1e9) {
    throw ArgumentError("query parameter '" + key + "' must be an integer");
  }
  return static_cast<std::int64_t>(v);
}

}  // namespace

std::string Service::response_json(const VisualizationResponse& r) const {
  json layers = {{"inland", layer_json(res_.inland_maps.at(r.return_period_years), r.inland)},
                 {"coastal", nullptr}};
  if (res_.coastal_map) layers["coastal"] = layer_json(*res_.coastal_map, r.coastal);
  const json j = {
      {"coords", {{"lat", r.coords.lat}, {"lon", r.coords.lon}}},
      {"flood_status", flood_status_name(r.status)},
      {"flood_status_code", static_cast<int>(r.status)},
      {"return_period_years", r.return_period_years},
      {"include_coastal", r.include_coastal},
      {"layers", layers},
      {"image_size", res_.model->config.image_size},
      {"image_format", "png"},
      {"original_image", base64_encode(r.original_png)},
      {"transformed_image", base64_encode(r.transformed_png)},
  };
  return j.dump();
}

HttpResult Service::handle(std::string_view method, std::string_view path,
                           const std::multimap<std::string, std::string>& query,
                           std::string_view body) const {
  auto wrong_method = [&](const char* allowed) {
    return error_result(405, "method_not_allowed",
                        std::string(path) + " accepts " + allowed + " only");
  };
  try {
    if (path == "/health") {
      if (method != "GET") return wrong_method("GET");
      return {200, R"({"status":"ok"})"};
    }
    if (path == "/api/v1/visualize") {
      if (method != "POST") return wrong_method("POST");
      return {200, response_json(visualize(parse_visualization_request(body)))};
    }
    if (path == "/api/v1/floodmap/region") {
      if (method != "GET") return wrong_method("GET");
      static const char* const kKnown[] = {"lat_min", "lat_max",   "lon_min",        "lon_max",
                                           "return_period", "max_cells", "include_coastal"};
      for (const auto& [key, value] : query) {
        if (std::find(std::begin(kKnown), std::end(kKnown), key) == std::end(kKnown)) {
          throw ArgumentError("unknown query parameter '" + key + "'");
        }
      }
      const BBox bbox{number_param(query, "lat_min", std::nullopt),
                      number_param(query, "lat_max", std::nullopt),
                      number_param(query, "lon_min", std::nullopt),
                      number_param(query, "lon_max", std::nullopt)};
      const auto rp = int_param(query, "return_period", 50);
      const auto max_cells = int_param(query, "max_cells", 64);
      if (max_cells < 1 || max_cells > kMaxRegionCells) {
        throw ArgumentError("max_cells must lie in [1, " + std::to_string(kMaxRegionCells) + "]");
      }
      bool coastal = true;
      if (query.count("include_coastal") > 1) {
        throw ArgumentError("query parameter 'include_coastal' given more than once");
      }
      if (const auto it = query.find("include_coastal"); it != query.end()) {
        if (it->second == "true" || it->second == "1") {
          coastal = true;
        } else if (it->second == "false" || it->second == "0") {
          coastal = false;
        } else {
          throw ArgumentError("include_coastal must be true or false");
        }
      }
      const RegionGrid grid =
          region(bbox, static_cast<int>(rp), static_cast<std::uint32_t>(max_cells), coastal);
      json cells = json::array();
      for (std::uint32_t r = 0; r < grid.rows; ++r) {
        json row = json::array();
        for (std::uint32_t c = 0; c < grid.cols; ++c) row.push_back(static_cast<int>(grid.at(r, c)));
        cells.push_back(std::move(row));
      }
      const json j = {
          {"bbox",
           {{"lat_min", bbox.lat_min}, {"lat_max", bbox.lat_max},
            {"lon_min", bbox.lon_min}, {"lon_max", bbox.lon_max}}},
          {"return_period_years", rp},
          {"include_coastal", coastal},
          {"rows", grid.rows},
          {"cols", grid.cols},
          {"lat_step", grid.lat_step},
          {"lon_step", grid.lon_step},
          {"lat", grid.lat_centers},
          {"lon", grid.lon_centers},
          {"cells", cells},
      };
      return {200, j.dump()};
    }
    return error_result(404, "not_found", "no route for " + std::string(path));
  } catch (const ArgumentError& e) {
    return error_result(400, "invalid_request", e.what());
  } catch (const NotFoundError& e) {
    return error_result(404, "not_found", e.what());
  } catch (const ExtentError& e) {
    return error_result(422, "out_of_extent", e.what());
  } catch (const UpstreamError& e) {
    return error_result(502, "upstream_error", e.what());
  } catch (const ImageryError& e) {
    return error_result(502, "imagery_error", e.what());
  } catch (const std::exception& e) {
    return error_result(500, "internal_error", e.what());
  } catch (...) {
    return error_result(500, "internal_error", "unknown failure");
  }
}

}  // namespace floodsight::service
