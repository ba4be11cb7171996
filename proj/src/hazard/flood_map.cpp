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

#include <algorithm>
#include <cmath>
#include <limits>

#include "floodsight/error.hpp"
#include "floodsight/hazard_raster.hpp"

namespace floodsight {

void GeoRef::validate() const {
  if (width < 1 || height < 1) throw ArgumentError("georef: empty grid");
  if (!(cell_size_deg > 0.0) || !std::isfinite(cell_size_deg)) {
    throw ArgumentError("georef: cell size must be positive");
  }
  if (!(origin_lat >= -90.0 && origin_lat <= 90.0)) {
    throw ArgumentError("georef: origin latitude outside [-90, 90]");
  }
  if (south_lat() < -90.0) throw ArgumentError("georef: grid extends south of -90");
  if (!(origin_lon >= -180.0 && origin_lon < 180.0)) {
    throw ArgumentError("georef: origin longitude outside [-180, 180)");
  }
}

bool GeoRef::contains(double lat, double lon) const noexcept {
  return lon >= origin_lon && lon < east_lon() && lat <= origin_lat && lat > south_lat();
}

bool is_valid_return_period(int years) noexcept {
  return std::find(std::begin(kReturnPeriods), std::end(kReturnPeriods), years) !=
         std::end(kReturnPeriods);
}

BinaryFloodMap::BinaryFloodMap(GeoRef georef, std::vector<bool> bits, LayerSource source,
                               float threshold_m)
    : georef_(georef), bits_(std::move(bits)), source_(std::move(source)),
      threshold_m_(threshold_m) {
  georef_.validate();
  if (bits_.size() != georef_.cell_count()) {
    throw ArgumentError("flood map: bit count does not match grid size");
  }
  if (!(threshold_m_ >= 0.0f) || !std::isfinite(threshold_m_)) {
    throw ArgumentError("flood map: threshold must be finite and >= 0");
  }
  if (const auto* inland = std::get_if<InlandSource>(&source_);
      inland && !is_valid_return_period(inland->return_period_years)) {
    throw ArgumentError("flood map: return period must be 10, 20, 50 or 100 years");
  }
}

std::string_view flood_status_name(FloodStatus status) noexcept {
  switch (status) {
    case FloodStatus::kNone: return "None";
    case FloodStatus::kInland: return "Inland";
    case FloodStatus::kCoastal: return "Coastal";
    case FloodStatus::kBoth: return "Both";
  }
  return "Unknown";
}

namespace {

std::vector<bool> exceeding(const HazardRaster& raster, double threshold_m) {
  if (!(threshold_m >= 0.0) || !std::isfinite(threshold_m)) {
    throw ArgumentError("threshold must be finite and >= 0");
  }
  if (raster.values.size() != raster.georef.cell_count()) {
    throw ArgumentError("raster value count does not match its georef");
  }
  std::vector<bool> bits(raster.values.size());
  for (std::size_t i = 0; i < raster.values.size(); ++i) {
    bits[i] = !raster.is_nodata(i) && raster.values[i] > threshold_m;
  }
  return bits;
}

}  // namespace

BinaryFloodMap binarize_inland(const HazardRaster& raster, double depth_threshold_m,
                               int return_period_years) {
  return {raster.georef, exceeding(raster, depth_threshold_m),
          InlandSource{return_period_years}, static_cast<float>(depth_threshold_m)};
}

BinaryFloodMap binarize_coastal(const HazardRaster& raster, double exceedance_threshold_m,
                                CoastalSource source) {
  return {raster.georef, exceeding(raster, exceedance_threshold_m), std::move(source),
          static_cast<float>(exceedance_threshold_m)};
}

Cell cell_of(const GeoRef& georef, double lat, double lon) {
  if (!georef.contains(lat, lon)) throw ExtentError(lat, lon, "point outside grid extent");
  const double fcol = std::floor((lon - georef.origin_lon) / georef.cell_size_deg);
  const double frow = std::floor((georef.origin_lat - lat) / georef.cell_size_deg);
  // Rounding right at the east/south edge can land one past the last index.
  const auto col = static_cast<std::uint32_t>(
      std::clamp(fcol, 0.0, static_cast<double>(georef.width - 1)));
  const auto row = static_cast<std::uint32_t>(
      std::clamp(frow, 0.0, static_cast<double>(georef.height - 1)));
  return {row, col};
}

bool query(const BinaryFloodMap& map, double lat, double lon) {
  const Cell c = cell_of(map.georef(), lat, lon);
  return map.bit(c.row, c.col);
}

FloodStatus query_combined(const BinaryFloodMap* inland, const BinaryFloodMap* coastal,
                           double lat, double lon) {
  const bool in_inland = inland && inland->georef().contains(lat, lon);
  const bool in_coastal = coastal && coastal->georef().contains(lat, lon);
  if (!in_inland && !in_coastal) {
    throw ExtentError(lat, lon, "point outside every flood map extent");
  }
  const bool a = in_inland && query(*inland, lat, lon);
  const bool b = in_coastal && query(*coastal, lat, lon);
  return static_cast<FloodStatus>((a ? 1 : 0) | (b ? 2 : 0));
}

namespace {

bool overlaps(const BBox& box, const GeoRef& g) {
  return box.lat_min < g.origin_lat && box.lat_max > g.south_lat() &&
         box.lon_min < g.east_lon() && box.lon_max > g.origin_lon;
}

std::uint32_t axis_samples(double span, double finest_cell, std::uint32_t max_cells) {
  const double needed = std::ceil(span / finest_cell - 1e-9);
  return static_cast<std::uint32_t>(std::clamp(needed, 1.0, static_cast<double>(max_cells)));
}

}  // namespace

RegionGrid region_grid(const BinaryFloodMap* inland, const BinaryFloodMap* coastal,
                       const BBox& bbox, std::uint32_t max_cells_per_axis) {
  if (max_cells_per_axis < 1) throw ArgumentError("max_cells_per_axis must be >= 1");
  if (!(bbox.lat_min < bbox.lat_max) || !(bbox.lon_min < bbox.lon_max)) {
    throw ArgumentError("bbox must satisfy lat_min < lat_max and lon_min < lon_max");
  }
  if (!inland && !coastal) throw ArgumentError("region query needs at least one map");

  const double center_lat = 0.5 * (bbox.lat_min + bbox.lat_max);
  const double center_lon = 0.5 * (bbox.lon_min + bbox.lon_max);
  const bool hit_inland = inland && overlaps(bbox, inland->georef());
  const bool hit_coastal = coastal && overlaps(bbox, coastal->georef());
  if (!hit_inland && !hit_coastal) {
    throw ExtentError(center_lat, center_lon, "bbox does not intersect any flood map");
  }

  double finest = std::numeric_limits<double>::infinity();
  if (hit_inland) finest = std::min(finest, inland->georef().cell_size_deg);
  if (hit_coastal) finest = std::min(finest, coastal->georef().cell_size_deg);

  RegionGrid grid;
  grid.bbox = bbox;
  grid.rows = axis_samples(bbox.lat_max - bbox.lat_min, finest, max_cells_per_axis);
  grid.cols = axis_samples(bbox.lon_max - bbox.lon_min, finest, max_cells_per_axis);
  grid.lat_step = (bbox.lat_max - bbox.lat_min) / grid.rows;
  grid.lon_step = (bbox.lon_max - bbox.lon_min) / grid.cols;
  for (std::uint32_t r = 0; r < grid.rows; ++r) {
    grid.lat_centers.push_back(bbox.lat_max - (r + 0.5) * grid.lat_step);
  }
  for (std::uint32_t c = 0; c < grid.cols; ++c) {
    grid.lon_centers.push_back(bbox.lon_min + (c + 0.5) * grid.lon_step);
  }

  grid.cells.reserve(static_cast<std::size_t>(grid.rows) * grid.cols);
  for (double lat : grid.lat_centers) {
    for (double lon : grid.lon_centers) {
      const bool in_any = (inland && inland->georef().contains(lat, lon)) ||
                          (coastal && coastal->georef().contains(lat, lon));
      grid.cells.push_back(in_any ? query_combined(inland, coastal, lat, lon)
                                  : FloodStatus::kNone);
    }
  }
  return grid;
}

}  // namespace floodsight
