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
 * @brief Hazard rasters, their binarized flood maps, point and region
 * queries, and the BFM persistence format.
 *
 * Grids are north-up: row 0 is the northernmost row and cells are half-open
 * in longitude ([west, east)) and in latitude ((south, north]).
 */

#ifndef FLOODSIGHT_HAZARD_RASTER_HPP
#define FLOODSIGHT_HAZARD_RASTER_HPP

#include <cstdint>
#include <istream>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace floodsight {

struct GeoRef {
  double origin_lon = 0.0;  // west edge of cell (0,0)
  double origin_lat = 0.0;  // north edge of cell (0,0)
  double cell_size_deg = 1.0;
  std::uint32_t width = 1;
  std::uint32_t height = 1;

  /// Throws ArgumentError when an invariant does not hold.
  void validate() const;
  [[nodiscard]] bool contains(double lat, double lon) const noexcept;
  [[nodiscard]] double east_lon() const noexcept {
    return origin_lon + width * cell_size_deg;
  }
  [[nodiscard]] double south_lat() const noexcept {
    return origin_lat - height * cell_size_deg;
  }
  [[nodiscard]] std::size_t cell_count() const noexcept {
    return static_cast<std::size_t>(width) * height;
  }

  bool operator==(const GeoRef&) const = default;
};

struct HazardRaster {
  GeoRef georef;
  double nodata = -9999.0;
  std::vector<double> values;  // row-major, north to south

  [[nodiscard]] bool is_nodata(std::size_t index) const noexcept {
    return values[index] == nodata;
  }
};

inline constexpr int kReturnPeriods[] = {10, 20, 50, 100};
[[nodiscard]] bool is_valid_return_period(int years) noexcept;

struct InlandSource {
  int return_period_years = 50;
  bool operator==(const InlandSource&) const = default;
};

/// Coastal projections are a single scenario; the BFM file stores only the
/// layer kind, so these descriptors are restored from their defaults.
struct CoastalSource {
  std::string rcp_label = "RCP4.5";
  int quantile = 50;
  int decade = 2050;
  std::string baseline = "1980-2014";
  bool operator==(const CoastalSource&) const = default;
};

using LayerSource = std::variant<InlandSource, CoastalSource>;

class BinaryFloodMap {
 public:
  BinaryFloodMap(GeoRef georef, std::vector<bool> bits, LayerSource source,
                 float threshold_m);

  [[nodiscard]] const GeoRef& georef() const noexcept { return georef_; }
  [[nodiscard]] const std::vector<bool>& bits() const noexcept { return bits_; }
  [[nodiscard]] const LayerSource& source() const noexcept { return source_; }
  [[nodiscard]] float threshold_m() const noexcept { return threshold_m_; }
  [[nodiscard]] bool is_coastal() const noexcept {
    return std::holds_alternative<CoastalSource>(source_);
  }
  [[nodiscard]] bool bit(std::uint32_t row, std::uint32_t col) const {
    return bits_[static_cast<std::size_t>(row) * georef_.width + col];
  }

  bool operator==(const BinaryFloodMap&) const = default;

 private:
  GeoRef georef_;
  std::vector<bool> bits_;
  LayerSource source_;
  float threshold_m_;
};

enum class FloodStatus : std::uint8_t { kNone = 0, kInland = 1, kCoastal = 2, kBoth = 3 };

[[nodiscard]] std::string_view flood_status_name(FloodStatus status) noexcept;

struct Cell {
  std::uint32_t row;
  std::uint32_t col;
  bool operator==(const Cell&) const = default;
};

// Ingestion

/// Reads an ESRI ASCII grid. Throws ParseError naming the offending line.
[[nodiscard]] HazardRaster parse_ascii_grid(std::istream& in);
[[nodiscard]] HazardRaster parse_ascii_grid(std::string_view text);
[[nodiscard]] HazardRaster load_ascii_grid(const std::string& path);

inline constexpr double kDefaultInlandThresholdM = 0.0;
inline constexpr double kDefaultCoastalThresholdM = 0.20;

/// bit = value > depth_threshold_m for non-nodata cells.
[[nodiscard]] BinaryFloodMap binarize_inland(const HazardRaster& raster,
                                             double depth_threshold_m,
                                             int return_period_years);
/// bit = value > exceedance_threshold_m for non-nodata cells.
[[nodiscard]] BinaryFloodMap binarize_coastal(
    const HazardRaster& raster,
    double exceedance_threshold_m = kDefaultCoastalThresholdM,
    CoastalSource source = {});

// Queries

/// Throws ExtentError when the point lies outside the grid.
[[nodiscard]] Cell cell_of(const GeoRef& georef, double lat, double lon);
[[nodiscard]] bool query(const BinaryFloodMap& map, double lat, double lon);

/// Either layer may be null (e.g. coastal disabled). A point outside one
/// layer's extent reads as 0 for that layer; outside every present layer it
/// raises ExtentError.
[[nodiscard]] FloodStatus query_combined(const BinaryFloodMap* inland,
                                         const BinaryFloodMap* coastal,
                                         double lat, double lon);

struct BBox {
  double lat_min;
  double lat_max;
  double lon_min;
  double lon_max;
};

struct RegionGrid {
  BBox bbox;
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  double lat_step = 0.0;
  double lon_step = 0.0;
  std::vector<double> lat_centers;  // per row, north to south
  std::vector<double> lon_centers;  // per column, west to east
  std::vector<FloodStatus> cells;   // row-major

  [[nodiscard]] FloodStatus at(std::uint32_t row, std::uint32_t col) const {
    return cells[static_cast<std::size_t>(row) * cols + col];
  }
};

/// Samples cell-centred lattice points over bbox. The lattice never exceeds
/// max_cells_per_axis per axis and never oversamples the finest present grid.
[[nodiscard]] RegionGrid region_grid(const BinaryFloodMap* inland,
                                     const BinaryFloodMap* coastal,
                                     const BBox& bbox,
                                     std::uint32_t max_cells_per_axis);

// BFM persistence

inline constexpr std::uint16_t kBfmVersion = 1;

[[nodiscard]] std::vector<std::uint8_t> encode_bfm(const BinaryFloodMap& map);
[[nodiscard]] BinaryFloodMap decode_bfm(std::span<const std::uint8_t> bytes);

/// Run lengths alternate starting with a zero-run, which may be empty.
[[nodiscard]] std::vector<std::uint32_t> run_lengths(const std::vector<bool>& bits);

void save_bfm(const BinaryFloodMap& map, const std::string& path);
[[nodiscard]] BinaryFloodMap load_bfm(const std::string& path);

}  // namespace floodsight

#endif  // FLOODSIGHT_HAZARD_RASTER_HPP
