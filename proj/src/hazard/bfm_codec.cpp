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

// BFM layout (little-endian):
//   "BFM1" | u16 version | u8 kind | u16 return_period | f32 threshold_m |
//   u32 width | u32 height | f64 origin_lon | f64 origin_lat | f64 cell_size |
//   u32 run_count | run_count x u32 runs (zeros first)

#include <cmath>

#include "common/byte_io.hpp"
#include "floodsight/error.hpp"
#include "floodsight/hazard_raster.hpp"

namespace floodsight {

namespace {

constexpr std::string_view kMagic = "BFM1";
constexpr std::uint8_t kKindInland = 0;
constexpr std::uint8_t kKindCoastal = 1;

}  // namespace

std::vector<std::uint32_t> run_lengths(const std::vector<bool>& bits) {
  std::vector<std::uint32_t> runs;
  bool current = false;
  std::uint32_t length = 0;
  for (bool b : bits) {
    if (b != current) {
      runs.push_back(length);
      current = b;
      length = 0;
    }
    ++length;
  }
  runs.push_back(length);
  return runs;
}

std::vector<std::uint8_t> encode_bfm(const BinaryFloodMap& map) {
  detail::ByteWriter w;
  w.put_bytes(kMagic);
  w.put<std::uint16_t>(kBfmVersion);
  if (const auto* inland = std::get_if<InlandSource>(&map.source())) {
    w.put<std::uint8_t>(kKindInland);
    w.put<std::uint16_t>(static_cast<std::uint16_t>(inland->return_period_years));
  } else {
    w.put<std::uint8_t>(kKindCoastal);
    w.put<std::uint16_t>(0);
  }
  const GeoRef& g = map.georef();
  w.put<float>(map.threshold_m());
  w.put<std::uint32_t>(g.width);
  w.put<std::uint32_t>(g.height);
  w.put<double>(g.origin_lon);
  w.put<double>(g.origin_lat);
  w.put<double>(g.cell_size_deg);
  const auto runs = run_lengths(map.bits());
  w.put<std::uint32_t>(static_cast<std::uint32_t>(runs.size()));
  for (auto r : runs) w.put<std::uint32_t>(r);
  return std::move(w).take();
}

BinaryFloodMap decode_bfm(std::span<const std::uint8_t> bytes) {
  detail::ByteReader r(bytes);
  if (r.get_string(kMagic.size()) != kMagic) {
    throw DecodeError(DecodeFailure::kBadMagic, "not a BFM stream (bad magic)");
  }
  const auto version = r.get<std::uint16_t>();
  if (version != kBfmVersion) {
    throw DecodeError(DecodeFailure::kVersionMismatch,
                      "unsupported BFM version " + std::to_string(version));
  }
  const auto kind = r.get<std::uint8_t>();
  const auto return_period = r.get<std::uint16_t>();
  const auto threshold = r.get<float>();

  LayerSource source;
  if (kind == kKindInland) {
    if (!is_valid_return_period(return_period)) {
      throw DecodeError(DecodeFailure::kMalformed,
                        "invalid return period " + std::to_string(return_period));
    }
    source = InlandSource{return_period};
  } else if (kind == kKindCoastal) {
    if (return_period != 0) {
      throw DecodeError(DecodeFailure::kMalformed, "coastal layer with non-zero return period");
    }
    source = CoastalSource{};
  } else {
    throw DecodeError(DecodeFailure::kMalformed, "unknown source kind " + std::to_string(kind));
  }
  if (!std::isfinite(threshold) || threshold < 0.0f) {
    throw DecodeError(DecodeFailure::kMalformed, "threshold must be finite and >= 0");
  }

  GeoRef g;
  g.width = r.get<std::uint32_t>();
  g.height = r.get<std::uint32_t>();
  g.origin_lon = r.get<double>();
  g.origin_lat = r.get<double>();
  g.cell_size_deg = r.get<double>();
  try {
    g.validate();
  } catch (const ArgumentError& e) {
    throw DecodeError(DecodeFailure::kMalformed, e.what());
  }

  const auto run_count = r.get<std::uint32_t>();
  if (static_cast<std::size_t>(run_count) * sizeof(std::uint32_t) > r.remaining()) {
    throw DecodeError(DecodeFailure::kTruncated, "run table shorter than run_count");
  }
  std::vector<std::uint32_t> runs(run_count);
  r.get_array(std::span<std::uint32_t>(runs));
  if (r.remaining() != 0) {
    throw DecodeError(DecodeFailure::kMalformed, "trailing bytes after run table");
  }

  std::uint64_t total = 0;
  for (auto run : runs) total += run;
  if (total != g.cell_count()) {
    throw DecodeError(DecodeFailure::kRunLengthMismatch,
                      "run lengths sum to " + std::to_string(total) + ", expected " +
                          std::to_string(g.cell_count()));
  }

  std::vector<bool> bits;
  bits.reserve(g.cell_count());
  bool value = false;
  for (auto run : runs) {
    bits.insert(bits.end(), run, value);
    value = !value;
  }
  return {g, std::move(bits), std::move(source), threshold};
}

void save_bfm(const BinaryFloodMap& map, const std::string& path) {
  detail::write_file(path, encode_bfm(map));
}

BinaryFloodMap load_bfm(const std::string& path) {
  const auto bytes = detail::read_file(path);
  return decode_bfm(bytes);
}

}  // namespace floodsight
