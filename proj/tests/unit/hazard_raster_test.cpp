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

#include <gtest/gtest.h>

#include <cstdio>
#include <random>
#include <sstream>

#include "floodsight/error.hpp"
#include "floodsight/hazard_raster.hpp"

using namespace floodsight;

namespace {

constexpr double kNoData = -9999.0;

// Independent writer used as the round-trip oracle for the parser.
std::string write_ascii_grid(const HazardRaster& r) {
  std::ostringstream out;
  char buf[64];
  out << "ncols " << r.georef.width << "\nnrows " << r.georef.height << "\n";
  std::snprintf(buf, sizeof(buf), "%.17g", r.georef.origin_lon);
  out << "xllcorner " << buf << "\n";
  std::snprintf(buf, sizeof(buf), "%.17g", r.georef.south_lat());
  out << "yllcorner " << buf << "\n";
  std::snprintf(buf, sizeof(buf), "%.17g", r.georef.cell_size_deg);
  out << "cellsize " << buf << "\nNODATA_value " << r.nodata << "\n";
  for (std::uint32_t row = 0; row < r.georef.height; ++row) {
    for (std::uint32_t col = 0; col < r.georef.width; ++col) {
      std::snprintf(buf, sizeof(buf), "%.17g", r.values[row * r.georef.width + col]);
      out << (col ? " " : "") << buf;
    }
    out << "\n";
  }
  return out.str();
}

HazardRaster random_raster(std::mt19937_64& rng, std::uint32_t w, std::uint32_t h,
                           double cell = 0.5, double max_value = 1.0) {
  HazardRaster r;
  r.georef = {-10.0, 40.0, cell, w, h};
  r.nodata = kNoData;
  std::uniform_real_distribution<double> value(0.0, max_value);
  std::bernoulli_distribution missing(0.1);
  for (std::size_t i = 0; i < r.georef.cell_count(); ++i) {
    r.values.push_back(missing(rng) ? kNoData : value(rng));
  }
  return r;
}

std::vector<bool> brute_force_bits(const HazardRaster& r, double threshold) {
  std::vector<bool> bits;
  for (std::uint32_t row = 0; row < r.georef.height; ++row) {
    for (std::uint32_t col = 0; col < r.georef.width; ++col) {
      const double v = r.values[row * r.georef.width + col];
      bits.push_back(v != r.nodata && v > threshold);
    }
  }
  return bits;
}

BinaryFloodMap random_map(std::mt19937_64& rng, std::uint32_t w, std::uint32_t h,
                          bool coastal, double density = 0.3) {
  std::bernoulli_distribution bit(density);
  std::vector<bool> bits(static_cast<std::size_t>(w) * h);
  for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = bit(rng);
  GeoRef g{-10.0, 40.0, 0.5, w, h};
  if (coastal) return {g, bits, CoastalSource{}, 0.2f};
  return {g, bits, InlandSource{50}, 0.0f};
}

HazardRaster single_value(double v) {
  HazardRaster r;
  r.georef = {0.0, 1.0, 1.0, 1, 1};
  r.values = {v};
  return r;
}

}  // namespace

// ----------------------------------------------------------- parsing

TEST(ParseAsciiGrid, HeaderArithmetic) {
  const auto r = parse_ascii_grid(
      "ncols 2\nnrows 1\nxllcorner 0\nyllcorner 0\ncellsize 1\nNODATA_value -9999\n0.5 -9999\n");
  EXPECT_EQ(r.georef.width, 2u);
  EXPECT_EQ(r.georef.height, 1u);
  EXPECT_DOUBLE_EQ(r.georef.origin_lon, 0.0);
  EXPECT_DOUBLE_EQ(r.georef.origin_lat, 1.0);
  ASSERT_EQ(r.values.size(), 2u);
  EXPECT_DOUBLE_EQ(r.values[0], 0.5);
  EXPECT_TRUE(r.is_nodata(1));
}

TEST(ParseAsciiGrid, ZerosAndCaseInsensitiveAnyOrder) {
  const auto r = parse_ascii_grid(
      "CELLSIZE 0.5\nNRows 3\nXLLCORNER 10\nncols 3\nyllcorner -5\n"
      "0 0 0\n0 0 0\n0 0 0\n");
  EXPECT_EQ(r.values, std::vector<double>(9, 0.0));
  EXPECT_DOUBLE_EQ(r.georef.origin_lat, -3.5);
}

TEST(ParseAsciiGrid, RandomRoundTripAgainstIndependentWriter) {
  std::mt19937_64 rng(7);
  const auto src = random_raster(rng, 20, 20);
  const auto parsed = parse_ascii_grid(write_ascii_grid(src));
  EXPECT_EQ(parsed.georef.width, src.georef.width);
  EXPECT_EQ(parsed.georef.height, src.georef.height);
  EXPECT_DOUBLE_EQ(parsed.georef.origin_lon, src.georef.origin_lon);
  EXPECT_DOUBLE_EQ(parsed.georef.origin_lat, src.georef.origin_lat);
  EXPECT_EQ(parsed.nodata, src.nodata);
  EXPECT_EQ(parsed.values, src.values);
}

TEST(ParseAsciiGrid, ErrorsNameTheLine) {
  const std::string header =
      "ncols 2\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 1\nNODATA_value -9999\n";
  try {
    (void)parse_ascii_grid(header + "1 2\n1 x\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 8u);
    EXPECT_NE(std::string(e.what()).find("non-numeric"), std::string::npos);
  }
  try {
    (void)parse_ascii_grid(header + "1 2\n1 2 3\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 8u);
  }
  try {
    (void)parse_ascii_grid(header + "1 2\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("data rows"), std::string::npos);
  }
  try {
    (void)parse_ascii_grid("ncols 2\nbogus 3\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  EXPECT_THROW((void)parse_ascii_grid("ncols 1\nnrows 1\n1\n"), ParseError);
  EXPECT_THROW((void)parse_ascii_grid(header + "1 2\n1 2\n3 4\n"), ParseError);
  EXPECT_THROW((void)parse_ascii_grid(header + "1 nan\n1 2\n"), ParseError);
}

// ------------------------------------------------------- binarization

TEST(Binarize, InlandPositiveDepthAndNoData) {
  EXPECT_TRUE(binarize_inland(single_value(0.5), 0.0, 50).bits()[0]);
  EXPECT_FALSE(binarize_inland(single_value(kNoData), 0.0, 50).bits()[0]);
  EXPECT_FALSE(binarize_inland(single_value(0.0), 0.0, 50).bits()[0]);
}

TEST(Binarize, CoastalStrictExceedance) {
  EXPECT_TRUE(binarize_coastal(single_value(0.25), 0.20).bits()[0]);
  EXPECT_FALSE(binarize_coastal(single_value(0.20), 0.20).bits()[0]);
  EXPECT_FALSE(binarize_coastal(single_value(0.15), 0.20).bits()[0]);
  EXPECT_FLOAT_EQ(binarize_coastal(single_value(0.25)).threshold_m(), 0.2f);
}

TEST(Binarize, MatchesBruteForceLoop) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const auto r = random_raster(rng, 50, 50);
    EXPECT_EQ(binarize_inland(r, 0.1, 20).bits(), brute_force_bits(r, 0.1));
    EXPECT_EQ(binarize_coastal(r, 0.2).bits(), brute_force_bits(r, 0.2));
  }
}

TEST(Binarize, MonotoneInThreshold) {
  std::mt19937_64 rng(12);
  const auto r = random_raster(rng, 30, 30);
  std::uniform_real_distribution<double> t(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    double t1 = t(rng), t2 = t(rng);
    if (t1 > t2) std::swap(t1, t2);
    const auto low = binarize_inland(r, t1, 10).bits();
    const auto high = binarize_inland(r, t2, 10).bits();
    for (std::size_t i = 0; i < low.size(); ++i) EXPECT_FALSE(high[i] && !low[i]);
  }
}

TEST(Binarize, RejectsBadArguments) {
  EXPECT_THROW((void)binarize_inland(single_value(1.0), -0.1, 50), ArgumentError);
  EXPECT_THROW((void)binarize_inland(single_value(1.0), 0.0, 25), ArgumentError);
}

// ----------------------------------------------------------- queries

TEST(CellOf, FloorArithmetic) {
  const GeoRef g{-180.0, 90.0, 1.0, 360, 180};
  EXPECT_EQ(cell_of(g, 89.5, -179.5), (Cell{0, 0}));
  EXPECT_EQ(cell_of(g, 0.5, 0.5), (Cell{89, 180}));
  EXPECT_EQ(cell_of(g, 90.0, 0.0), (Cell{0, 180}));
  EXPECT_THROW((void)cell_of(g, 0.0, 180.0), ExtentError);
  EXPECT_THROW((void)cell_of(g, -90.0, 0.0), ExtentError);
  try {
    (void)cell_of(g, 91.0, 3.0);
  } catch (const ExtentError& e) {
    EXPECT_DOUBLE_EQ(e.lat(), 91.0);
    EXPECT_DOUBLE_EQ(e.lon(), 3.0);
  }
}

TEST(CellOf, AgreesWithBoundingBoxScan) {
  const GeoRef g{-3.0, 12.0, 0.5, 10, 10};
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> lon(g.origin_lon, g.east_lon());
  std::uniform_real_distribution<double> lat(g.south_lat(), g.origin_lat);
  for (int i = 0; i < 1000; ++i) {
    const double la = i == 0 ? g.origin_lat : lat(rng);
    const double lo = lon(rng);
    if (!g.contains(la, lo)) continue;
    int hits = 0;
    Cell found{};
    for (std::uint32_t r = 0; r < g.height; ++r) {
      for (std::uint32_t c = 0; c < g.width; ++c) {
        const double west = g.origin_lon + c * g.cell_size_deg;
        const double north = g.origin_lat - r * g.cell_size_deg;
        if (lo >= west && lo < west + g.cell_size_deg && la <= north &&
            la > north - g.cell_size_deg) {
          ++hits;
          found = {r, c};
        }
      }
    }
    ASSERT_EQ(hits, 1);
    EXPECT_EQ(cell_of(g, la, lo), found);
  }
}

TEST(Query, SingleBitAndAllZero) {
  GeoRef g{0.0, 10.0, 1.0, 10, 10};
  std::vector<bool> bits(100, false);
  const BinaryFloodMap empty(g, bits, InlandSource{50}, 0.0f);
  EXPECT_FALSE(query(empty, 5.5, 5.5));
  bits[3 * 10 + 7] = true;
  const BinaryFloodMap one(g, bits, InlandSource{50}, 0.0f);
  EXPECT_TRUE(query(one, 10.0 - 3.5, 7.5));
  EXPECT_FALSE(query(one, 10.0 - 3.5, 6.5));
}

TEST(Query, MatchesDirectIndexing) {
  std::mt19937_64 rng(5);
  const auto map = random_map(rng, 40, 30, false);
  const GeoRef& g = map.georef();
  std::uniform_real_distribution<double> lon(g.origin_lon, g.east_lon());
  std::uniform_real_distribution<double> lat(g.south_lat() + 1e-9, g.origin_lat);
  for (int i = 0; i < 200; ++i) {
    const double la = lat(rng), lo = lon(rng);
    const auto r = static_cast<std::size_t>((g.origin_lat - la) / g.cell_size_deg);
    const auto c = static_cast<std::size_t>((lo - g.origin_lon) / g.cell_size_deg);
    EXPECT_EQ(query(map, la, lo), static_cast<bool>(map.bits()[r * g.width + c]));
  }
}

TEST(QueryCombined, TruthTable) {
  const GeoRef g{0.0, 1.0, 1.0, 1, 1};
  const BinaryFloodMap in0(g, {false}, InlandSource{50}, 0.0f);
  const BinaryFloodMap in1(g, {true}, InlandSource{50}, 0.0f);
  const BinaryFloodMap co0(g, {false}, CoastalSource{}, 0.2f);
  const BinaryFloodMap co1(g, {true}, CoastalSource{}, 0.2f);
  EXPECT_EQ(query_combined(&in0, &co0, 0.5, 0.5), FloodStatus::kNone);
  EXPECT_EQ(query_combined(&in1, &co0, 0.5, 0.5), FloodStatus::kInland);
  EXPECT_EQ(query_combined(&in0, &co1, 0.5, 0.5), FloodStatus::kCoastal);
  EXPECT_EQ(query_combined(&in1, &co1, 0.5, 0.5), FloodStatus::kBoth);
  EXPECT_EQ(query_combined(&in1, nullptr, 0.5, 0.5), FloodStatus::kInland);
  EXPECT_THROW((void)query_combined(&in1, &co1, 5.0, 5.0), ExtentError);
}

TEST(QueryCombined, DifferentGridsOutOfExtentCountsAsZero) {
  const BinaryFloodMap inland(GeoRef{0.0, 2.0, 1.0, 2, 2}, {true, true, true, true},
                              InlandSource{100}, 0.0f);
  const BinaryFloodMap coastal(GeoRef{1.0, 2.0, 0.25, 8, 8}, std::vector<bool>(64, true),
                               CoastalSource{}, 0.2f);
  EXPECT_EQ(query_combined(&inland, &coastal, 1.5, 0.5), FloodStatus::kInland);
  EXPECT_EQ(query_combined(&inland, &coastal, 1.5, 1.5), FloodStatus::kBoth);
  EXPECT_EQ(query_combined(&inland, &coastal, 1.5, 2.5), FloodStatus::kCoastal);
}

TEST(QueryCombined, EqualsCompositionOfSingleQueries) {
  std::mt19937_64 rng(9);
  const auto inland = random_map(rng, 20, 20, false);
  const auto coastal = random_map(rng, 20, 20, true);
  const GeoRef& g = inland.georef();
  std::uniform_real_distribution<double> lon(g.origin_lon, g.east_lon());
  std::uniform_real_distribution<double> lat(g.south_lat() + 1e-9, g.origin_lat);
  for (int i = 0; i < 100; ++i) {
    const double la = lat(rng), lo = lon(rng);
    const bool a = query(inland, la, lo), b = query(coastal, la, lo);
    const FloodStatus expected = a && b ? FloodStatus::kBoth
                                 : a    ? FloodStatus::kInland
                                 : b    ? FloodStatus::kCoastal
                                        : FloodStatus::kNone;
    EXPECT_EQ(query_combined(&inland, &coastal, la, lo), expected);
  }
}

TEST(RegionGrid, SingleCellAndAllZero) {
  const GeoRef g{0.0, 4.0, 1.0, 4, 4};
  std::vector<bool> inland_bits(16, false), coastal_bits(16, false);
  inland_bits[1 * 4 + 2] = coastal_bits[1 * 4 + 2] = true;
  const BinaryFloodMap inland(g, inland_bits, InlandSource{50}, 0.0f);
  const BinaryFloodMap coastal(g, coastal_bits, CoastalSource{}, 0.2f);
  const auto one = region_grid(&inland, &coastal, {2.0, 3.0, 2.0, 3.0}, 1);
  ASSERT_EQ(one.rows, 1u);
  ASSERT_EQ(one.cols, 1u);
  EXPECT_EQ(one.at(0, 0), FloodStatus::kBoth);

  const BinaryFloodMap zeros(g, std::vector<bool>(16, false), InlandSource{50}, 0.0f);
  const auto grid = region_grid(&zeros, nullptr, {0.0, 4.0, 0.0, 4.0}, 16);
  EXPECT_EQ(grid.rows, 4u);  // never finer than the grid
  for (auto s : grid.cells) EXPECT_EQ(s, FloodStatus::kNone);
}

TEST(RegionGrid, EqualsPerPointQueryLoop) {
  std::mt19937_64 rng(21);
  const auto inland = random_map(rng, 20, 20, false);
  const auto coastal = random_map(rng, 20, 20, true);
  const BBox box{33.0, 39.0, -9.0, -2.0};
  const auto grid = region_grid(&inland, &coastal, box, 8);
  ASSERT_EQ(grid.rows, 8u);
  ASSERT_EQ(grid.cols, 8u);
  for (std::uint32_t r = 0; r < 8; ++r) {
    for (std::uint32_t c = 0; c < 8; ++c) {
      const double lat = box.lat_max - (r + 0.5) * (box.lat_max - box.lat_min) / 8;
      const double lon = box.lon_min + (c + 0.5) * (box.lon_max - box.lon_min) / 8;
      EXPECT_EQ(grid.at(r, c), query_combined(&inland, &coastal, lat, lon));
    }
  }
}

TEST(RegionGrid, OutsideExtentIsNoneAndEmptyIntersectionThrows) {
  const BinaryFloodMap map(GeoRef{0.0, 1.0, 1.0, 1, 1}, {true}, InlandSource{50}, 0.0f);
  const auto grid = region_grid(&map, nullptr, {0.0, 1.0, 0.0, 2.0}, 2);
  ASSERT_EQ(grid.cols, 2u);
  EXPECT_EQ(grid.at(0, 0), FloodStatus::kInland);
  EXPECT_EQ(grid.at(0, 1), FloodStatus::kNone);
  EXPECT_THROW((void)region_grid(&map, nullptr, {10.0, 11.0, 10.0, 11.0}, 4), ExtentError);
  EXPECT_THROW((void)region_grid(&map, nullptr, {1.0, 0.0, 0.0, 1.0}, 4), ArgumentError);
  EXPECT_THROW((void)region_grid(&map, nullptr, {0.0, 1.0, 0.0, 1.0}, 0), ArgumentError);
}

// --------------------------------------------------------------- BFM

TEST(Bfm, RunLengthsCanonical) {
  EXPECT_EQ(run_lengths({false, false, false, false}), (std::vector<std::uint32_t>{4}));
  EXPECT_EQ(run_lengths({false, true, true, false}), (std::vector<std::uint32_t>{1, 2, 1}));
  EXPECT_EQ(run_lengths({true, true, false, false}), (std::vector<std::uint32_t>{0, 2, 2}));
}

TEST(Bfm, HeaderLayout) {
  const BinaryFloodMap map(GeoRef{0.0, 2.0, 1.0, 2, 2}, {false, true, true, false},
                           InlandSource{20}, 0.0f);
  const auto bytes = encode_bfm(map);
  ASSERT_EQ(bytes.size(), 4u + 2 + 1 + 2 + 4 + 4 + 4 + 8 * 3 + 4 + 3 * 4);
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "BFM1");
  EXPECT_EQ(bytes[4], 1);
  EXPECT_EQ(bytes[5], 0);
  EXPECT_EQ(bytes[6], 0);   // inland
  EXPECT_EQ(bytes[7], 20);  // return period, little-endian
  const std::size_t runs_at = bytes.size() - 3 * 4;
  EXPECT_EQ(bytes[runs_at - 4], 3);  // run_count
  EXPECT_EQ(bytes[runs_at], 1);
  EXPECT_EQ(bytes[runs_at + 4], 2);
  EXPECT_EQ(bytes[runs_at + 8], 1);
}

TEST(Bfm, RandomRoundTripIsBitExactAndDeterministic) {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<std::uint32_t> dim(1, 64);
  std::uniform_real_distribution<double> density(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const auto map = random_map(rng, dim(rng), dim(rng), i % 2 == 0, density(rng));
    const auto bytes = encode_bfm(map);
    EXPECT_EQ(decode_bfm(bytes), map);
    EXPECT_EQ(encode_bfm(map), bytes);
  }
}

TEST(Bfm, DistinctDecodeErrors) {
  const BinaryFloodMap map(GeoRef{0.0, 2.0, 1.0, 2, 2}, {false, true, true, false},
                           CoastalSource{}, 0.2f);
  const auto good = encode_bfm(map);
  auto expect_failure = [](std::vector<std::uint8_t> bytes, DecodeFailure kind) {
    try {
      (void)decode_bfm(bytes);
      ADD_FAILURE() << "decode accepted a corrupt stream";
    } catch (const DecodeError& e) {
      EXPECT_EQ(e.kind(), kind) << e.what();
    }
  };
  auto bad = good;
  bad[0] = 'X';
  expect_failure(bad, DecodeFailure::kBadMagic);
  bad = good;
  bad[4] = 2;
  expect_failure(bad, DecodeFailure::kVersionMismatch);
  expect_failure({good.begin(), good.end() - 1}, DecodeFailure::kTruncated);
  expect_failure({good.begin(), good.begin() + 10}, DecodeFailure::kTruncated);
  bad = good;
  bad[bad.size() - 4] = 9;  // last run
  expect_failure(bad, DecodeFailure::kRunLengthMismatch);
  bad = good;
  bad[6] = 7;  // source kind
  expect_failure(bad, DecodeFailure::kMalformed);
}
