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
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "floodsight/error.hpp"
#include "floodsight/hazard_raster.hpp"

namespace floodsight {

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

std::optional<double> to_number(std::string_view token) {
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size() || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool is_header_line(std::string_view first_token) {
  return std::isalpha(static_cast<unsigned char>(first_token.front())) != 0 &&
         !to_number(first_token).has_value();
}

}  // namespace

HazardRaster parse_ascii_grid(std::istream& in) {
  static const char* const kRequired[] = {"ncols", "nrows", "xllcorner", "yllcorner",
                                          "cellsize"};
  std::map<std::string, double> header;
  std::size_t header_end_line = 0;

  std::string line;
  std::size_t line_no = 0;
  HazardRaster raster;
  std::size_t ncols = 0;
  std::size_t nrows = 0;
  std::size_t rows_read = 0;
  bool in_data = false;

  auto finish_header = [&]() {
    for (const char* key : kRequired) {
      if (header.find(key) == header.end()) {
        throw ParseError(header_end_line, std::string("missing header key '") + key + "'");
      }
    }
    const double nc = header["ncols"];
    const double nr = header["nrows"];
    if (nc < 1 || nr < 1 || nc != std::floor(nc) || nr != std::floor(nr) ||
        nc > 1e8 || nr > 1e8) {
      throw ParseError(header_end_line, "ncols/nrows must be positive integers");
    }
    ncols = static_cast<std::size_t>(nc);
    nrows = static_cast<std::size_t>(nr);
    raster.georef.width = static_cast<std::uint32_t>(ncols);
    raster.georef.height = static_cast<std::uint32_t>(nrows);
    raster.georef.cell_size_deg = header["cellsize"];
    raster.georef.origin_lon = header["xllcorner"];
    raster.georef.origin_lat = header["yllcorner"] + nr * header["cellsize"];
    if (auto it = header.find("nodata_value"); it != header.end()) raster.nodata = it->second;
    try {
      raster.georef.validate();
    } catch (const ArgumentError& e) {
      throw ParseError(header_end_line, e.what());
    }
    raster.values.reserve(ncols * nrows);
    in_data = true;
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto tokens = split_ws(line);
    if (tokens.empty()) continue;

    if (!in_data && is_header_line(tokens.front())) {
      const std::string key = lower(tokens.front());
      static const char* const kKnown[] = {"ncols",    "nrows",   "xllcorner",
                                           "yllcorner", "cellsize", "nodata_value"};
      if (std::find(std::begin(kKnown), std::end(kKnown), key) == std::end(kKnown)) {
        throw ParseError(line_no, "malformed header key '" + std::string(tokens.front()) + "'");
      }
      if (tokens.size() != 2) {
        throw ParseError(line_no, "header key '" + key + "' expects exactly one value");
      }
      auto value = to_number(tokens[1]);
      if (!value) {
        throw ParseError(line_no, "non-numeric value for header key '" + key + "'");
      }
      if (!header.emplace(key, *value).second) {
        throw ParseError(line_no, "duplicate header key '" + key + "'");
      }
      header_end_line = line_no;
      continue;
    }

    if (!in_data) finish_header();
    if (rows_read == nrows) {
      throw ParseError(line_no, "more data rows than nrows = " + std::to_string(nrows));
    }
    if (tokens.size() != ncols) {
      throw ParseError(line_no, "expected " + std::to_string(ncols) + " cells, found " +
                                    std::to_string(tokens.size()));
    }
    for (auto token : tokens) {
      auto value = to_number(token);
      if (!value) {
        throw ParseError(line_no, "non-numeric cell '" + std::string(token) + "'");
      }
      raster.values.push_back(*value);
    }
    ++rows_read;
  }

  if (!in_data) finish_header();
  if (rows_read != nrows) {
    throw ParseError(line_no, "expected " + std::to_string(nrows) + " data rows, found " +
                                  std::to_string(rows_read));
  }
  return raster;
}

HazardRaster parse_ascii_grid(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_ascii_grid(in);
}

HazardRaster load_ascii_grid(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return parse_ascii_grid(in);
}

}  // namespace floodsight
