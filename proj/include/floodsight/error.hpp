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
 * @brief Exception hierarchy shared by every floodsight module. The C API
 * translates each class into a distinct status code.
 */

#ifndef FLOODSIGHT_ERROR_HPP
#define FLOODSIGHT_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace floodsight {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ArgumentError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Raised by the ASCII-grid reader. line() is 1-based; 0 when the problem is
/// not tied to a line (e.g. a missing header key at end of input).
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  [[nodiscard]] std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class ExtentError : public Error {
 public:
  ExtentError(double lat, double lon, const std::string& what)
      : Error(what + " (lat " + std::to_string(lat) + ", lon " +
              std::to_string(lon) + ")"),
        lat_(lat),
        lon_(lon) {}
  [[nodiscard]] double lat() const noexcept { return lat_; }
  [[nodiscard]] double lon() const noexcept { return lon_; }

 private:
  double lat_;
  double lon_;
};

enum class DecodeFailure {
  kBadMagic,
  kVersionMismatch,
  kTruncated,
  kRunLengthMismatch,
  kShapeMismatch,
  kMalformed,
};

class DecodeError : public Error {
 public:
  DecodeError(DecodeFailure kind, const std::string& what)
      : Error(what), kind_(kind) {}
  [[nodiscard]] DecodeFailure kind() const noexcept { return kind_; }

 private:
  DecodeFailure kind_;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class TrainingError : public Error {
 public:
  using Error::Error;
};

class NotFoundError : public Error {
 public:
  using Error::Error;
};

class UpstreamError : public Error {
 public:
  UpstreamError(std::string provider, const std::string& what)
      : Error(provider + ": " + what), provider_(std::move(provider)) {}
  [[nodiscard]] const std::string& provider() const noexcept {
    return provider_;
  }

 private:
  std::string provider_;
};

class ImageryError : public Error {
 public:
  using Error::Error;
};

}  // namespace floodsight

#endif  // FLOODSIGHT_ERROR_HPP
