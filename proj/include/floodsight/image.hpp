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
 * @brief RGB images, resizing, augmentation, PNG I/O and the synthetic
 * grass/water domains used for desk-scale training.
 */

#ifndef FLOODSIGHT_IMAGE_HPP
#define FLOODSIGHT_IMAGE_HPP

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace floodsight {

/// H x W x 3, row-major, interleaved RGB, every value in [0,1].
class Image {
 public:
  static constexpr std::uint32_t kChannels = 3;

  Image() = default;
  Image(std::uint32_t height, std::uint32_t width, float fill = 0.0f);

  [[nodiscard]] std::uint32_t height() const noexcept { return height_; }
  [[nodiscard]] std::uint32_t width() const noexcept { return width_; }
  [[nodiscard]] std::span<const float> data() const noexcept { return data_; }
  [[nodiscard]] std::span<float> data() noexcept { return data_; }

  [[nodiscard]] float at(std::uint32_t y, std::uint32_t x, std::uint32_t c) const {
    return data_[(static_cast<std::size_t>(y) * width_ + x) * kChannels + c];
  }
  float& at(std::uint32_t y, std::uint32_t x, std::uint32_t c) {
    return data_[(static_cast<std::size_t>(y) * width_ + x) * kChannels + c];
  }

  bool operator==(const Image&) const = default;

 private:
  std::uint32_t height_ = 0;
  std::uint32_t width_ = 0;
  std::vector<float> data_;
};

using Rng = std::mt19937_64;

/// Bilinear, corner-aligned. Throws ArgumentError on a zero dimension.
[[nodiscard]] Image resize(const Image& img, std::uint32_t out_h, std::uint32_t out_w);
[[nodiscard]] Image crop(const Image& img, std::uint32_t y0, std::uint32_t x0,
                         std::uint32_t h, std::uint32_t w);
[[nodiscard]] Image hflip(const Image& img);
/// Rotates about the image centre, bilinear sampling with reflect padding.
[[nodiscard]] Image rotate(const Image& img, double degrees);

struct AugmentSpec {
  double crop_fraction_min = 0.75;
  double crop_fraction_max = 0.95;
  double hflip_prob = 0.5;
  double rotation_max_deg = 10.0;  // angle drawn from [-max, +max]
  std::uint64_t seed = 0;

  void validate() const;
  /// crop 1.0, no flip, no rotation.
  static AugmentSpec identity();
};

/// crop -> resize back -> optional flip -> rotation. Always consumes the same
/// number of draws from rng, whatever the spec, so streams stay aligned.
[[nodiscard]] Image augment(const Image& img, const AugmentSpec& spec, Rng& rng);

/// Each original followed by (factor - 1) augmented variants.
[[nodiscard]] std::vector<Image> expand_dataset(const std::vector<Image>& imgs,
                                                std::uint32_t factor,
                                                const AugmentSpec& spec, Rng& rng);

enum class SyntheticDomain { kGrass, kWater };

/// Sky gradient with a house in the upper half; grass (green-dominant) or
/// rippled water (blue-dominant) in the lower half. size >= 16.
[[nodiscard]] Image synth_image(SyntheticDomain domain, std::uint32_t size,
                                std::uint64_t seed);

/// mean(B) - mean(G) over the lower half of the image.
[[nodiscard]] double lower_half_blue_excess(const Image& img);
/// Blue-dominance oracle: true when the lower half reads as water.
[[nodiscard]] bool looks_flooded(const Image& img);

// PNG

[[nodiscard]] Image load_png(std::span<const std::uint8_t> bytes);
[[nodiscard]] std::vector<std::uint8_t> save_png(const Image& img);
[[nodiscard]] Image load_png_file(const std::string& path);
void save_png_file(const Image& img, const std::string& path);

/// All *.png files in dir, sorted by file name, resized to size x size.
[[nodiscard]] std::vector<Image> load_image_dir(const std::string& dir, std::uint32_t size);

/// Writes trainX/trainY/testX/testY under root: Grass in X, Water in Y.
void write_synthetic_dataset(const std::string& root, std::uint32_t n_train,
                             std::uint32_t n_test, std::uint32_t size, std::uint64_t seed);

}  // namespace floodsight

#endif  // FLOODSIGHT_IMAGE_HPP
