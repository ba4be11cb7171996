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
#include <numbers>

#include "floodsight/error.hpp"
#include "floodsight/image.hpp"

namespace floodsight {

Image::Image(std::uint32_t height, std::uint32_t width, float fill)
    : height_(height), width_(width),
      data_(static_cast<std::size_t>(height) * width * kChannels, fill) {}

namespace {

float lerp2(float a, float b, float c, float d, double fy, double fx) {
  const double top = a * (1.0 - fx) + b * fx;
  const double bottom = c * (1.0 - fx) + d * fx;
  return static_cast<float>(std::clamp(top * (1.0 - fy) + bottom * fy, 0.0, 1.0));
}

// Bilinear sample at a coordinate already inside [0, n-1] on both axes.
void sample(const Image& img, double sy, double sx, float* out) {
  const auto y0 = static_cast<std::uint32_t>(std::floor(sy));
  const auto x0 = static_cast<std::uint32_t>(std::floor(sx));
  const std::uint32_t y1 = std::min(y0 + 1, img.height() - 1);
  const std::uint32_t x1 = std::min(x0 + 1, img.width() - 1);
  const double fy = sy - y0;
  const double fx = sx - x0;
  for (std::uint32_t c = 0; c < Image::kChannels; ++c) {
    out[c] = lerp2(img.at(y0, x0, c), img.at(y0, x1, c), img.at(y1, x0, c),
                   img.at(y1, x1, c), fy, fx);
  }
}

double reflect(double v, std::uint32_t n) {
  if (n == 1) return 0.0;
  const double period = 2.0 * (n - 1);
  v = std::fmod(std::abs(v), period);
  if (v > n - 1) v = period - v;
  return std::clamp(v, 0.0, static_cast<double>(n - 1));
}

double corner_aligned(std::uint32_t i, std::uint32_t in, std::uint32_t out) {
  if (out == 1) return (in - 1) / 2.0;
  return static_cast<double>(i) * (in - 1) / (out - 1);
}

}  // namespace

Image resize(const Image& img, std::uint32_t out_h, std::uint32_t out_w) {
  if (out_h == 0 || out_w == 0) throw ArgumentError("resize: output dimensions must be >= 1");
  if (img.height() == 0 || img.width() == 0) throw ArgumentError("resize: empty input image");
  if (out_h == img.height() && out_w == img.width()) return img;
  Image out(out_h, out_w);
  for (std::uint32_t y = 0; y < out_h; ++y) {
    const double sy = corner_aligned(y, img.height(), out_h);
    for (std::uint32_t x = 0; x < out_w; ++x) {
      sample(img, sy, corner_aligned(x, img.width(), out_w), &out.at(y, x, 0));
    }
  }
  return out;
}

Image crop(const Image& img, std::uint32_t y0, std::uint32_t x0, std::uint32_t h,
           std::uint32_t w) {
  if (h == 0 || w == 0 || y0 + h > img.height() || x0 + w > img.width()) {
    throw ArgumentError("crop: window outside image");
  }
  Image out(h, w);
  for (std::uint32_t y = 0; y < h; ++y) {
    const float* src =
        img.data().data() + (static_cast<std::size_t>(y0 + y) * img.width() + x0) * Image::kChannels;
    std::copy(src, src + static_cast<std::size_t>(w) * Image::kChannels, &out.at(y, 0, 0));
  }
  return out;
}

Image hflip(const Image& img) {
  Image out(img.height(), img.width());
  for (std::uint32_t y = 0; y < img.height(); ++y) {
    for (std::uint32_t x = 0; x < img.width(); ++x) {
      for (std::uint32_t c = 0; c < Image::kChannels; ++c) {
        out.at(y, img.width() - 1 - x, c) = img.at(y, x, c);
      }
    }
  }
  return out;
}

Image rotate(const Image& img, double degrees) {
  if (degrees == 0.0) return img;
  const double theta = degrees * std::numbers::pi / 180.0;
  const double cos_t = std::cos(theta);
  const double sin_t = std::sin(theta);
  const double cy = (img.height() - 1) / 2.0;
  const double cx = (img.width() - 1) / 2.0;
  Image out(img.height(), img.width());
  for (std::uint32_t y = 0; y < img.height(); ++y) {
    for (std::uint32_t x = 0; x < img.width(); ++x) {
      const double dy = y - cy;
      const double dx = x - cx;
      const double sx = reflect(cos_t * dx + sin_t * dy + cx, img.width());
      const double sy = reflect(-sin_t * dx + cos_t * dy + cy, img.height());
      sample(img, sy, sx, &out.at(y, x, 0));
    }
  }
  return out;
}

void AugmentSpec::validate() const {
  if (!(crop_fraction_min > 0.0) || !(crop_fraction_max <= 1.0) ||
      crop_fraction_min > crop_fraction_max) {
    throw ArgumentError("augment: crop fractions must satisfy 0 < min <= max <= 1");
  }
  if (!(hflip_prob >= 0.0 && hflip_prob <= 1.0)) {
    throw ArgumentError("augment: hflip_prob must lie in [0, 1]");
  }
  if (!(rotation_max_deg >= 0.0) || !std::isfinite(rotation_max_deg)) {
    throw ArgumentError("augment: rotation bound must be finite and >= 0");
  }
}

AugmentSpec AugmentSpec::identity() {
  AugmentSpec spec;
  spec.crop_fraction_min = 1.0;
  spec.crop_fraction_max = 1.0;
  spec.hflip_prob = 0.0;
  spec.rotation_max_deg = 0.0;
  return spec;
}

Image augment(const Image& img, const AugmentSpec& spec, Rng& rng) {
  spec.validate();
  if (img.height() < 8 || img.width() < 8) {
    throw ArgumentError("augment: image must be at least 8x8");
  }
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double u_crop = unit(rng);
  const double u_y = unit(rng);
  const double u_x = unit(rng);
  const double u_flip = unit(rng);
  const double u_rot = unit(rng);

  const double f =
      spec.crop_fraction_min + u_crop * (spec.crop_fraction_max - spec.crop_fraction_min);
  const auto side = [f](std::uint32_t n) {
    return std::clamp<std::uint32_t>(static_cast<std::uint32_t>(std::lround(f * n)), 1, n);
  };
  const std::uint32_t ch = side(img.height());
  const std::uint32_t cw = side(img.width());
  const auto offset = [](double u, std::uint32_t slack) {
    return std::min(static_cast<std::uint32_t>(u * (slack + 1)), slack);
  };
  Image out = crop(img, offset(u_y, img.height() - ch), offset(u_x, img.width() - cw), ch, cw);
  out = resize(out, img.height(), img.width());
  if (u_flip < spec.hflip_prob) out = hflip(out);
  const double angle = (2.0 * u_rot - 1.0) * spec.rotation_max_deg;
  return rotate(out, angle);
}

std::vector<Image> expand_dataset(const std::vector<Image>& imgs, std::uint32_t factor,
                                  const AugmentSpec& spec, Rng& rng) {
  if (factor < 1) throw ArgumentError("expand_dataset: factor must be >= 1");
  std::vector<Image> out;
  out.reserve(imgs.size() * factor);
  for (const Image& img : imgs) {
    out.push_back(img);
    for (std::uint32_t k = 1; k < factor; ++k) out.push_back(augment(img, spec, rng));
  }
  return out;
}

}  // namespace floodsight
