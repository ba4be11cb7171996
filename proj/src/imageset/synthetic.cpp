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
#include <cstdio>
#include <filesystem>
#include <numbers>

#include "floodsight/error.hpp"
#include "floodsight/image.hpp"

namespace floodsight {

namespace {

struct Rgb {
  float r, g, b;
};

void put(Image& img, std::uint32_t y, std::uint32_t x, Rgb c) {
  img.at(y, x, 0) = std::clamp(c.r, 0.0f, 1.0f);
  img.at(y, x, 1) = std::clamp(c.g, 0.0f, 1.0f);
  img.at(y, x, 2) = std::clamp(c.b, 0.0f, 1.0f);
}

void paint_sky_and_house(Image& img, Rng& rng) {
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  const std::uint32_t size = img.height();
  const std::uint32_t horizon = size / 2;
  for (std::uint32_t y = 0; y < horizon; ++y) {
    const float t = static_cast<float>(y) / std::max<std::uint32_t>(horizon - 1, 1);
    const Rgb sky{0.45f + 0.30f * t, 0.65f + 0.20f * t, 0.95f + 0.03f * t};
    for (std::uint32_t x = 0; x < size; ++x) put(img, y, x, sky);
  }

  const auto house_w = static_cast<std::uint32_t>(size * (0.25f + 0.25f * u(rng)));
  const auto house_h = static_cast<std::uint32_t>(horizon * (0.35f + 0.35f * u(rng)));
  const auto left = static_cast<std::uint32_t>((size - house_w) * u(rng));
  const std::uint32_t top = horizon - house_h;
  const Rgb wall{0.60f + 0.30f * u(rng), 0.30f + 0.30f * u(rng), 0.20f + 0.20f * u(rng)};
  const Rgb roof{0.30f, 0.15f, 0.10f};
  const Rgb window{0.15f, 0.20f, 0.30f};
  const std::uint32_t roof_rows = std::max<std::uint32_t>(1, house_h / 4);
  for (std::uint32_t y = top; y < horizon; ++y) {
    for (std::uint32_t x = left; x < left + house_w; ++x) {
      const std::uint32_t ry = y - top;
      const std::uint32_t rx = x - left;
      Rgb c = ry < roof_rows ? roof : wall;
      if (ry >= roof_rows + 1 && ry < roof_rows + 1 + std::max<std::uint32_t>(1, house_h / 4) &&
          rx >= house_w / 4 && rx < house_w / 4 + std::max<std::uint32_t>(1, house_w / 5)) {
        c = window;
      }
      put(img, y, x, c);
    }
  }
}

void paint_grass(Image& img, Rng& rng) {
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  std::uniform_real_distribution<float> noise(-0.04f, 0.04f);
  const Rgb base{0.25f + 0.15f * u(rng), 0.55f + 0.20f * u(rng), 0.10f + 0.10f * u(rng)};
  for (std::uint32_t y = img.height() / 2; y < img.height(); ++y) {
    for (std::uint32_t x = 0; x < img.width(); ++x) {
      put(img, y, x, {base.r + noise(rng), base.g + noise(rng), base.b + noise(rng)});
    }
  }
}

void paint_water(Image& img, Rng& rng) {
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  std::uniform_real_distribution<float> noise(-0.02f, 0.02f);
  const Rgb base{0.10f + 0.10f * u(rng), 0.30f + 0.08f * u(rng), 0.65f + 0.20f * u(rng)};
  const float period = 3.0f + 3.0f * u(rng);
  const float phase = 2.0f * std::numbers::pi_v<float> * u(rng);
  for (std::uint32_t y = img.height() / 2; y < img.height(); ++y) {
    const float ripple = 0.06f * std::sin(2.0f * std::numbers::pi_v<float> * y / period + phase);
    for (std::uint32_t x = 0; x < img.width(); ++x) {
      put(img, y, x,
          {base.r + ripple + noise(rng), base.g + ripple + noise(rng),
           base.b + ripple + noise(rng)});
    }
  }
}

}  // namespace

Image synth_image(SyntheticDomain domain, std::uint32_t size, std::uint64_t seed) {
  if (size < 16) throw ArgumentError("synth_image: size must be >= 16");
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(domain == SyntheticDomain::kGrass ? 0x6 : 0x7)};
  Rng rng(seq);
  Image img(size, size);
  paint_sky_and_house(img, rng);
  if (domain == SyntheticDomain::kGrass) {
    paint_grass(img, rng);
  } else {
    paint_water(img, rng);
  }
  return img;
}

double lower_half_blue_excess(const Image& img) {
  double sum = 0.0;
  std::size_t n = 0;
  for (std::uint32_t y = img.height() / 2; y < img.height(); ++y) {
    for (std::uint32_t x = 0; x < img.width(); ++x) {
      sum += static_cast<double>(img.at(y, x, 2)) - img.at(y, x, 1);
      ++n;
    }
  }
  return n ? sum / static_cast<double>(n) : 0.0;
}

bool looks_flooded(const Image& img) { return lower_half_blue_excess(img) > 0.0; }

void write_synthetic_dataset(const std::string& root, std::uint32_t n_train,
                             std::uint32_t n_test, std::uint32_t size, std::uint64_t seed) {
  namespace fs = std::filesystem;
  struct Split {
    const char* dir;
    SyntheticDomain domain;
    std::uint32_t count;
    std::uint64_t salt;
  };
  const Split splits[] = {{"trainX", SyntheticDomain::kGrass, n_train, 1},
                          {"trainY", SyntheticDomain::kWater, n_train, 2},
                          {"testX", SyntheticDomain::kGrass, n_test, 3},
                          {"testY", SyntheticDomain::kWater, n_test, 4}};
  for (const Split& s : splits) {
    const fs::path dir = fs::path(root) / s.dir;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
    for (std::uint32_t i = 0; i < s.count; ++i) {
      // splitmix-style mixing keeps per-image seeds well separated
      std::uint64_t z = seed + s.salt * 0x9E3779B97F4A7C15ULL + i * 0xBF58476D1CE4E5B9ULL;
      z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
      z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
      z ^= z >> 31;
      char name[32];
      std::snprintf(name, sizeof(name), "%05u.png", i);
      save_png_file(synth_image(s.domain, size, z), (dir / name).string());
    }
  }
}

}  // namespace floodsight
