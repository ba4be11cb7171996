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

#include <png.h>

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "common/byte_io.hpp"
#include "floodsight/error.hpp"
#include "floodsight/image.hpp"

namespace floodsight {

Image load_png(std::span<const std::uint8_t> bytes) {
  png_image png{};
  png.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&png, bytes.data(), bytes.size())) {
    throw ImageryError(std::string("malformed PNG: ") + png.message);
  }
  // Read as RGBA so an alpha channel is dropped rather than composited.
  png.format = PNG_FORMAT_RGBA;
  std::vector<std::uint8_t> rgba(PNG_IMAGE_SIZE(png));
  if (!png_image_finish_read(&png, nullptr, rgba.data(), 0, nullptr)) {
    std::string msg = png.message;
    png_image_free(&png);
    throw ImageryError("malformed PNG: " + msg);
  }
  if (png.height == 0 || png.width == 0) throw ImageryError("malformed PNG: empty image");
  Image img(png.height, png.width);
  auto out = img.data();
  for (std::size_t p = 0; p < static_cast<std::size_t>(png.height) * png.width; ++p) {
    for (std::size_t c = 0; c < 3; ++c) out[p * 3 + c] = rgba[p * 4 + c] / 255.0f;
  }
  return img;
}

std::vector<std::uint8_t> save_png(const Image& img) {
  if (img.height() == 0 || img.width() == 0) throw ArgumentError("save_png: empty image");
  std::vector<std::uint8_t> rgb(img.data().size());
  std::transform(img.data().begin(), img.data().end(), rgb.begin(), [](float v) {
    return static_cast<std::uint8_t>(
        std::lround(std::clamp(static_cast<double>(v), 0.0, 1.0) * 255.0));
  });
  png_image png{};
  png.version = PNG_IMAGE_VERSION;
  png.width = img.width();
  png.height = img.height();
  png.format = PNG_FORMAT_RGB;
  png_alloc_size_t size = 0;
  if (!png_image_write_get_memory_size(png, size, 0, rgb.data(), 0, nullptr)) {
    throw Error(std::string("PNG encode failed: ") + png.message);
  }
  std::vector<std::uint8_t> out(size);
  if (!png_image_write_to_memory(&png, out.data(), &size, 0, rgb.data(), 0, nullptr)) {
    throw Error(std::string("PNG encode failed: ") + png.message);
  }
  out.resize(size);
  return out;
}

Image load_png_file(const std::string& path) {
  std::vector<std::uint8_t> bytes;
  try {
    bytes = detail::read_file(path);
  } catch (const IoError&) {
    throw ImageryError("missing image file " + path);
  }
  return load_png(bytes);
}

void save_png_file(const Image& img, const std::string& path) {
  detail::write_file(path, save_png(img));
}

std::vector<Image> load_image_dir(const std::string& dir, std::uint32_t size) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw IoError("not a directory: " + dir);
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".png") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  std::vector<Image> images;
  images.reserve(files.size());
  for (const auto& f : files) images.push_back(resize(load_png_file(f.string()), size, size));
  return images;
}

}  // namespace floodsight
