// Copyright 2026 The roadex Authors
// SPDX-License-Identifier: Apache-2.0
//
// 8-bit PNG encode/decode (grayscale, RGB, palette) backed by libpng.

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

namespace roadex {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// Interleaved 8-bit RGB image, row-major, row 0 at the top.
class RgbImage {
 public:
  RgbImage() = default;
  RgbImage(int width, int height, Rgb fill = {});

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  bool empty() const noexcept { return width_ == 0 || height_ == 0; }

  Rgb at(int x, int y) const {
    const std::size_t i = index(x, y);
    return {data_[i], data_[i + 1], data_[i + 2]};
  }
  void set(int x, int y, Rgb c) {
    const std::size_t i = index(x, y);
    data_[i] = c.r;
    data_[i + 1] = c.g;
    data_[i + 2] = c.b;
  }

  std::span<const std::uint8_t> bytes() const noexcept { return data_; }
  std::span<std::uint8_t> bytes() noexcept { return data_; }

  /// Copies `src` with its top-left corner at (x, y); must fit entirely.
  void blit(const RgbImage& src, int x, int y);
  RgbImage crop(int x, int y, int width, int height) const;

  friend bool operator==(const RgbImage&, const RgbImage&) = default;

 private:
  std::size_t index(int x, int y) const {
    return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x)) * 3;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> data_;
};

struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;  ///< row-major
};

void write_png(const GrayImage& image, const std::filesystem::path& path);
void write_png(const RgbImage& image, const std::filesystem::path& path);
/// Palette PNG; `indices` holds one palette index per pixel.
void write_indexed_png(int width, int height, std::span<const std::uint8_t> indices,
                       std::span<const Rgb> palette, const std::filesystem::path& path);

/// Any PNG converted to 8-bit grayscale / RGB. Throws IoError on failure.
GrayImage read_gray_png(const std::filesystem::path& path);
RgbImage read_rgb_png(const std::filesystem::path& path);
RgbImage decode_rgb_png(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encode_png(const RgbImage& image);

}  // namespace roadex
