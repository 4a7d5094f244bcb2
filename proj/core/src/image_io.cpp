// Copyright 2026 The roadex Authors
// SPDX-License-Identifier: Apache-2.0

#include "roadex/image_io.hpp"

#include <png.h>

#include <cstring>
#include <string>

#include "roadex/errors.hpp"

namespace roadex {
namespace {

struct PngImage {
  png_image image{};
  PngImage() {
    image.version = PNG_IMAGE_VERSION;
  }
  ~PngImage() { png_image_free(&image); }
  PngImage(const PngImage&) = delete;
  PngImage& operator=(const PngImage&) = delete;
};

void write_raw(const std::filesystem::path& path, int width, int height, std::uint32_t format,
               const void* pixels, const void* colormap, int colormap_entries) {
  PngImage png;
  png.image.width = static_cast<png_uint_32>(width);
  png.image.height = static_cast<png_uint_32>(height);
  png.image.format = format;
  png.image.colormap_entries = static_cast<png_uint_32>(colormap_entries);
  if (!png_image_write_to_file(&png.image, path.c_str(), 0, pixels, 0, colormap)) {
    throw IoError(path, std::string("PNG write failed: ") + png.image.message);
  }
}

template <typename Begin>
std::vector<std::uint8_t> read_raw(Begin&& begin, std::uint32_t format, int& width, int& height,
                                   const std::string& source) {
  PngImage png;
  if (!begin(png.image)) {
    throw IoError(source, std::string("PNG read failed: ") + png.image.message);
  }
  png.image.format = format;
  std::vector<std::uint8_t> buffer(PNG_IMAGE_SIZE(png.image));
  if (!png_image_finish_read(&png.image, nullptr, buffer.data(), 0, nullptr)) {
    throw IoError(source, std::string("PNG decode failed: ") + png.image.message);
  }
  width = static_cast<int>(png.image.width);
  height = static_cast<int>(png.image.height);
  return buffer;
}

}  // namespace

RgbImage::RgbImage(int width, int height, Rgb fill) : width_(width), height_(height) {
  if (width < 0 || height < 0) throw ParameterError("image dimensions must be non-negative");
  data_.resize(static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * 3);
  for (std::size_t i = 0; i < data_.size(); i += 3) {
    data_[i] = fill.r;
    data_[i + 1] = fill.g;
    data_[i + 2] = fill.b;
  }
}

void RgbImage::blit(const RgbImage& src, int x, int y) {
  if (x < 0 || y < 0 || x + src.width_ > width_ || y + src.height_ > height_) {
    throw ParameterError("blit: source does not fit in destination");
  }
  for (int row = 0; row < src.height_; ++row) {
    std::memcpy(&data_[index(x, y + row)], &src.data_[src.index(0, row)], static_cast<std::size_t>(src.width_) * 3);
  }
}

RgbImage RgbImage::crop(int x, int y, int w, int h) const {
  if (x < 0 || y < 0 || w < 0 || h < 0 || x + w > width_ || y + h > height_) {
    throw ParameterError("crop: region outside image");
  }
  RgbImage out(w, h);
  for (int row = 0; row < h; ++row) {
    std::memcpy(&out.data_[out.index(0, row)], &data_[index(x, y + row)], static_cast<std::size_t>(w) * 3);
  }
  return out;
}

void write_png(const GrayImage& image, const std::filesystem::path& path) {
  write_raw(path, image.width, image.height, PNG_FORMAT_GRAY, image.data.data(), nullptr, 0);
}

void write_png(const RgbImage& image, const std::filesystem::path& path) {
  write_raw(path, image.width(), image.height(), PNG_FORMAT_RGB, image.bytes().data(), nullptr, 0);
}

void write_indexed_png(int width, int height, std::span<const std::uint8_t> indices,
                       std::span<const Rgb> palette, const std::filesystem::path& path) {
  if (indices.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw ParameterError("indexed PNG: index buffer size mismatch");
  }
  if (palette.empty() || palette.size() > 256) throw ParameterError("indexed PNG: palette must have 1..256 entries");
  std::vector<std::uint8_t> colormap;
  for (const Rgb& c : palette) {
    colormap.push_back(c.r);
    colormap.push_back(c.g);
    colormap.push_back(c.b);
  }
  write_raw(path, width, height, PNG_FORMAT_RGB_COLORMAP, indices.data(), colormap.data(),
            static_cast<int>(palette.size()));
}

GrayImage read_gray_png(const std::filesystem::path& path) {
  GrayImage out;
  out.data = read_raw([&](png_image& img) { return png_image_begin_read_from_file(&img, path.c_str()); },
                      PNG_FORMAT_GRAY, out.width, out.height, path.string());
  return out;
}

RgbImage read_rgb_png(const std::filesystem::path& path) {
  int w = 0, h = 0;
  auto data = read_raw([&](png_image& img) { return png_image_begin_read_from_file(&img, path.c_str()); },
                       PNG_FORMAT_RGB, w, h, path.string());
  RgbImage out(w, h);
  std::memcpy(out.bytes().data(), data.data(), data.size());
  return out;
}

RgbImage decode_rgb_png(std::span<const std::uint8_t> bytes) {
  int w = 0, h = 0;
  auto data = read_raw(
      [&](png_image& img) { return png_image_begin_read_from_memory(&img, bytes.data(), bytes.size()); },
      PNG_FORMAT_RGB, w, h, "<memory>");
  RgbImage out(w, h);
  std::memcpy(out.bytes().data(), data.data(), data.size());
  return out;
}

std::vector<std::uint8_t> encode_png(const RgbImage& image) {
  PngImage png;
  png.image.width = static_cast<png_uint_32>(image.width());
  png.image.height = static_cast<png_uint_32>(image.height());
  png.image.format = PNG_FORMAT_RGB;
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&png.image, nullptr, &size, 0, image.bytes().data(), 0, nullptr)) {
    throw Error(std::string("PNG encode failed: ") + png.image.message);
  }
  std::vector<std::uint8_t> out(size);
  if (!png_image_write_to_memory(&png.image, out.data(), &size, 0, image.bytes().data(), 0, nullptr)) {
    throw Error(std::string("PNG encode failed: ") + png.image.message);
  }
  out.resize(size);
  return out;
}

}  // namespace roadex
