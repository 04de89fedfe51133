/* Copyright 2026 The sisaug Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "sisaug/png_io.hpp"

#include <png.h>

#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <memory>
#include <string>
#include <vector>

namespace sisaug {
namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

// Raw 8-bit decode result; `channels` counts samples per pixel after
// palette handling (palette indices are returned as-is, one sample).
struct Decoded {
  int width = 0;
  int height = 0;
  int channels = 0;
  int bit_depth = 0;
  int color_type = 0;
  std::vector<std::uint8_t> pixels;
};

struct PngError {
  char message[256] = {0};
};

void on_png_error(png_structp png, png_const_charp msg) {
  auto* err = static_cast<PngError*>(png_get_error_ptr(png));
  std::snprintf(err->message, sizeof(err->message), "%s", msg);
  png_longjmp(png, 1);
}

void on_png_warning(png_structp, png_const_charp) {}

// No objects with non-trivial destructors may live in this frame between
// setjmp and the libpng calls; everything is owned by the caller.
bool decode_header(png_structp png, png_infop info, std::FILE* fp, Decoded* out) {
  if (setjmp(png_jmpbuf(png))) return false;
  png_init_io(png, fp);
  png_read_info(png, info);
  out->width = static_cast<int>(png_get_image_width(png, info));
  out->height = static_cast<int>(png_get_image_height(png, info));
  out->bit_depth = png_get_bit_depth(png, info);
  out->color_type = png_get_color_type(png, info);
  out->channels = png_get_channels(png, info);
  return true;
}

bool decode_rows(png_structp png, png_infop info, png_bytepp rows) {
  if (setjmp(png_jmpbuf(png))) return false;
  png_read_image(png, rows);
  png_read_end(png, info);
  return true;
}

Decoded decode(const std::filesystem::path& path) {
  FilePtr fp(std::fopen(path.string().c_str(), "rb"));
  if (!fp) throw Error("cannot open file: " + path.string());
  png_byte sig[8];
  if (std::fread(sig, 1, 8, fp.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
    throw Error("not a PNG file: " + path.string());
  }
  PngError err;
  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, &err, on_png_error, on_png_warning);
  if (!png) throw Error("libpng initialization failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw Error("libpng initialization failed");
  }
  png_set_sig_bytes(png, 8);

  Decoded out;
  if (!decode_header(png, info, fp.get(), &out)) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error("corrupt PNG " + path.string() + ": " + err.message);
  }
  if (out.bit_depth != 8) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error("unsupported bit depth " + std::to_string(out.bit_depth) + ": " +
                path.string());
  }
  out.pixels.resize(static_cast<std::size_t>(out.width) * out.height * out.channels);
  std::vector<png_bytep> rows(out.height);
  for (int y = 0; y < out.height; ++y) {
    rows[y] = out.pixels.data() + static_cast<std::size_t>(y) * out.width * out.channels;
  }
  const bool ok = decode_rows(png, info, rows.data());
  png_destroy_read_struct(&png, &info, nullptr);
  if (!ok) throw Error("corrupt PNG " + path.string() + ": " + err.message);
  return out;
}

bool encode_rows(png_structp png, png_infop info, std::FILE* fp, int width, int height,
                 int color_type, png_bytepp rows) {
  if (setjmp(png_jmpbuf(png))) return false;
  png_init_io(png, fp);
  png_set_IHDR(png, info, width, height, 8, color_type, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, rows);
  png_write_end(png, nullptr);
  return true;
}

void encode(const std::filesystem::path& path, int width, int height, int channels,
            std::vector<std::uint8_t>& pixels) {
  FilePtr fp(std::fopen(path.string().c_str(), "wb"));
  if (!fp) throw Error("cannot write file: " + path.string());
  PngError err;
  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, &err, on_png_error, on_png_warning);
  if (!png) throw Error("libpng initialization failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw Error("libpng initialization failed");
  }
  std::vector<png_bytep> rows(height);
  for (int y = 0; y < height; ++y) {
    rows[y] = pixels.data() + static_cast<std::size_t>(y) * width * channels;
  }
  const int color_type = channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB;
  const bool ok =
      encode_rows(png, info, fp.get(), width, height, color_type, rows.data());
  png_destroy_write_struct(&png, &info);
  if (!ok) throw Error("failed to write PNG " + path.string() + ": " + err.message);
  if (std::fflush(fp.get()) != 0) throw Error("failed to write " + path.string());
}

}  // namespace

std::uint8_t quantize_u8(double value) {
  const double r = std::floor(value + 0.5);
  if (!(r >= 0.0)) return 0;
  if (r > 255.0) return 255;
  return static_cast<std::uint8_t>(r);
}

LabelMap load_label_map(const std::filesystem::path& path, const LabelFormat& format) {
  Decoded d = decode(path);
  if (d.channels != 1) {
    throw Error("not a label map (expected 1 channel, got " +
                std::to_string(d.channels) + "): " + path.string());
  }
  const int n_classes =
      format.n_classes.value_or(format.ignore_id == ClassId{255} ? 255 : 256);
  for (std::uint8_t v : d.pixels) {
    const bool ignored = format.ignore_id && *format.ignore_id == v;
    if (!ignored && v >= n_classes) {
      throw Error("class id " + std::to_string(v) + " >= n_classes " +
                  std::to_string(n_classes) + " in " + path.string());
    }
  }
  return LabelMap(d.width, d.height, n_classes, format.ignore_id, std::move(d.pixels));
}

void save_label_map(const LabelMap& map, const std::filesystem::path& path) {
  std::vector<std::uint8_t> pixels(map.data().begin(), map.data().end());
  encode(path, map.width(), map.height(), 1, pixels);
}

RasterImage load_image(const std::filesystem::path& path) {
  Decoded d = decode(path);
  if (d.color_type != PNG_COLOR_TYPE_GRAY && d.color_type != PNG_COLOR_TYPE_RGB) {
    throw Error("unsupported color type (expected grayscale or RGB): " + path.string());
  }
  std::vector<double> data(d.pixels.begin(), d.pixels.end());
  return RasterImage(d.width, d.height, d.channels, std::move(data));
}

void save_image(const RasterImage& image, const std::filesystem::path& path) {
  std::vector<std::uint8_t> pixels(image.data().size());
  for (std::size_t i = 0; i < pixels.size(); ++i) pixels[i] = quantize_u8(image.data()[i]);
  encode(path, image.width(), image.height(), image.channels(), pixels);
}

EdgeMap load_edge_map(const std::filesystem::path& path) {
  Decoded d = decode(path);
  if (d.color_type != PNG_COLOR_TYPE_GRAY) {
    throw Error("edge map must be 8-bit grayscale: " + path.string());
  }
  std::vector<double> data(d.pixels.size());
  for (std::size_t i = 0; i < data.size(); ++i) data[i] = d.pixels[i] / 255.0;
  return EdgeMap(d.width, d.height, std::move(data));
}

void save_edge_map(const EdgeMap& edges, const std::filesystem::path& path) {
  std::vector<std::uint8_t> pixels(edges.data().size());
  for (std::size_t i = 0; i < pixels.size(); ++i) {
    pixels[i] = quantize_u8(edges.data()[i] * 255.0);
  }
  encode(path, edges.width(), edges.height(), 1, pixels);
}

}  // namespace sisaug
