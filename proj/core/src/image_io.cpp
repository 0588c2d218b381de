// Copyright 2026 The vineskel Authors
// SPDX-License-Identifier: Apache-2.0

#include "vineskel/image_io.hpp"

#include "vineskel/error.hpp"

#include <png.h>

#include <cctype>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

namespace vineskel {

namespace {

std::string slurp(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ParseError(path.string(), 0, "cannot open file");
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

Mask decode_png(const std::string& bytes, const std::string& name) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
    throw ParseError(name, 0, std::string("PNG header: ") + image.message);
  }
  image.format = PNG_FORMAT_RGBA;
  std::vector<png_byte> buf(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, buf.data(), 0, nullptr)) {
    const std::string msg = image.message;
    png_image_free(&image);
    throw ParseError(name, 0, "PNG data: " + msg);
  }
  const int w = static_cast<int>(image.width), h = static_cast<int>(image.height);
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(w) * h);
  for (std::size_t i = 0; i < bits.size(); ++i) {
    const auto* px = &buf[i * 4];
    bits[i] = (px[0] | px[1] | px[2]) != 0 ? 1 : 0;
  }
  return Mask(w, h, std::move(bits));
}

Mask decode_pgm(const std::string& bytes, const std::string& name) {
  std::size_t pos = 2;
  auto next_token = [&]() -> long {
    for (;;) {
      while (pos < bytes.size() && std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
      if (pos < bytes.size() && bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
        continue;
      }
      break;
    }
    const auto start = pos;
    long v = 0;
    while (pos < bytes.size() && std::isdigit(static_cast<unsigned char>(bytes[pos]))) {
      v = v * 10 + (bytes[pos] - '0');
      ++pos;
    }
    if (pos == start) throw ParseError(name, start, "expected integer in PGM");
    return v;
  };
  const bool binary = bytes[1] == '5';
  const long w = next_token(), h = next_token(), maxval = next_token();
  if (w < 0 || h < 0 || maxval <= 0 || maxval > 65535) throw ParseError(name, pos, "bad PGM header values");
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(w) * static_cast<std::size_t>(h));
  if (binary) {
    ++pos;  // single whitespace after maxval
    const std::size_t bpp = maxval > 255 ? 2 : 1;
    if (pos + bits.size() * bpp > bytes.size()) throw ParseError(name, bytes.size(), "truncated PGM raster");
    for (std::size_t i = 0; i < bits.size(); ++i) {
      const auto* p = reinterpret_cast<const unsigned char*>(bytes.data() + pos + i * bpp);
      bits[i] = (bpp == 2 ? (p[0] | p[1]) : p[0]) != 0 ? 1 : 0;
    }
  } else {
    for (auto& b : bits) b = next_token() != 0 ? 1 : 0;
  }
  return Mask(static_cast<int>(w), static_cast<int>(h), std::move(bits));
}

void write_png_rows(const std::filesystem::path& path, int w, int h, png_uint_32 format,
                    const std::vector<png_byte>& data) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(w);
  image.height = static_cast<png_uint_32>(h);
  image.format = format;
  if (!png_image_write_to_file(&image, path.string().c_str(), 0, data.data(), 0, nullptr)) {
    throw Error("cannot write PNG '" + path.string() + "': " + image.message);
  }
}

}  // namespace

Mask read_mask(const std::filesystem::path& path) {
  const auto bytes = slurp(path);
  static constexpr unsigned char kPngSig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  if (bytes.size() >= 8 && std::memcmp(bytes.data(), kPngSig, 8) == 0) return decode_png(bytes, path.string());
  if (bytes.size() >= 2 && bytes[0] == 'P' && (bytes[1] == '5' || bytes[1] == '2')) {
    return decode_pgm(bytes, path.string());
  }
  throw ParseError(path.string(), 0, "unrecognised mask format (expected PNG or PGM)");
}

void write_mask_png(const std::filesystem::path& path, const Mask& mask) {
  std::vector<png_byte> data(mask.bits().size());
  for (std::size_t i = 0; i < data.size(); ++i) data[i] = mask.bits()[i] ? 255 : 0;
  write_png_rows(path, mask.width(), mask.height(), PNG_FORMAT_GRAY, data);
}

void write_mask_pgm(const std::filesystem::path& path, const Mask& mask) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open '" + path.string() + "' for writing");
  f << "P5\n" << mask.width() << ' ' << mask.height() << "\n255\n";
  for (auto b : mask.bits()) f.put(b ? static_cast<char>(255) : 0);
}

void write_overlay_png(const std::filesystem::path& path, const Mask& model, const Mask& truth) {
  if (!model.same_shape(truth)) throw ShapeError("overlay: mask shapes differ");
  std::vector<png_byte> data(model.bits().size() * 3, 0);
  for (std::size_t i = 0; i < model.bits().size(); ++i) {
    const bool m = model.bits()[i] != 0, t = truth.bits()[i] != 0;
    png_byte* px = &data[i * 3];
    if (m && t) {
      px[1] = 200;
    } else if (t) {
      px[0] = 255;
      px[1] = 150;
    } else if (m) {
      px[0] = 220;
    }
  }
  write_png_rows(path, model.width(), model.height(), PNG_FORMAT_RGB, data);
}

}  // namespace vineskel
