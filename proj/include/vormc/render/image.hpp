// Copyright 2026 The vormc Authors
// SPDX-License-Identifier: Apache-2.0

// Linear RGB images with PFM (float, lossless) and PPM (8-bit, gamma 2.2)
// output.

#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "vormc/errors.hpp"
#include "vormc/render/vec3.hpp"

namespace vormc::render {

struct Image {
  int width = 0, height = 0;
  std::vector<Rgb> pixels;  ///< row-major, row 0 at the top

  Image() = default;
  Image(int w, int h) : width(w), height(h), pixels(std::size_t(w) * std::size_t(h)) {}

  Rgb& at(int x, int y) { return pixels[std::size_t(y) * std::size_t(width) + std::size_t(x)]; }
  const Rgb& at(int x, int y) const {
    return pixels[std::size_t(y) * std::size_t(width) + std::size_t(x)];
  }
};

/// Mean over pixels and channels of the squared difference.
inline double compute_mse(const Image& a, const Image& b) {
  if (a.width != b.width || a.height != b.height)
    throw ResolutionMismatch("images are " + std::to_string(a.width) + "x" +
                             std::to_string(a.height) + " and " + std::to_string(b.width) + "x" +
                             std::to_string(b.height));
  double sum = 0.0;
  for (std::size_t i = 0; i < a.pixels.size(); ++i)
    for (int c = 0; c < 3; ++c) {
      const double d = a.pixels[i][c] - b.pixels[i][c];
      sum += d * d;
    }
  return a.pixels.empty() ? 0.0 : sum / (3.0 * double(a.pixels.size()));
}

namespace detail {

inline std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

inline std::uint32_t byteswap32(std::uint32_t v) {
  return (v >> 24) | ((v >> 8) & 0xff00u) | ((v << 8) & 0xff0000u) | (v << 24);
}

}  // namespace detail

/// Little-endian PFM, scanlines bottom-up.
inline void write_pfm(const Image& img, const std::filesystem::path& path) {
  auto out = detail::open_out(path);
  out << "PF\n" << img.width << ' ' << img.height << "\n-1.0\n";
  std::vector<float> row(std::size_t(img.width) * 3);
  for (int y = img.height - 1; y >= 0; --y) {
    for (int x = 0; x < img.width; ++x)
      for (int c = 0; c < 3; ++c) row[std::size_t(x) * 3 + std::size_t(c)] = float(img.at(x, y)[c]);
    if constexpr (std::endian::native == std::endian::big)
      for (float& f : row) {
        std::uint32_t u;
        std::memcpy(&u, &f, 4);
        u = detail::byteswap32(u);
        std::memcpy(&f, &u, 4);
      }
    out.write(reinterpret_cast<const char*>(row.data()), std::streamsize(row.size() * sizeof(float)));
  }
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

inline Image read_pfm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::string magic;
  int w = 0, h = 0;
  double scale = 0;
  in >> magic >> w >> h >> scale;
  in.get();
  if (!in || magic != "PF" || w < 1 || h < 1 || scale == 0.0)
    throw IoError("'" + path.string() + "' is not an RGB PFM file");
  const bool little = scale < 0.0;
  const bool swap = little != (std::endian::native == std::endian::little);
  Image img(w, h);
  std::vector<float> row(std::size_t(w) * 3);
  for (int y = h - 1; y >= 0; --y) {
    in.read(reinterpret_cast<char*>(row.data()), std::streamsize(row.size() * sizeof(float)));
    if (!in) throw IoError("'" + path.string() + "' is truncated");
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < 3; ++c) {
        float f = row[std::size_t(x) * 3 + std::size_t(c)];
        if (swap) {
          std::uint32_t u;
          std::memcpy(&u, &f, 4);
          u = detail::byteswap32(u);
          std::memcpy(&f, &u, 4);
        }
        img.at(x, y)[c] = double(f);
      }
  }
  return img;
}

/// Binary P6, gamma 2.2, values clamped to [0, 1].
inline void write_ppm(const Image& img, const std::filesystem::path& path) {
  auto out = detail::open_out(path);
  out << "P6\n" << img.width << ' ' << img.height << "\n255\n";
  std::vector<unsigned char> row(std::size_t(img.width) * 3);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x)
      for (int c = 0; c < 3; ++c) {
        const double v = std::pow(std::clamp(img.at(x, y)[c], 0.0, 1.0), 1.0 / 2.2);
        row[std::size_t(x) * 3 + std::size_t(c)] = static_cast<unsigned char>(std::lround(255.0 * v));
      }
    out.write(reinterpret_cast<const char*>(row.data()), std::streamsize(row.size()));
  }
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

/// Writes PFM or PPM depending on the extension.
inline void write_image(const Image& img, const std::filesystem::path& path) {
  const std::string ext = path.extension().string();
  if (ext == ".pfm") return write_pfm(img, path);
  if (ext == ".ppm") return write_ppm(img, path);
  throw InvalidArgument("output must end in .pfm or .ppm, got '" + path.string() + "'");
}

}  // namespace vormc::render
