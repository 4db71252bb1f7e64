// Copyright 2026 The mlal Authors
// SPDX-License-Identifier: Apache-2.0

#include <zlib.h>

#include <algorithm>
#include <cmath>

#include "core/error.hpp"
#include "data/data.hpp"

namespace mlal::data {
namespace {

void put_u32(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>(v >> 24));
  out.push_back(static_cast<char>(v >> 16));
  out.push_back(static_cast<char>(v >> 8));
  out.push_back(static_cast<char>(v));
}

void put_chunk(std::string& out, const char* type, const std::string& payload) {
  put_u32(out, static_cast<std::uint32_t>(payload.size()));
  std::string body(type, 4);
  body += payload;
  out += body;
  put_u32(out, static_cast<std::uint32_t>(
                   crc32(0, reinterpret_cast<const Bytef*>(body.data()), static_cast<uInt>(body.size()))));
}

}  // namespace

std::string render_feature_strip_png(std::span<const double> features, int cell_px) {
  require(!features.empty() && cell_px > 0, ErrorCode::kInvalidArgument, "nothing to render");
  const auto [lo_it, hi_it] = std::minmax_element(features.begin(), features.end());
  const double lo = *lo_it, span = *hi_it - *lo_it;
  const std::uint32_t width = static_cast<std::uint32_t>(features.size() * cell_px);
  const std::uint32_t height = static_cast<std::uint32_t>(cell_px);

  // Blue (low) to red (high) ramp, one filter byte per scanline.
  std::string raw;
  for (std::uint32_t y = 0; y < height; ++y) {
    raw.push_back(0);
    for (double f : features) {
      const double t = span > 0.0 ? (f - lo) / span : 0.5;
      const auto r = static_cast<unsigned char>(std::lround(255.0 * t));
      const auto b = static_cast<unsigned char>(std::lround(255.0 * (1.0 - t)));
      const auto g = static_cast<unsigned char>(std::lround(255.0 * (1.0 - std::abs(2.0 * t - 1.0)) * 0.6));
      for (int px = 0; px < cell_px; ++px) {
        raw.push_back(static_cast<char>(r));
        raw.push_back(static_cast<char>(g));
        raw.push_back(static_cast<char>(b));
      }
    }
  }

  uLongf zlen = compressBound(static_cast<uLong>(raw.size()));
  std::string z(zlen, '\0');
  if (compress2(reinterpret_cast<Bytef*>(z.data()), &zlen, reinterpret_cast<const Bytef*>(raw.data()),
                static_cast<uLong>(raw.size()), Z_BEST_COMPRESSION) != Z_OK) {
    fail(ErrorCode::kRuntime, "zlib compression failed");
  }
  z.resize(zlen);

  std::string png("\x89PNG\r\n\x1a\n", 8);
  std::string ihdr;
  put_u32(ihdr, width);
  put_u32(ihdr, height);
  ihdr += std::string("\x08\x02\x00\x00\x00", 5);  // 8-bit RGB, no interlace
  put_chunk(png, "IHDR", ihdr);
  put_chunk(png, "IDAT", z);
  put_chunk(png, "IEND", "");
  return png;
}

}  // namespace mlal::data
