// Copyright (c) 2026 SESR Toolkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "sesr/heatmap.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace sesr::viz {

namespace {

constexpr double kDynRangeDb = 80.0;
constexpr int kSeparator = 2;  // white rows between panels

void put_u32_be(std::string& b, uint32_t x) {
  b.push_back(static_cast<char>((x >> 24) & 0xff));
  b.push_back(static_cast<char>((x >> 16) & 0xff));
  b.push_back(static_cast<char>((x >> 8) & 0xff));
  b.push_back(static_cast<char>(x & 0xff));
}

void put_chunk(std::string& out, const char type[4], const std::string& data) {
  put_u32_be(out, static_cast<uint32_t>(data.size()));
  std::string body(type, 4);
  body += data;
  out += body;
  const uint32_t crc = static_cast<uint32_t>(
      crc32(0, reinterpret_cast<const Bytef*>(body.data()),
            static_cast<uInt>(body.size())));
  put_u32_be(out, crc);
}

}  // namespace

Rgb colormap(double v) {
  v = std::clamp(v, 0.0, 1.0);
  // Piecewise-linear ramp: near-black -> purple -> orange -> light yellow.
  struct Anchor {
    double t;
    double r, g, b;
  };
  static const Anchor anchors[] = {
      {0.00, 0.01, 0.00, 0.05}, {0.25, 0.33, 0.06, 0.42},
      {0.50, 0.72, 0.21, 0.33}, {0.75, 0.98, 0.55, 0.10},
      {1.00, 0.99, 0.99, 0.75},
  };
  for (int i = 1; i < 5; ++i) {
    if (v <= anchors[i].t) {
      const Anchor &a = anchors[i - 1], &b = anchors[i];
      const double u = (v - a.t) / (b.t - a.t);
      return {static_cast<uint8_t>(255 * (a.r + u * (b.r - a.r))),
              static_cast<uint8_t>(255 * (a.g + u * (b.g - a.g))),
              static_cast<uint8_t>(255 * (a.b + u * (b.b - a.b)))};
    }
  }
  return {253, 253, 191};
}

void write_png_rgb(const std::string& path, int width, int height,
                   const std::vector<uint8_t>& rgb) {
  if (width < 1 || height < 1 ||
      rgb.size() != static_cast<size_t>(width) * height * 3)
    throw std::invalid_argument("png: pixel buffer does not match dimensions");

  // Raw image with a filter byte (0 = none) before each scanline.
  std::string raw;
  raw.reserve(static_cast<size_t>(height) * (1 + 3 * width));
  for (int y = 0; y < height; ++y) {
    raw.push_back('\0');
    raw.append(reinterpret_cast<const char*>(rgb.data() +
                                             static_cast<size_t>(y) * width * 3),
               static_cast<size_t>(width) * 3);
  }
  uLongf comp_len = compressBound(static_cast<uLong>(raw.size()));
  std::string comp(comp_len, '\0');
  if (compress2(reinterpret_cast<Bytef*>(comp.data()), &comp_len,
                reinterpret_cast<const Bytef*>(raw.data()),
                static_cast<uLong>(raw.size()), 6) != Z_OK)
    throw std::runtime_error("png: compression failed");
  comp.resize(comp_len);

  std::string ihdr;
  put_u32_be(ihdr, static_cast<uint32_t>(width));
  put_u32_be(ihdr, static_cast<uint32_t>(height));
  ihdr.push_back(8);   // bit depth
  ihdr.push_back(2);   // color type: truecolor
  ihdr.push_back(0);   // compression
  ihdr.push_back(0);   // filter
  ihdr.push_back(0);   // interlace

  std::string out("\x89PNG\r\n\x1a\n", 8);
  put_chunk(out, "IHDR", ihdr);
  put_chunk(out, "IDAT", comp);
  put_chunk(out, "IEND", "");

  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw std::runtime_error("short write: " + path);
}

void write_spectrogram_panels(const std::vector<Tensor>& panels,
                              const std::string& path) {
  if (panels.empty()) throw std::invalid_argument("heatmap: no panels");
  const int t = panels[0].dim(0);
  const int f = panels[0].dim(1);
  for (const auto& p : panels) {
    if (p.ndim() < 2 || p.ndim() > 3 || p.dim(0) != t || p.dim(1) != f ||
        (p.ndim() == 3 && p.dim(2) != 1))
      throw std::invalid_argument("heatmap: panel shape mismatch");
  }

  // Shared scale: global max across all panels, fixed dynamic range below it.
  double peak = 0;
  for (const auto& p : panels)
    for (std::size_t i = 0; i < p.numel(); ++i)
      peak = std::max(peak, static_cast<double>(p[i]));
  const double top_db = 20.0 * std::log10(std::max(peak, 1e-12));

  const int n = static_cast<int>(panels.size());
  const int width = t;
  const int height = n * f + (n - 1) * kSeparator;
  std::vector<uint8_t> rgb(static_cast<size_t>(width) * height * 3, 255);

  for (int p = 0; p < n; ++p) {
    const Tensor& s = panels[static_cast<size_t>(p)];
    const int y0 = p * (f + kSeparator);
    for (int fi = 0; fi < f; ++fi) {
      const int y = y0 + (f - 1 - fi);  // low frequencies at the panel bottom
      for (int x = 0; x < t; ++x) {
        const double db =
            20.0 * std::log10(std::max(static_cast<double>(
                                           s[static_cast<size_t>(x) * f + fi]),
                                       1e-12));
        const Rgb c = colormap((db - (top_db - kDynRangeDb)) / kDynRangeDb);
        const std::size_t o = (static_cast<size_t>(y) * width + x) * 3;
        rgb[o] = c.r;
        rgb[o + 1] = c.g;
        rgb[o + 2] = c.b;
      }
    }
  }
  write_png_rgb(path, width, height, rgb);
}

}  // namespace sesr::viz
