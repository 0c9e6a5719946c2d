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
//
// Spectrogram PNG heatmaps for side-by-side comparison. Panels are stacked
// vertically (time on x, frequency on y, low bins at the bottom), rendered in
// log-magnitude with a shared 80 dB dynamic range across all panels.

#ifndef SESR_HEATMAP_HPP
#define SESR_HEATMAP_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "sesr/tensor.hpp"

namespace sesr::viz {

struct Rgb {
  uint8_t r, g, b;
};

// v in [0,1] -> perceptual dark-to-bright color ramp.
Rgb colormap(double v);

// Minimal 8-bit RGB PNG encoder (zlib-compressed scanlines).
void write_png_rgb(const std::string& path, int width, int height,
                   const std::vector<uint8_t>& rgb);

// Each panel is a magnitude spectrogram (T,F) or (T,F,1); all panels must
// share the same shape. Throws on empty input or shape mismatch.
void write_spectrogram_panels(const std::vector<Tensor>& panels,
                              const std::string& path);

}  // namespace sesr::viz

#endif  // SESR_HEATMAP_HPP
