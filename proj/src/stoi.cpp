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

#include "sesr/stoi.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace sesr::metrics {

namespace {

constexpr int kFs = 10000;
constexpr int kFrameLen = 256;
constexpr int kHop = 128;
constexpr int kFft = 512;
constexpr int kBins = kFft / 2 + 1;
constexpr int kBands = 15;
constexpr double kBandStartHz = 150.0;
constexpr int kSegLen = 30;          // frames per segment
constexpr double kDynRangeDb = 40.0;  // silent-frame threshold
constexpr double kBetaDb = -15.0;     // clipping level

std::vector<double> hann(int n) {
  std::vector<double> w(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i)
    w[static_cast<size_t>(i)] =
        0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * (i + 1) / (n + 1));
  return w;
}

// frames x bins magnitude-squared spectra
std::vector<std::vector<double>> spectra(const std::vector<double>& x) {
  const auto w = hann(kFrameLen);
  const int frames =
      x.size() >= kFrameLen
          ? 1 + static_cast<int>((x.size() - kFrameLen) / kHop)
          : 0;
  std::vector<std::vector<double>> out(static_cast<size_t>(frames));
  std::vector<std::complex<float>> buf(static_cast<size_t>(kFft));
  for (int t = 0; t < frames; ++t) {
    std::fill(buf.begin(), buf.end(), std::complex<float>(0.f, 0.f));
    for (int i = 0; i < kFrameLen; ++i)
      buf[static_cast<size_t>(i)] = static_cast<float>(
          x[static_cast<size_t>(t * kHop + i)] * w[static_cast<size_t>(i)]);
    dsp::fft(buf, false);
    auto& row = out[static_cast<size_t>(t)];
    row.resize(kBins);
    for (int f = 0; f < kBins; ++f) row[static_cast<size_t>(f)] = std::norm(buf[static_cast<size_t>(f)]);
  }
  return out;
}

// one-third octave band -> FFT bin ranges [lo, hi)
std::vector<std::pair<int, int>> band_edges() {
  std::vector<std::pair<int, int>> out;
  auto nearest_bin = [](double hz) {
    int best = 0;
    double best_d = std::abs(0.0 - hz);
    for (int i = 1; i < kBins; ++i) {
      const double f = double(i) * kFs / kFft;
      const double d = std::abs(f - hz);
      if (d < best_d) { best_d = d; best = i; }
    }
    return best;
  };
  for (int j = 0; j < kBands; ++j) {
    const double cf = kBandStartHz * std::pow(2.0, j / 3.0);
    const int lo = nearest_bin(cf / std::pow(2.0, 1.0 / 6.0));
    const int hi = nearest_bin(cf * std::pow(2.0, 1.0 / 6.0));
    out.emplace_back(lo, hi);
  }
  return out;
}

// Drop frames whose clean energy is kDynRangeDb below the loudest frame,
// then overlap-add the surviving frames of both signals.
void remove_silent_frames(std::vector<double>& x, std::vector<double>& y) {
  const auto w = hann(kFrameLen);
  const int frames =
      x.size() >= kFrameLen
          ? 1 + static_cast<int>((x.size() - kFrameLen) / kHop)
          : 0;
  if (frames == 0) return;
  std::vector<double> energy_db(static_cast<size_t>(frames));
  double max_db = -1e300;
  for (int t = 0; t < frames; ++t) {
    double e = 0;
    for (int i = 0; i < kFrameLen; ++i) {
      const double v = x[static_cast<size_t>(t * kHop + i)] * w[static_cast<size_t>(i)];
      e += v * v;
    }
    energy_db[static_cast<size_t>(t)] = 10.0 * std::log10(e + 1e-300);
    max_db = std::max(max_db, energy_db[static_cast<size_t>(t)]);
  }
  std::vector<double> xs, ys;
  xs.assign(x.size(), 0.0);
  ys.assign(y.size(), 0.0);
  int kept = 0;
  for (int t = 0; t < frames; ++t) {
    if (energy_db[static_cast<size_t>(t)] < max_db - kDynRangeDb) continue;
    const int dst = kept * kHop;
    for (int i = 0; i < kFrameLen; ++i) {
      xs[static_cast<size_t>(dst + i)] +=
          x[static_cast<size_t>(t * kHop + i)] * w[static_cast<size_t>(i)];
      ys[static_cast<size_t>(dst + i)] +=
          y[static_cast<size_t>(t * kHop + i)] * w[static_cast<size_t>(i)];
    }
    ++kept;
  }
  const std::size_t new_len = static_cast<size_t>(kept) * kHop + (kFrameLen - kHop);
  xs.resize(std::min(xs.size(), new_len));
  ys.resize(std::min(ys.size(), new_len));
  x = std::move(xs);
  y = std::move(ys);
}

}  // namespace

double stoi(const dsp::Waveform& clean, const dsp::Waveform& processed) {
  if (clean.sample_rate != processed.sample_rate)
    throw std::invalid_argument("stoi: sample rate mismatch");
  if (clean.samples.size() != processed.samples.size())
    throw std::invalid_argument("stoi: length mismatch");

  double clean_power = 0;
  for (float v : clean.samples) clean_power += double(v) * v;
  if (clean_power <= 0.0)
    throw std::invalid_argument("stoi: silent clean signal");

  dsp::Waveform c10 = dsp::resample(clean, kFs);
  dsp::Waveform p10 = dsp::resample(processed, kFs);
  std::vector<double> x(c10.samples.begin(), c10.samples.end());
  std::vector<double> y(p10.samples.begin(), p10.samples.end());

  remove_silent_frames(x, y);

  const auto sx = spectra(x);
  const auto sy = spectra(y);
  const int frames = static_cast<int>(std::min(sx.size(), sy.size()));
  if (frames < kSegLen)
    throw std::invalid_argument("stoi: signal too short after silence removal");

  const auto bands = band_edges();
  // band envelopes, frames x bands
  std::vector<std::vector<double>> ex(static_cast<size_t>(frames)),
      ey(static_cast<size_t>(frames));
  for (int t = 0; t < frames; ++t) {
    ex[static_cast<size_t>(t)].resize(kBands);
    ey[static_cast<size_t>(t)].resize(kBands);
    for (int j = 0; j < kBands; ++j) {
      double ax = 0, ay = 0;
      for (int f = bands[static_cast<size_t>(j)].first;
           f < bands[static_cast<size_t>(j)].second; ++f) {
        ax += sx[static_cast<size_t>(t)][static_cast<size_t>(f)];
        ay += sy[static_cast<size_t>(t)][static_cast<size_t>(f)];
      }
      ex[static_cast<size_t>(t)][static_cast<size_t>(j)] = std::sqrt(ax);
      ey[static_cast<size_t>(t)][static_cast<size_t>(j)] = std::sqrt(ay);
    }
  }

  const double clip = std::pow(10.0, -kBetaDb / 20.0);  // 10^(15/20)
  double total = 0;
  long count = 0;
  std::vector<double> xv(kSegLen), yv(kSegLen);
  for (int m = kSegLen; m <= frames; ++m) {
    for (int j = 0; j < kBands; ++j) {
      double nx = 0, ny = 0;
      for (int i = 0; i < kSegLen; ++i) {
        xv[static_cast<size_t>(i)] = ex[static_cast<size_t>(m - kSegLen + i)][static_cast<size_t>(j)];
        yv[static_cast<size_t>(i)] = ey[static_cast<size_t>(m - kSegLen + i)][static_cast<size_t>(j)];
        nx += xv[static_cast<size_t>(i)] * xv[static_cast<size_t>(i)];
        ny += yv[static_cast<size_t>(i)] * yv[static_cast<size_t>(i)];
      }
      const double alpha = ny > 0 ? std::sqrt(nx / ny) : 0.0;
      double mx = 0, my = 0;
      for (int i = 0; i < kSegLen; ++i) {
        yv[static_cast<size_t>(i)] =
            std::min(alpha * yv[static_cast<size_t>(i)],
                     xv[static_cast<size_t>(i)] * (1.0 + clip));
        mx += xv[static_cast<size_t>(i)];
        my += yv[static_cast<size_t>(i)];
      }
      mx /= kSegLen;
      my /= kSegLen;
      double num = 0, dx = 0, dy = 0;
      for (int i = 0; i < kSegLen; ++i) {
        const double a = xv[static_cast<size_t>(i)] - mx;
        const double b = yv[static_cast<size_t>(i)] - my;
        num += a * b;
        dx += a * a;
        dy += b * b;
      }
      const double denom = std::sqrt(dx * dy);
      total += denom > 1e-300 ? num / denom : 0.0;
      ++count;
    }
  }
  return total / static_cast<double>(count);
}

}  // namespace sesr::metrics
