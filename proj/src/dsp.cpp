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

#include "sesr/dsp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace sesr::dsp {

namespace {

std::vector<float> make_window(const StftConfig& cfg, int len) {
  std::vector<float> w(static_cast<size_t>(len));
  if (cfg.window_fn == "hann") {
    // periodic Hann
    for (int i = 0; i < len; ++i)
      w[static_cast<size_t>(i)] = static_cast<float>(
          0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / len));
  } else if (cfg.window_fn == "rect") {
    std::fill(w.begin(), w.end(), 1.0f);
  } else {
    throw std::invalid_argument("unknown window function: " + cfg.window_fn);
  }
  return w;
}

bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

void fft(std::vector<std::complex<float>>& a, bool inverse) {
  const int n = static_cast<int>(a.size());
  if (!is_pow2(n)) throw std::invalid_argument("fft size must be a power of 2");
  // bit-reversal permutation
  for (int i = 1, j = 0; i < n; ++i) {
    int bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[static_cast<size_t>(i)], a[static_cast<size_t>(j)]);
  }
  for (int len = 2; len <= n; len <<= 1) {
    const double ang =
        2.0 * std::numbers::pi / len * (inverse ? 1.0 : -1.0);
    const std::complex<double> wl(std::cos(ang), std::sin(ang));
    for (int i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (int k = 0; k < len / 2; ++k) {
        const std::complex<double> u = a[static_cast<size_t>(i + k)];
        const std::complex<double> v =
            std::complex<double>(a[static_cast<size_t>(i + k + len / 2)]) * w;
        a[static_cast<size_t>(i + k)] =
            std::complex<float>(static_cast<float>((u + v).real()),
                                static_cast<float>((u + v).imag()));
        a[static_cast<size_t>(i + k + len / 2)] =
            std::complex<float>(static_cast<float>((u - v).real()),
                                static_cast<float>((u - v).imag()));
        w *= wl;
      }
    }
  }
  if (inverse)
    for (auto& x : a) x /= static_cast<float>(n);
}

ComplexSpectrogram stft(const Waveform& w, const StftConfig& cfg) {
  const int win = cfg.window_samples(w.sample_rate);
  const int hop = cfg.hop_samples(w.sample_rate);
  if (win <= 0 || hop <= 0 || hop > win || cfg.fft_size < win)
    throw std::invalid_argument("stft: inconsistent config");
  const int n = static_cast<int>(w.samples.size());
  if (n < win) throw std::invalid_argument("stft: utterance too short");
  for (float s : w.samples)
    if (!std::isfinite(s)) throw std::invalid_argument("stft: non-finite sample");

  const auto window = make_window(cfg, win);
  const int frames = n / hop;
  const int half = win / 2;

  ComplexSpectrogram out;
  out.frames = frames;
  out.bins = cfg.bins();
  out.config = cfg;
  out.sample_rate = w.sample_rate;
  out.num_samples = n;
  out.values.resize(static_cast<size_t>(frames) * out.bins);

  std::vector<std::complex<float>> buf(static_cast<size_t>(cfg.fft_size));
  for (int t = 0; t < frames; ++t) {
    const int start = t * hop - half;  // centered frame
    std::fill(buf.begin(), buf.end(), std::complex<float>(0.0f, 0.0f));
    for (int i = 0; i < win; ++i) {
      const int s = start + i;
      if (s >= 0 && s < n)
        buf[static_cast<size_t>(i)] =
            w.samples[static_cast<size_t>(s)] * window[static_cast<size_t>(i)];
    }
    fft(buf, false);
    for (int f = 0; f < out.bins; ++f) out.at(t, f) = buf[static_cast<size_t>(f)];
  }
  return out;
}

Spectrogram magnitude(const ComplexSpectrogram& c) {
  Spectrogram s;
  s.config = c.config;
  s.values = Tensor({c.frames, c.bins});
  for (int t = 0; t < c.frames; ++t)
    for (int f = 0; f < c.bins; ++f) s.values.at(t, f) = std::abs(c.at(t, f));
  return s;
}

namespace {
Spectrogram crop_at(const Spectrogram& s, int start, int target_t) {
  Spectrogram out;
  out.config = s.config;
  out.values = Tensor({target_t, s.bins()});
  const int t_in = s.frames();
  for (int t = 0; t < target_t; ++t) {
    const int src = start + t;
    if (src < t_in)
      for (int f = 0; f < s.bins(); ++f) out.values.at(t, f) = s.values.at(src, f);
  }
  return out;
}
}  // namespace

Spectrogram crop_or_pad(const Spectrogram& s, int target_t, std::mt19937_64& rng) {
  if (target_t < 1) throw std::invalid_argument("crop_or_pad: target_t >= 1");
  const int t_in = s.frames();
  int start = 0;
  if (t_in > target_t) {
    std::uniform_int_distribution<int> dist(0, t_in - target_t);
    start = dist(rng);
  }
  return crop_at(s, start, target_t);
}

Spectrogram crop_or_pad_center(const Spectrogram& s, int target_t) {
  if (target_t < 1) throw std::invalid_argument("crop_or_pad: target_t >= 1");
  const int t_in = s.frames();
  const int start = t_in > target_t ? (t_in - target_t) / 2 : 0;
  return crop_at(s, start, target_t);
}

Waveform istft(const Spectrogram& mag, const ComplexSpectrogram& phase_from,
               const StftConfig& cfg) {
  if (mag.frames() != phase_from.frames || mag.bins() != phase_from.bins)
    throw std::invalid_argument("istft: magnitude/phase shape mismatch");
  const int sr = phase_from.sample_rate;
  const int win = cfg.window_samples(sr);
  const int hop = cfg.hop_samples(sr);
  const int half = win / 2;
  const int n_out = phase_from.num_samples;
  const auto window = make_window(cfg, win);

  std::vector<double> acc(static_cast<size_t>(n_out), 0.0);
  std::vector<double> norm(static_cast<size_t>(n_out), 0.0);
  std::vector<std::complex<float>> buf(static_cast<size_t>(cfg.fft_size));

  for (int t = 0; t < mag.frames(); ++t) {
    // one-sided spectrum -> full Hermitian spectrum
    for (int f = 0; f < mag.bins(); ++f) {
      const std::complex<float> ph = phase_from.at(t, f);
      const float a = std::abs(ph);
      const std::complex<float> unit =
          a > 0.0f ? ph / a : std::complex<float>(1.0f, 0.0f);
      buf[static_cast<size_t>(f)] = mag.values.at(t, f) * unit;
    }
    for (int f = mag.bins(); f < cfg.fft_size; ++f)
      buf[static_cast<size_t>(f)] = std::conj(buf[static_cast<size_t>(cfg.fft_size - f)]);
    fft(buf, true);
    const int start = t * hop - half;
    for (int i = 0; i < win; ++i) {
      const int s = start + i;
      if (s < 0 || s >= n_out) continue;
      const double w = window[static_cast<size_t>(i)];
      acc[static_cast<size_t>(s)] += w * buf[static_cast<size_t>(i)].real();
      norm[static_cast<size_t>(s)] += w * w;
    }
  }

  Waveform out;
  out.sample_rate = sr;
  out.samples.resize(static_cast<size_t>(n_out), 0.0f);
  for (int s = 0; s < n_out; ++s)
    if (norm[static_cast<size_t>(s)] > 1e-10)
      out.samples[static_cast<size_t>(s)] =
          static_cast<float>(acc[static_cast<size_t>(s)] / norm[static_cast<size_t>(s)]);
  return out;
}

Waveform resample(const Waveform& w, int target_rate) {
  if (target_rate <= 0) throw std::invalid_argument("resample: bad rate");
  if (target_rate == w.sample_rate) return w;
  const int g = static_cast<int>(std::gcd(static_cast<long>(w.sample_rate),
                                          static_cast<long>(target_rate)));
  const int up = target_rate / g;
  const int down = w.sample_rate / g;
  const int n_in = static_cast<int>(w.samples.size());
  const long n_out = static_cast<long>(n_in) * up / down;

  // Polyphase windowed-sinc lowpass at min(in, out) Nyquist.
  const double cutoff = 0.5 * std::min(1.0, double(up) / down);
  const int half_taps = 32;  // per input sample

  Waveform out;
  out.sample_rate = target_rate;
  out.samples.resize(static_cast<size_t>(n_out));
  for (long m = 0; m < n_out; ++m) {
    // output time in input-sample units
    const double t = static_cast<double>(m) * down / up;
    const int lo = static_cast<int>(std::floor(t)) - half_taps + 1;
    const int hi = static_cast<int>(std::floor(t)) + half_taps;
    double acc = 0.0;
    for (int k = std::max(0, lo); k <= std::min(n_in - 1, hi); ++k) {
      const double x = t - k;
      const double sinc =
          x == 0.0 ? 2.0 * cutoff
                   : std::sin(2.0 * std::numbers::pi * cutoff * x) /
                         (std::numbers::pi * x);
      // Blackman window over the tap span
      const double u = (x + half_taps) / (2.0 * half_taps);
      const double win = 0.42 - 0.5 * std::cos(2.0 * std::numbers::pi * u) +
                         0.08 * std::cos(4.0 * std::numbers::pi * u);
      acc += w.samples[static_cast<size_t>(k)] * sinc * win;
    }
    out.samples[static_cast<size_t>(m)] = static_cast<float>(acc);
  }
  return out;
}

}  // namespace sesr::dsp
