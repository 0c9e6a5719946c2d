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
// Waveform <-> spectrogram frontend. 25 ms Hann window, 10 ms hop, 512-point
// FFT, 257 one-sided bins. Frames are centered (half-window zero padding on
// both ends) with T = floor(len/hop), so 3.0 s at 16 kHz maps to exactly
// 300 frames. No normalization is applied to spectrogram values.

#ifndef SESR_DSP_HPP
#define SESR_DSP_HPP

#include <complex>
#include <random>
#include <string>
#include <vector>

#include "sesr/tensor.hpp"

namespace sesr::dsp {

struct Waveform {
  std::vector<float> samples;
  int sample_rate = 16000;

  double duration_s() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
};

struct StftConfig {
  int window_ms = 25;
  int hop_ms = 10;
  int fft_size = 512;
  std::string window_fn = "hann";

  int window_samples(int sample_rate) const {
    return window_ms * sample_rate / 1000;
  }
  int hop_samples(int sample_rate) const {
    return hop_ms * sample_rate / 1000;
  }
  int bins() const { return fft_size / 2 + 1; }
};

struct ComplexSpectrogram {
  // Row-major (frames, bins).
  std::vector<std::complex<float>> values;
  int frames = 0;
  int bins = 0;
  StftConfig config;
  int sample_rate = 16000;
  int num_samples = 0;  // original waveform length, for istft

  std::complex<float>& at(int t, int f) {
    return values[static_cast<size_t>(t) * bins + f];
  }
  std::complex<float> at(int t, int f) const {
    return values[static_cast<size_t>(t) * bins + f];
  }
};

struct Spectrogram {
  Tensor values;  // (T, F), nonnegative
  StftConfig config;

  int frames() const { return values.dim(0); }
  int bins() const { return values.dim(1); }
};

// In-place iterative radix-2 FFT; n must be a power of two.
void fft(std::vector<std::complex<float>>& a, bool inverse);

ComplexSpectrogram stft(const Waveform& w, const StftConfig& cfg = {});
Spectrogram magnitude(const ComplexSpectrogram& c);

// Random contiguous crop (training) or center crop (eval) when longer than
// target_T; zero-padded at the end when shorter.
Spectrogram crop_or_pad(const Spectrogram& s, int target_t, std::mt19937_64& rng);
Spectrogram crop_or_pad_center(const Spectrogram& s, int target_t);

// Overlap-add reconstruction of mag * exp(i*angle(phase_from)).
Waveform istft(const Spectrogram& mag, const ComplexSpectrogram& phase_from,
               const StftConfig& cfg = {});

// Windowed-sinc rational resampler.
Waveform resample(const Waveform& w, int target_rate);

}  // namespace sesr::dsp

#endif  // SESR_DSP_HPP
