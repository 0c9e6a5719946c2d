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

#include "sesr/synth.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace sesr::synth {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

uint64_t mix_seed(uint64_t seed, uint64_t a, uint64_t b) {
  uint64_t h = seed;
  h ^= a + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  h ^= b + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  return h;
}

void normalize_rms(std::vector<float>& x, double target_rms) {
  double p = 0;
  for (float v : x) p += static_cast<double>(v) * v;
  const double rms = std::sqrt(p / std::max<size_t>(x.size(), 1));
  if (rms <= 0) return;
  const float g = static_cast<float>(target_rms / rms);
  for (float& v : x) v *= g;
}

// Resonance weight of a harmonic at frequency f for the given voice.
double filter_gain(const Voice& v, double f) {
  double g = 0.05;  // spectral floor
  for (int i = 0; i < 3; ++i) {
    const double d = (f - v.formant_hz[i]) / v.formant_width_hz[i];
    g += std::exp(-0.5 * d * d);
  }
  return g / (1.0 + f / 1500.0);  // gentle high-frequency roll-off
}

dsp::Waveform speech_like(const Voice& v, double duration_s, int sample_rate,
                          std::mt19937_64& rng) {
  const std::size_t n = static_cast<size_t>(duration_s * sample_rate);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double jitter = 0.95 + 0.1 * u(rng);        // per-utterance F0 shift
  const double syllable_hz = 2.5 + 2.0 * u(rng);    // amplitude modulation
  const double vibrato_hz = 4.0 + 2.0 * u(rng);
  const double syl_phase = kTwoPi * u(rng);
  const double vib_phase = kTwoPi * u(rng);

  // Harmonic stack up to 7 kHz, weighted by the formant filter.
  const double f0 = v.f0_hz * jitter;
  std::vector<double> amp, phase;
  std::vector<int> order;
  for (int k = 1; k * f0 < 7000.0 && k * f0 < sample_rate / 2.0; ++k) {
    amp.push_back(filter_gain(v, k * f0) / k);
    phase.push_back(kTwoPi * u(rng));
    order.push_back(k);
  }

  std::normal_distribution<double> gauss(0.0, 1.0);
  dsp::Waveform w;
  w.sample_rate = sample_rate;
  w.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / sample_rate;
    const double vib = 1.0 + 0.01 * std::sin(kTwoPi * vibrato_hz * t + vib_phase);
    double s = 0;
    for (std::size_t k = 0; k < order.size(); ++k)
      s += amp[k] * std::sin(kTwoPi * order[k] * f0 * vib * t + phase[k]);
    const double env =
        0.55 + 0.45 * std::sin(kTwoPi * syllable_hz * t + syl_phase);
    w.samples[i] =
        static_cast<float>(s * env * env + 0.002 * gauss(rng));  // breath noise
  }
  normalize_rms(w.samples, 0.1);
  return w;
}

}  // namespace

Voice voice_for_speaker(int speaker) {
  std::mt19937_64 rng(0x501cull + static_cast<uint64_t>(speaker) * 7919u);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Voice v;
  v.f0_hz = 85.0 + 140.0 * u(rng);
  v.formant_hz[0] = 300.0 + 500.0 * u(rng);
  v.formant_hz[1] = 900.0 + 1300.0 * u(rng);
  v.formant_hz[2] = 2300.0 + 1200.0 * u(rng);
  for (int i = 0; i < 3; ++i) v.formant_width_hz[i] = 80.0 + 120.0 * u(rng);
  return v;
}

dsp::Waveform speech(int speaker, int utt, double duration_s, int sample_rate,
                     uint64_t seed) {
  std::mt19937_64 rng(mix_seed(seed, static_cast<uint64_t>(speaker),
                               static_cast<uint64_t>(utt)));
  return speech_like(voice_for_speaker(speaker), duration_s, sample_rate, rng);
}

dsp::Waveform noise(const std::string& category, int id, double duration_s,
                    int sample_rate, uint64_t seed) {
  std::mt19937_64 rng(mix_seed(seed, std::hash<std::string>{}(category),
                               static_cast<uint64_t>(id)));
  const std::size_t n = static_cast<size_t>(duration_s * sample_rate);
  dsp::Waveform w;
  w.sample_rate = sample_rate;
  w.samples.resize(n);

  if (category == "noise") {
    // White noise with a one-pole tilt; alternate ids lean pink.
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double a = (id % 2 == 0) ? 0.0 : 0.85;
    double prev = 0;
    for (std::size_t i = 0; i < n; ++i) {
      prev = a * prev + (1.0 - a) * gauss(rng);
      w.samples[i] = static_cast<float>(prev);
    }
  } else if (category == "music") {
    // Arpeggiated tones over a pentatonic-ish scale with note envelopes.
    static const double kScale[] = {220.0, 261.6, 293.7, 329.6, 392.0};
    std::uniform_int_distribution<int> pick(0, 4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double note_s = 0.25 + 0.15 * u(rng);
    const std::size_t note_len = static_cast<size_t>(note_s * sample_rate);
    for (std::size_t start = 0; start < n; start += note_len) {
      const double f = kScale[pick(rng)] * (1 + id % 3);
      const double ph = kTwoPi * u(rng);
      for (std::size_t i = start; i < std::min(n, start + note_len); ++i) {
        const double t = static_cast<double>(i - start) / sample_rate;
        const double env = std::exp(-4.0 * t / note_s);
        const double tt = static_cast<double>(i) / sample_rate;
        w.samples[i] += static_cast<float>(
            env * (std::sin(kTwoPi * f * tt + ph) +
                   0.4 * std::sin(kTwoPi * 2 * f * tt + ph)));
      }
    }
  } else if (category == "babble") {
    // Several overlapping pseudo-speakers outside the main inventory.
    for (int k = 0; k < 6; ++k) {
      std::mt19937_64 vr(mix_seed(seed ^ 0xbabb1eull,
                                  static_cast<uint64_t>(id),
                                  static_cast<uint64_t>(k)));
      dsp::Waveform s =
          speech_like(voice_for_speaker(1000 + id * 16 + k), duration_s,
                      sample_rate, vr);
      for (std::size_t i = 0; i < n; ++i) w.samples[i] += s.samples[i];
    }
  } else {
    throw std::invalid_argument("unknown noise category: " + category);
  }
  normalize_rms(w.samples, 0.1);
  return w;
}

}  // namespace sesr::synth
