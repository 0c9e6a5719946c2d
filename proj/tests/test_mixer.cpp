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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <random>

#include "sesr/mixer.hpp"

using namespace sesr;
using namespace sesr::mix;

namespace {

dsp::Waveform randn(std::size_t n, float scale, uint64_t seed, int rate = 16000) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> g(0.0f, scale);
  dsp::Waveform w;
  w.sample_rate = rate;
  w.samples.resize(n);
  for (auto& s : w.samples) s = g(rng);
  return w;
}

double power(const dsp::Waveform& w) {
  double p = 0;
  for (float s : w.samples) p += double(s) * s;
  return p;
}

}  // namespace

TEST_CASE("equal-power mixing at 0 dB uses unit gain") {
  auto s = randn(16000, 0.1f, 1);
  auto n = randn(16000, 0.3f, 2);
  // Force exactly equal power.
  const float g = static_cast<float>(std::sqrt(power(s) / power(n)));
  for (auto& v : n.samples) v *= g;
  auto mixed = mix_at_snr(s, n, 0.0);
  for (std::size_t i = 0; i < s.samples.size(); ++i)
    CHECK(mixed.samples[i] ==
          doctest::Approx(s.samples[i] + n.samples[i]).epsilon(1e-4));
}

TEST_CASE("measured SNR equals the requested SNR") {
  auto s = randn(16000, 0.1f, 3);
  auto n = randn(16000, 0.05f, 4);
  for (double snr : {-5.0, 0.0, 5.0, 10.0, 20.0}) {
    auto mixed = mix_at_snr(s, n, snr);
    dsp::Waveform noise_part;
    noise_part.sample_rate = 16000;
    noise_part.samples.resize(s.samples.size());
    for (std::size_t i = 0; i < s.samples.size(); ++i)
      noise_part.samples[i] = mixed.samples[i] - s.samples[i];
    CHECK(measure_snr(s, noise_part) == doctest::Approx(snr).epsilon(1e-6));
  }
}

TEST_CASE("measure_snr matches a scalar-loop oracle") {
  auto s = randn(5000, 0.2f, 5);
  auto n = randn(5000, 0.07f, 6);
  double ps = 0, pn = 0;
  for (std::size_t i = 0; i < s.samples.size(); ++i) {
    ps += double(s.samples[i]) * s.samples[i];
    pn += double(n.samples[i]) * n.samples[i];
  }
  CHECK(measure_snr(s, n) ==
        doctest::Approx(10.0 * std::log10(ps / pn)).epsilon(1e-12));
  // Amplitude ratio 10 -> 20 dB (to float rounding of the scaled samples).
  auto n10 = s;
  for (auto& v : n10.samples) v *= 0.1f;
  CHECK(measure_snr(s, n10) == doctest::Approx(20.0).epsilon(1e-6));
}

TEST_CASE("silent noise is clean sentinel / error") {
  auto s = randn(8000, 0.1f, 7);
  dsp::Waveform silent;
  silent.sample_rate = 16000;
  silent.samples.assign(8000, 0.0f);
  CHECK(std::isinf(measure_snr(s, silent)));
  CHECK_THROWS_WITH_AS(static_cast<void>(mix_at_snr(s, silent, 10.0)),
                       doctest::Contains("silent noise"), std::invalid_argument);
}

TEST_CASE("300 dB SNR returns speech essentially unchanged") {
  auto s = randn(16000, 0.1f, 8);
  auto n = randn(16000, 0.1f, 9);
  auto mixed = mix_at_snr(s, n, 300.0);
  for (std::size_t i = 0; i < s.samples.size(); ++i)
    CHECK(std::abs(double(mixed.samples[i]) - s.samples[i]) < 1e-9);
}

TEST_CASE("short noise loops with a circular offset") {
  auto n = randn(1000, 0.1f, 10);
  auto seg = noise_segment(n, 2500, 300);
  REQUIRE(seg.samples.size() == 2500);
  for (std::size_t i = 0; i < seg.samples.size(); ++i)
    CHECK(seg.samples[i] == n.samples[(300 + i) % 1000]);
}

TEST_CASE("manifest generation is deterministic and uniform-ish") {
  std::vector<CleanUtterance> clean;
  for (int i = 0; i < 200; ++i)
    clean.push_back({"utt" + std::to_string(i), "spk" + std::to_string(i % 10),
                     "clean/" + std::to_string(i) + ".wav"});
  NoiseCorpus corpus;
  for (int i = 0; i < 4; ++i) {
    corpus.entries.push_back({"noise", "n" + std::to_string(i),
                              "noise/n" + std::to_string(i) + ".wav", 48000});
    corpus.entries.push_back({"music", "m" + std::to_string(i),
                              "noise/m" + std::to_string(i) + ".wav", 48000});
    corpus.entries.push_back({"babble", "b" + std::to_string(i),
                              "noise/b" + std::to_string(i) + ".wav", 48000});
  }
  const std::vector<std::string> cats = {"noise", "music", "babble"};
  const std::vector<double> snrs = {0, 5, 10, 15, 20};

  auto m1 = build_mixture_manifest(clean, corpus, cats, snrs, 99);
  auto m2 = build_mixture_manifest(clean, corpus, cats, snrs, 99);
  REQUIRE(m1.size() == clean.size());
  for (std::size_t i = 0; i < m1.size(); ++i) {
    CHECK(m1[i].noise_path == m2[i].noise_path);
    CHECK(m1[i].snr_db == m2[i].snr_db);
    CHECK(m1[i].offset == m2[i].offset);
  }
  // Each SNR level appears with roughly uniform frequency.
  std::map<double, int> counts;
  for (const auto& s : m1) counts[s.snr_db]++;
  for (double snr : snrs) {
    const double freq = counts[snr] / double(m1.size());
    CHECK(freq > 0.05);
    CHECK(freq < 0.35);
  }
  auto m3 = build_mixture_manifest(clean, corpus, cats, snrs, 100);
  bool any_diff = false;
  for (std::size_t i = 0; i < m1.size(); ++i)
    if (m1[i].noise_path != m3[i].noise_path || m1[i].snr_db != m3[i].snr_db)
      any_diff = true;
  CHECK(any_diff);
}

TEST_CASE("manifest errors") {
  NoiseCorpus corpus;
  corpus.entries.push_back({"noise", "n0", "n0.wav", 48000});
  CHECK_THROWS(static_cast<void>(
      build_mixture_manifest({}, corpus, {"noise"}, {0.0}, 1)));
  std::vector<CleanUtterance> clean = {{"u0", "s0", "u0.wav"}};
  CHECK_THROWS(static_cast<void>(
      build_mixture_manifest(clean, corpus, {"babble"}, {0.0}, 1)));
}

TEST_CASE("single utterance yields a single spec") {
  NoiseCorpus corpus;
  corpus.entries.push_back({"noise", "n0", "n0.wav", 48000});
  std::vector<CleanUtterance> clean = {{"u0", "s0", "u0.wav"}};
  auto m = build_mixture_manifest(clean, corpus, {"noise"}, {10.0}, 42);
  REQUIRE(m.size() == 1);
  CHECK(m[0].utt_id == "u0");
  CHECK(m[0].snr_db == 10.0);
}
