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

#include "sesr/mixer.hpp"

#include <cmath>
#include <stdexcept>

namespace sesr::mix {

std::vector<int> NoiseCorpus::indices_for(const std::string& category) const {
  std::vector<int> out;
  for (std::size_t i = 0; i < entries.size(); ++i)
    if (entries[i].category == category) out.push_back(static_cast<int>(i));
  return out;
}

namespace {
double power(const std::vector<float>& x) {
  double acc = 0;
  for (float v : x) acc += double(v) * double(v);
  return acc;
}
}  // namespace

dsp::Waveform noise_segment(const dsp::Waveform& noise, std::size_t length,
                            long offset) {
  if (noise.samples.empty())
    throw std::invalid_argument("noise_segment: empty noise");
  const long n = static_cast<long>(noise.samples.size());
  long o = offset % n;
  if (o < 0) o += n;
  dsp::Waveform out;
  out.sample_rate = noise.sample_rate;
  out.samples.resize(length);
  for (std::size_t i = 0; i < length; ++i)
    out.samples[i] = noise.samples[static_cast<size_t>((o + static_cast<long>(i)) % n)];
  return out;
}

dsp::Waveform mix_at_snr(const dsp::Waveform& speech,
                         const dsp::Waveform& noise, double snr_db,
                         long offset) {
  if (speech.sample_rate != noise.sample_rate)
    throw std::invalid_argument("mix_at_snr: sample rate mismatch");
  if (!std::isfinite(snr_db))
    throw std::invalid_argument("mix_at_snr: non-finite SNR");
  dsp::Waveform seg = noise_segment(noise, speech.samples.size(), offset);
  const double p_s = power(speech.samples);
  const double p_n = power(seg.samples);
  if (p_s <= 0.0) throw std::invalid_argument("mix_at_snr: silent speech");
  if (p_n <= 0.0)
    throw std::invalid_argument("mix_at_snr: cannot scale silent noise");
  const double g = std::sqrt(p_s / (p_n * std::pow(10.0, snr_db / 10.0)));
  dsp::Waveform out;
  out.sample_rate = speech.sample_rate;
  out.samples.resize(speech.samples.size());
  for (std::size_t i = 0; i < out.samples.size(); ++i)
    out.samples[i] = speech.samples[i] + static_cast<float>(g) * seg.samples[i];
  return out;
}

double measure_snr(const dsp::Waveform& speech,
                   const dsp::Waveform& noise_component) {
  if (speech.samples.size() != noise_component.samples.size())
    throw std::invalid_argument("measure_snr: length mismatch");
  const double p_s = power(speech.samples);
  const double p_n = power(noise_component.samples);
  if (p_n <= 0.0) return std::numeric_limits<double>::infinity();  // clean
  return 10.0 * std::log10(p_s / p_n);
}

std::vector<MixSpec> build_mixture_manifest(
    const std::vector<CleanUtterance>& clean, const NoiseCorpus& corpus,
    const std::vector<std::string>& categories,
    const std::vector<double>& snrs_db, uint64_t seed) {
  if (clean.empty())
    throw std::invalid_argument("build_mixture_manifest: empty clean manifest");
  if (categories.empty() || snrs_db.empty())
    throw std::invalid_argument("build_mixture_manifest: nothing to draw from");
  std::vector<std::vector<int>> per_category;
  for (const auto& c : categories) {
    per_category.push_back(corpus.indices_for(c));
    if (per_category.back().empty())
      throw std::invalid_argument("no noise entries for category: " + c);
  }

  std::mt19937_64 rng(seed);
  std::vector<MixSpec> out;
  out.reserve(clean.size());
  for (const auto& utt : clean) {
    std::uniform_int_distribution<std::size_t> cat_dist(0, categories.size() - 1);
    const std::size_t ci = cat_dist(rng);
    const auto& pool = per_category[ci];
    std::uniform_int_distribution<std::size_t> entry_dist(0, pool.size() - 1);
    const NoiseEntry& entry =
        corpus.entries[static_cast<size_t>(pool[entry_dist(rng)])];
    std::uniform_int_distribution<std::size_t> snr_dist(0, snrs_db.size() - 1);
    const double snr = snrs_db[snr_dist(rng)];
    std::uniform_int_distribution<long> off_dist(
        0, std::max<long>(0, entry.num_samples - 1));
    MixSpec spec;
    spec.utt_id = utt.utt_id;
    spec.speaker_id = utt.speaker_id;
    spec.clean_path = utt.path;
    spec.noise_path = entry.path;
    spec.category = entry.category;
    spec.snr_db = snr;
    spec.offset = off_dist(rng);
    spec.seed = seed;
    out.push_back(std::move(spec));
  }
  return out;
}

}  // namespace sesr::mix
