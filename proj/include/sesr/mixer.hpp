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
// Noise corruption at exact target SNRs. Noise shorter than the speech is
// looped with a circular offset; power is measured over the full utterance.
// Mixtures may exceed [-1,1] and are stored as float.

#ifndef SESR_MIXER_HPP
#define SESR_MIXER_HPP

#include <limits>
#include <random>
#include <string>
#include <vector>

#include "sesr/dsp.hpp"

namespace sesr::mix {

struct NoiseEntry {
  std::string category;  // noise | music | babble
  std::string id;
  std::string path;
  long num_samples = 0;  // used to draw valid circular offsets
};

struct NoiseCorpus {
  std::vector<NoiseEntry> entries;

  std::vector<int> indices_for(const std::string& category) const;
};

struct MixSpec {
  std::string utt_id;
  std::string speaker_id;
  std::string clean_path;
  std::string noise_path;
  std::string category;
  double snr_db = 0.0;
  long offset = 0;  // circular noise offset in samples
  uint64_t seed = 0;
};

struct CleanUtterance {
  std::string utt_id;
  std::string speaker_id;
  std::string path;
};

// The noise segment aligned to the speech: looped from `offset` and trimmed
// to the speech length.
dsp::Waveform noise_segment(const dsp::Waveform& noise, std::size_t length,
                            long offset);

// Returns speech + g*noise with g = sqrt(P_s / (P_n * 10^(snr/10))).
dsp::Waveform mix_at_snr(const dsp::Waveform& speech,
                         const dsp::Waveform& noise, double snr_db,
                         long offset = 0);

// 10*log10(sum s^2 / sum n^2); +inf when the noise component is silent.
double measure_snr(const dsp::Waveform& speech,
                   const dsp::Waveform& noise_component);

// One MixSpec per clean utterance: category, entry, SNR and offset drawn
// uniformly from the seeded generator. Same seed, same manifest.
std::vector<MixSpec> build_mixture_manifest(
    const std::vector<CleanUtterance>& clean, const NoiseCorpus& corpus,
    const std::vector<std::string>& categories,
    const std::vector<double>& snrs_db, uint64_t seed);

}  // namespace sesr::mix

#endif  // SESR_MIXER_HPP
