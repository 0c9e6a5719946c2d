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
// Deterministic synthetic audio for desk-scale experiments: speech-like
// harmonic utterances with speaker-dependent source/filter parameters, and
// three noise categories (broadband noise, tonal music, babble).

#ifndef SESR_SYNTH_HPP
#define SESR_SYNTH_HPP

#include <cstdint>
#include <string>

#include "sesr/dsp.hpp"

namespace sesr::synth {

// Stable per-speaker voice: fundamental plus three formant resonances.
struct Voice {
  double f0_hz;
  double formant_hz[3];
  double formant_width_hz[3];
};

Voice voice_for_speaker(int speaker);

// Harmonic source-filter utterance with per-utterance F0 jitter, vibrato and
// a syllabic amplitude envelope. Deterministic in (speaker, utt, seed).
dsp::Waveform speech(int speaker, int utt, double duration_s, int sample_rate,
                     uint64_t seed);

// category ∈ {noise, music, babble}; throws on anything else.
dsp::Waveform noise(const std::string& category, int id, double duration_s,
                    int sample_rate, uint64_t seed);

}  // namespace sesr::synth

#endif  // SESR_SYNTH_HPP
