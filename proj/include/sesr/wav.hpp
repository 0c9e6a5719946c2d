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

#ifndef SESR_WAV_HPP
#define SESR_WAV_HPP

#include <string>

#include "sesr/dsp.hpp"

namespace sesr::wav {

// Reads PCM16 or IEEE float32 WAV; stereo is downmixed by channel averaging.
// Resamples to target_rate when nonzero and different from the file's rate.
dsp::Waveform read(const std::string& path, int target_rate = 0);

// Writes IEEE float32 mono WAV (values outside [-1,1] are preserved).
void write_float32(const std::string& path, const dsp::Waveform& w);

// Writes PCM16 mono WAV, clipping to [-1,1].
void write_pcm16(const std::string& path, const dsp::Waveform& w);

}  // namespace sesr::wav

#endif  // SESR_WAV_HPP
