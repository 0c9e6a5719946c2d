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

#ifndef SESR_STOI_HPP
#define SESR_STOI_HPP

#include "sesr/dsp.hpp"

namespace sesr::metrics {

// Short-time objective intelligibility (reference algorithm): signals are
// resampled to 10 kHz, silent frames removed (40 dB below the loudest clean
// frame), decomposed into 15 one-third octave bands from 150 Hz, and scored
// as the mean over bands and 30-frame segments of the correlation between
// clean and gain-normalized, -15 dB-clipped processed band envelopes.
double stoi(const dsp::Waveform& clean, const dsp::Waveform& processed);

}  // namespace sesr::metrics

#endif  // SESR_STOI_HPP
