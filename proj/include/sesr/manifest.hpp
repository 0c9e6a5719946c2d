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
// Line-delimited JSON manifests plus the portable float32 feature format
// (raw little-endian data file + JSON sidecar with shape and STFT config).

#ifndef SESR_MANIFEST_HPP
#define SESR_MANIFEST_HPP

#include <string>
#include <vector>

#include "sesr/dsp.hpp"
#include "sesr/mixer.hpp"
#include "sesr/tensor.hpp"

namespace sesr::manifest {

struct UttRecord {
  std::string utt_id;
  std::string speaker_id;
  std::string path;
  double duration_s = 0.0;
};

std::vector<UttRecord> read_utterances(const std::string& path);
void write_utterances(const std::vector<UttRecord>& records,
                      const std::string& path);

std::vector<mix::MixSpec> read_mixtures(const std::string& path);
void write_mixtures(const std::vector<mix::MixSpec>& specs,
                    const std::string& path);

std::vector<mix::NoiseEntry> read_noise_entries(const std::string& path);
void write_noise_entries(const std::vector<mix::NoiseEntry>& entries,
                         const std::string& path);

// Feature export: `path` gets raw float32 (row-major), `path + ".json"` the
// sidecar {shape, frame_ms, hop_ms, fft_size, window}.
void write_feature(const Tensor& feat, const dsp::StftConfig& cfg,
                   const std::string& path);
Tensor read_feature(const std::string& path, dsp::StftConfig* cfg = nullptr);

}  // namespace sesr::manifest

#endif  // SESR_MANIFEST_HPP
