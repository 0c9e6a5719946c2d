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
// Versioned checkpoint container: magic bytes, config hash, stage tag,
// epoch, RNG state, named float32 parameter blocks, trailing CRC32.
// There is never a separate sr2 block: SR2 aliases sr1's parameters.

#ifndef SESR_CHECKPOINT_HPP
#define SESR_CHECKPOINT_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "sesr/layers.hpp"

namespace sesr {

struct Checkpoint {
  std::string stage;  // init | step1_independent | step1_joint | step2
  int epoch = 0;
  uint64_t config_hash = 0;
  std::string rng_state;  // serialized std::mt19937_64
  std::vector<std::pair<std::string, std::vector<float>>> blocks;

  const std::vector<float>* find(const std::string& name) const;
};

void save_checkpoint(const Checkpoint& ckpt, const std::string& path);

// Throws on bad magic, version mismatch, CRC mismatch, or (when
// expected_config_hash != 0) config-hash mismatch.
Checkpoint load_checkpoint(const std::string& path,
                           uint64_t expected_config_hash = 0);

// FNV-1a over a string, used for config hashes.
uint64_t fnv1a(const std::string& s);

// Parameter block helpers, prefix e.g. "se1/".
void dump_params(const std::vector<ParamT<float>*>& params,
                 const std::string& prefix, Checkpoint& out);
void restore_params(const std::vector<ParamT<float>*>& params,
                    const std::string& prefix, const Checkpoint& ckpt);

}  // namespace sesr

#endif  // SESR_CHECKPOINT_HPP
