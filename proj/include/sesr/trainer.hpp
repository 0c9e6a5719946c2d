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
// Three-phase training protocol:
//   step1_independent — SE1 on the enhancement loss; SR1 on cross entropy
//                       over SE1-enhanced inputs (no gradient into SE1)
//   step1_joint       — SE1+SR1 fine-tuned on the summed objective
//   step2             — SE2 (warm-started from SE1, embedding-conditioned)
//                       trained on the summed objective with SE1/SR1 frozen;
//                       SR2 is the same parameter storage as SR1
// Adam with lr(e) = lr_init * decay^e per stage; stage order is enforced.

#ifndef SESR_TRAINER_HPP
#define SESR_TRAINER_HPP

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sesr/adam.hpp"
#include "sesr/checkpoint.hpp"
#include "sesr/enhancer.hpp"
#include "sesr/recognizer.hpp"

namespace sesr::train {

struct TrainSample {
  Tensor noisy;  // (T,F,1)
  Tensor clean;  // (T,F,1)
  int speaker = 0;
};
using Dataset = std::vector<TrainSample>;

struct StageConfig {
  int epochs = 1;
  int batch_size = 32;
  double lr_init = 1e-3;
  double lr_decay_per_epoch = 0.9;
  bool ce_sum_reduction = false;  // default batch-mean; sum keeps the
                                  // objective exactly as written
};

struct EpochLog {
  std::string stage;
  int epoch = 0;
  double lr = 0;
  double l_se = 0;  // per-sample mean
  double l_sr = 0;
  double l = 0;
  double wall_time_s = 0;
};

using EpochCallback = std::function<void(const EpochLog&)>;

class Pipeline {
 public:
  Pipeline(const EnhancerConfig& se_cfg, const RecognizerConfig& sr_cfg,
           uint64_t seed);

  Enhancer& se1() { return *se1_; }
  Enhancer& se2() { return *se2_; }
  Recognizer& sr1() { return *sr1_; }
  // SR2 shares weights with SR1: same storage, by construction.
  Recognizer& sr2() { return *sr1_; }

  const std::string& stage() const { return stage_; }
  int epochs_done() const { return epoch_; }
  uint64_t config_hash() const { return config_hash_; }

  std::vector<EpochLog> train_step1_independent(const Dataset& data,
                                                const StageConfig& cfg,
                                                const EpochCallback& cb = {});
  std::vector<EpochLog> finetune_step1_joint(const Dataset& data,
                                             const StageConfig& cfg,
                                             const EpochCallback& cb = {});
  std::vector<EpochLog> train_step2(const Dataset& data,
                                    const StageConfig& cfg,
                                    const EpochCallback& cb = {});

  // Inference paths (Fig. 1 cascade).
  Tensor enhance_step1(const Tensor& noisy);
  Tensor enhance_step2(const Tensor& noisy);
  SrOutput classify_step1(const Tensor& noisy);
  SrOutput classify_step2(const Tensor& noisy);

  Checkpoint to_checkpoint() const;
  void from_checkpoint(const Checkpoint& ckpt);

 private:
  void require_stage(const std::string& needed, const std::string& target);
  std::vector<std::size_t> shuffled_indices(std::size_t n);
  void dump_optimizer(AdamT<float>& opt, const std::string& prefix,
                      Checkpoint& out) const;
  void restore_optimizer(AdamT<float>& opt, const std::string& prefix,
                         const Checkpoint& ckpt);

  EnhancerConfig se_cfg_, se2_cfg_;
  RecognizerConfig sr_cfg_;
  uint64_t config_hash_ = 0;

  std::unique_ptr<Enhancer> se1_, se2_;
  std::unique_ptr<Recognizer> sr1_;

  std::unique_ptr<Adam> opt_se1_, opt_sr1_, opt_se2_;

  std::string stage_ = "init";
  int epoch_ = 0;  // epochs completed within the current stage
  Rng rng_;
};

// Standalone classifier baseline: a Recognizer trained with cross entropy
// directly on its inputs (no enhancement front end).
std::vector<EpochLog> train_recognizer_only(Recognizer& sr, const Dataset& data,
                                            const StageConfig& cfg,
                                            uint64_t seed,
                                            const EpochCallback& cb = {});

}  // namespace sesr::train

#endif  // SESR_TRAINER_HPP
