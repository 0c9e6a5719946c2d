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

#ifndef SESR_METRICS_HPP
#define SESR_METRICS_HPP

#include <string>
#include <vector>

namespace sesr::metrics {

// Verification scores with boolean same-speaker labels.
struct ScoreSet {
  std::vector<double> scores;
  std::vector<bool> labels;  // true = target (same speaker)
};

struct Trial {
  std::string utt_a;
  std::string utt_b;
  bool same_speaker = false;
};

// Fraction of samples whose target class is among the k largest logits.
// Ties are broken toward the lowest class index.
double topk_accuracy(const std::vector<std::vector<double>>& logits,
                     const std::vector<int>& targets, int k);

double cosine_score(const std::vector<float>& a, const std::vector<float>& b);

// Equal error rate: threshold sweep over sorted scores with linear
// interpolation between the adjacent (FAR, FRR) points where FAR-FRR
// changes sign.
double eer(const ScoreSet& s);

// Normalized NIST detection cost, unit miss/false-alarm costs:
// min over thresholds of [P_miss*p_t + P_fa*(1-p_t)] / min(p_t, 1-p_t).
double min_dcf(const ScoreSet& s, double p_target);

// (min_dcf(0.01) + min_dcf(0.001)) / 2
double avg_dcf(const ScoreSet& s);

// Trial-list file: lines "label utt_a utt_b" with label 1 = same speaker.
std::vector<Trial> read_trial_list(const std::string& path);
void write_trial_list(const std::string& path, const std::vector<Trial>& trials);

}  // namespace sesr::metrics

#endif  // SESR_METRICS_HPP
