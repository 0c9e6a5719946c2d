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

#include "sesr/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace sesr::metrics {

double topk_accuracy(const std::vector<std::vector<double>>& logits,
                     const std::vector<int>& targets, int k) {
  if (logits.empty()) throw std::invalid_argument("topk_accuracy: empty batch");
  if (logits.size() != targets.size())
    throw std::invalid_argument("topk_accuracy: batch size mismatch");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    const auto& l = logits[i];
    const int m = static_cast<int>(l.size());
    const int t = targets[i];
    if (t < 0 || t >= m) throw std::out_of_range("topk_accuracy: bad target");
    if (k < 1 || k > m) throw std::invalid_argument("topk_accuracy: bad k");
    // rank = strictly-greater entries plus equal entries at lower index
    int rank = 0;
    for (int j = 0; j < m; ++j) {
      if (l[static_cast<size_t>(j)] > l[static_cast<size_t>(t)]) ++rank;
      else if (l[static_cast<size_t>(j)] == l[static_cast<size_t>(t)] && j < t) ++rank;
    }
    if (rank < k) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(logits.size());
}

double cosine_score(const std::vector<float>& a, const std::vector<float>& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("cosine_score: dimension mismatch");
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += double(a[i]) * b[i];
    na += double(a[i]) * a[i];
    nb += double(b[i]) * b[i];
  }
  if (na <= 0.0 || nb <= 0.0)
    throw std::invalid_argument("cosine_score: degenerate embedding");
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

namespace {

struct Roc {
  // Achievable operating points as the threshold sweeps the sorted scores,
  // restricted to tie-group boundaries. far/frr have equal length >= 2.
  std::vector<double> far, frr;
};

Roc roc_points(const ScoreSet& s) {
  const std::size_t n = s.scores.size();
  if (n == 0 || s.labels.size() != n)
    throw std::invalid_argument("ScoreSet: empty or mismatched");
  std::size_t n_tar = 0;
  for (bool l : s.labels) n_tar += l ? 1 : 0;
  const std::size_t n_non = n - n_tar;
  if (n_tar == 0 || n_non == 0)
    throw std::invalid_argument("ScoreSet: needs both target and nontarget trials");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return s.scores[a] < s.scores[b];
  });

  Roc r;
  std::size_t tar_below = 0, non_below = 0;
  auto emit = [&] {
    r.far.push_back(static_cast<double>(n_non - non_below) / n_non);
    r.frr.push_back(static_cast<double>(tar_below) / n_tar);
  };
  emit();  // threshold below all scores: accept everything
  for (std::size_t i = 0; i < n; ++i) {
    if (s.labels[order[i]]) ++tar_below; else ++non_below;
    // only positions between distinct score values are achievable
    if (i + 1 < n && s.scores[order[i + 1]] == s.scores[order[i]]) continue;
    emit();
  }
  return r;
}

}  // namespace

double eer(const ScoreSet& s) {
  const Roc r = roc_points(s);
  for (std::size_t i = 0; i + 1 < r.far.size(); ++i) {
    const double d0 = r.far[i] - r.frr[i];
    const double d1 = r.far[i + 1] - r.frr[i + 1];
    if (d0 >= 0.0 && d1 <= 0.0) {
      const double denom = d0 - d1;
      const double t = denom > 0.0 ? d0 / denom : 0.0;
      return r.far[i] + t * (r.far[i + 1] - r.far[i]);
    }
  }
  throw std::logic_error("eer: no FAR/FRR crossing found");
}

double min_dcf(const ScoreSet& s, double p_target) {
  if (!(p_target > 0.0 && p_target < 1.0))
    throw std::invalid_argument("min_dcf: p_target must be in (0,1)");
  const Roc r = roc_points(s);
  const double norm = std::min(p_target, 1.0 - p_target);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < r.far.size(); ++i) {
    const double cost =
        (r.frr[i] * p_target + r.far[i] * (1.0 - p_target)) / norm;
    best = std::min(best, cost);
  }
  return best;
}

double avg_dcf(const ScoreSet& s) {
  return 0.5 * (min_dcf(s, 0.01) + min_dcf(s, 0.001));
}

std::vector<Trial> read_trial_list(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open trial list: " + path);
  std::vector<Trial> out;
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::istringstream iss(line);
    int label;
    Trial t;
    if (!(iss >> label >> t.utt_a >> t.utt_b))
      throw std::runtime_error("malformed trial line: " + line);
    t.same_speaker = label != 0;
    out.push_back(std::move(t));
  }
  return out;
}

void write_trial_list(const std::string& path, const std::vector<Trial>& trials) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  for (const auto& t : trials)
    f << (t.same_speaker ? 1 : 0) << ' ' << t.utt_a << ' ' << t.utt_b << '\n';
}

}  // namespace sesr::metrics
