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

#ifndef SESR_LOSSES_HPP
#define SESR_LOSSES_HPP

#include <cmath>
#include <stdexcept>

#include "sesr/tensor.hpp"

namespace sesr {

// Mean absolute error over all (time, frequency) cells:
// (1/(T*F)) * sum_ij |clean_ij - enhanced_ij|. Accumulated in double.
template <typename T>
double mae_loss(const TensorT<T>& clean, const TensorT<T>& enhanced) {
  if (!clean.same_shape(enhanced))
    throw std::invalid_argument("mae_loss: shape mismatch");
  double acc = 0;
  for (std::size_t i = 0; i < clean.numel(); ++i)
    acc += std::abs(double(clean[i]) - double(enhanced[i]));
  return acc / double(clean.numel());
}

// d(mae)/d(enhanced): sign(enhanced - clean) / (T*F).
template <typename T>
TensorT<T> mae_loss_grad(const TensorT<T>& clean, const TensorT<T>& enhanced) {
  if (!clean.same_shape(enhanced))
    throw std::invalid_argument("mae_loss: shape mismatch");
  TensorT<T> g(enhanced.shape());
  const T inv = T(1) / static_cast<T>(clean.numel());
  for (std::size_t i = 0; i < g.numel(); ++i) {
    const T d = enhanced[i] - clean[i];
    g[i] = d > T(0) ? inv : (d < T(0) ? -inv : T(0));
  }
  return g;
}

// Categorical cross entropy for one sample: -log softmax(logits)[target].
// Batch totals are formed by the caller (sum, or mean via scaling).
template <typename T>
double ce_loss(const TensorT<T>& logits, int target) {
  const int m = static_cast<int>(logits.numel());
  if (target < 0 || target >= m)
    throw std::out_of_range("ce_loss: target class out of range");
  double mx = logits[0];
  for (int j = 1; j < m; ++j) mx = std::max(mx, double(logits[static_cast<size_t>(j)]));
  double lse = 0;
  for (int j = 0; j < m; ++j) lse += std::exp(double(logits[static_cast<size_t>(j)]) - mx);
  lse = std::log(lse) + mx;
  return lse - double(logits[static_cast<size_t>(target)]);
}

// d(ce)/d(logits) = softmax(logits) - onehot(target), scaled by `weight`.
template <typename T>
TensorT<T> ce_loss_grad(const TensorT<T>& logits, int target, T weight = T(1)) {
  const int m = static_cast<int>(logits.numel());
  if (target < 0 || target >= m)
    throw std::out_of_range("ce_loss: target class out of range");
  double mx = logits[0];
  for (int j = 1; j < m; ++j) mx = std::max(mx, double(logits[static_cast<size_t>(j)]));
  double denom = 0;
  for (int j = 0; j < m; ++j) denom += std::exp(double(logits[static_cast<size_t>(j)]) - mx);
  TensorT<T> g(logits.shape());
  for (int j = 0; j < m; ++j) {
    const double p = std::exp(double(logits[static_cast<size_t>(j)]) - mx) / denom;
    g[static_cast<size_t>(j)] = weight * static_cast<T>(p - (j == target ? 1.0 : 0.0));
  }
  return g;
}

template <typename T>
TensorT<T> softmax(const TensorT<T>& logits) {
  const int m = static_cast<int>(logits.numel());
  double mx = logits[0];
  for (int j = 1; j < m; ++j) mx = std::max(mx, double(logits[static_cast<size_t>(j)]));
  double denom = 0;
  for (int j = 0; j < m; ++j) denom += std::exp(double(logits[static_cast<size_t>(j)]) - mx);
  TensorT<T> p(logits.shape());
  for (int j = 0; j < m; ++j)
    p[static_cast<size_t>(j)] = static_cast<T>(std::exp(double(logits[static_cast<size_t>(j)]) - mx) / denom);
  return p;
}

// Joint objective: unweighted sum of the enhancement and recognition terms.
inline double joint_loss(double se_term, double sr_term) {
  return se_term + sr_term;
}

}  // namespace sesr

#endif  // SESR_LOSSES_HPP
