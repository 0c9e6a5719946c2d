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

#ifndef SESR_ADAM_HPP
#define SESR_ADAM_HPP

#include <cmath>
#include <vector>

#include "sesr/layers.hpp"

namespace sesr {

template <typename T>
class AdamT {
 public:
  AdamT() = default;
  explicit AdamT(std::vector<ParamT<T>*> params, double beta1 = 0.9,
                 double beta2 = 0.999, double eps = 1e-8)
      : params_(std::move(params)), beta1_(beta1), beta2_(beta2), eps_(eps) {
    for (auto* p : params_) {
      m_.emplace_back(p->value.shape());
      v_.emplace_back(p->value.shape());
    }
  }

  void zero_grad() {
    for (auto* p : params_) p->zero_grad();
  }

  void step(double lr) {
    ++t_;
    const double c1 = 1.0 - std::pow(beta1_, t_);
    const double c2 = 1.0 - std::pow(beta2_, t_);
    for (std::size_t k = 0; k < params_.size(); ++k) {
      ParamT<T>& p = *params_[k];
      for (std::size_t i = 0; i < p.value.numel(); ++i) {
        const double g = p.grad[i];
        const double m = beta1_ * m_[k][i] + (1.0 - beta1_) * g;
        const double v = beta2_ * v_[k][i] + (1.0 - beta2_) * g * g;
        m_[k][i] = static_cast<T>(m);
        v_[k][i] = static_cast<T>(v);
        p.value[i] -= static_cast<T>(lr * (m / c1) / (std::sqrt(v / c2) + eps_));
      }
    }
  }

  long step_count() const { return t_; }

  // Moment access for checkpointing.
  std::vector<TensorT<T>>& moments1() { return m_; }
  std::vector<TensorT<T>>& moments2() { return v_; }
  void set_step_count(long t) { t_ = t; }
  std::size_t size() const { return params_.size(); }

 private:
  std::vector<ParamT<T>*> params_;
  std::vector<TensorT<T>> m_, v_;
  double beta1_ = 0.9, beta2_ = 0.999, eps_ = 1e-8;
  long t_ = 0;
};

using Adam = AdamT<float>;

// Per-epoch exponential schedule: lr(e) = lr_init * decay^e.
inline double lr_at_epoch(double lr_init, double decay, int epoch) {
  double lr = lr_init;
  for (int i = 0; i < epoch; ++i) lr *= decay;
  return lr;
}

}  // namespace sesr

#endif  // SESR_ADAM_HPP
