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
// ResNet-20 speaker classifier: 3x3 stem conv, three stages of three basic
// residual blocks (16/32/64 channels), global average pooling, then
// FC1 -> 256-D speaker embedding (taken pre-activation) and FC2 -> logits.
// The stem is strided (2,2) to adapt the CIFAR layout to 300x257
// spectrogram input. No normalization layers anywhere.

#ifndef SESR_RECOGNIZER_HPP
#define SESR_RECOGNIZER_HPP

#include <stdexcept>
#include <vector>

#include "sesr/layers.hpp"

namespace sesr {

struct RecognizerConfig {
  int in_t = 300;
  int in_f = 257;
  int num_classes = 0;  // required
  std::vector<int> stage_channels = {16, 32, 64};
  int blocks_per_stage = 3;
  int stem_stride = 2;
  int embedding_dim = 256;
};

template <typename T>
struct SrOutputT {
  TensorT<T> logits;     // (M)
  TensorT<T> embedding;  // (embedding_dim), pre-activation FC1 output
};

template <typename T>
class RecognizerT {
 public:
  RecognizerT() = default;

  RecognizerT(RecognizerConfig cfg, Rng& rng) : cfg_(std::move(cfg)) {
    if (cfg_.num_classes < 1)
      throw std::invalid_argument("recognizer: num_classes required");
    const int c0 = cfg_.stage_channels.at(0);
    stem_ = Conv2dT<T>("stem", 1, c0, 3, 3, cfg_.stem_stride, cfg_.stem_stride,
                       rng);
    int c_in = c0;
    for (std::size_t s = 0; s < cfg_.stage_channels.size(); ++s) {
      const int c_out = cfg_.stage_channels[s];
      for (int b = 0; b < cfg_.blocks_per_stage; ++b) {
        const int stride = (s > 0 && b == 0) ? 2 : 1;
        blocks_.emplace_back("stage" + std::to_string(s) + ".block" +
                                 std::to_string(b),
                             c_in, c_out, stride, rng);
        c_in = c_out;
      }
    }
    fc1_ = DenseT<T>("fc1", c_in, cfg_.embedding_dim, rng);
    fc2_ = DenseT<T>("fc2", cfg_.embedding_dim, cfg_.num_classes, rng);
  }

  const RecognizerConfig& config() const { return cfg_; }
  int num_classes() const { return cfg_.num_classes; }

  SrOutputT<T> forward(const TensorT<T>& x) {
    if (x.ndim() != 3 || x.dim(0) != cfg_.in_t || x.dim(1) != cfg_.in_f ||
        x.dim(2) != 1)
      throw std::invalid_argument("recognizer: bad input shape");
    TensorT<T> a = stem_act_.forward(stem_.forward(x));
    for (auto& b : blocks_) a = b.forward(a);
    a = pool_.forward(a);
    TensorT<T> emb = fc1_.forward(a);  // (1, embedding_dim)
    TensorT<T> h = fc1_act_.forward(emb);
    TensorT<T> logits = fc2_.forward(h);
    SrOutputT<T> out;
    out.logits = logits.reshaped({cfg_.num_classes});
    out.embedding = emb.reshaped({cfg_.embedding_dim});
    return out;
  }

  // dL/d(logits) in, dL/d(input spectrogram) out.
  TensorT<T> backward(const TensorT<T>& dlogits) {
    TensorT<T> g = dlogits.reshaped({1, cfg_.num_classes});
    g = fc2_.backward(g);
    g = fc1_act_.backward(g);
    g = fc1_.backward(g);
    g = pool_.backward(g);
    for (auto it = blocks_.rbegin(); it != blocks_.rend(); ++it)
      g = it->backward(g);
    g = stem_act_.backward(g);
    return stem_.backward(g);
  }

  std::vector<ParamT<T>*> params() {
    std::vector<ParamT<T>*> out;
    for (auto* p : stem_.params()) out.push_back(p);
    for (auto& b : blocks_)
      for (auto* p : b.params()) out.push_back(p);
    for (auto* p : fc1_.params()) out.push_back(p);
    for (auto* p : fc2_.params()) out.push_back(p);
    return out;
  }

 private:
  struct BasicBlock {
    Conv2dT<T> conv1, conv2, proj;
    LeakyReluT<T> act1{T(0)}, act2{T(0)};
    bool has_proj = false;
    TensorT<T> x_;  // cached input for the identity shortcut

    BasicBlock(const std::string& name, int c_in, int c_out, int stride,
               Rng& rng)
        : conv1(name + ".conv1", c_in, c_out, 3, 3, stride, stride, rng),
          conv2(name + ".conv2", c_out, c_out, 3, 3, 1, 1, rng) {
      has_proj = (stride != 1 || c_in != c_out);
      if (has_proj)
        proj = Conv2dT<T>(name + ".proj", c_in, c_out, 1, 1, stride, stride,
                          rng);
    }

    TensorT<T> forward(const TensorT<T>& x) {
      x_ = x;
      TensorT<T> y = conv2.forward(act1.forward(conv1.forward(x)));
      TensorT<T> s = has_proj ? proj.forward(x) : x;
      kernels::axpy(y.numel(), T(1), s.data(), y.data());
      return act2.forward(std::move(y));
    }

    TensorT<T> backward(const TensorT<T>& dy) {
      TensorT<T> d = act2.backward(dy);
      TensorT<T> dx = conv1.backward(act1.backward(conv2.backward(d)));
      if (has_proj) {
        TensorT<T> ds = proj.backward(d);
        kernels::axpy(dx.numel(), T(1), ds.data(), dx.data());
      } else {
        kernels::axpy(dx.numel(), T(1), d.data(), dx.data());
      }
      return dx;
    }

    std::vector<ParamT<T>*> params() {
      std::vector<ParamT<T>*> out;
      for (auto* p : conv1.params()) out.push_back(p);
      for (auto* p : conv2.params()) out.push_back(p);
      if (has_proj)
        for (auto* p : proj.params()) out.push_back(p);
      return out;
    }
  };

  RecognizerConfig cfg_;
  Conv2dT<T> stem_;
  LeakyReluT<T> stem_act_{T(0)};
  std::vector<BasicBlock> blocks_;
  GlobalAvgPoolT<T> pool_;
  DenseT<T> fc1_, fc2_;
  LeakyReluT<T> fc1_act_{T(0)};
};

using Recognizer = RecognizerT<float>;
using SrOutput = SrOutputT<float>;

}  // namespace sesr

#endif  // SESR_RECOGNIZER_HPP
