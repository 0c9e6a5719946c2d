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
// Residual/skip auto-encoder speech enhancer. Five strided conv stages,
// a Dense + bidirectional GRU bottleneck, and a mirrored transposed-conv
// decoder whose every stage consumes the concatenation (feature axis) of the
// previous decoder output and the matching encoder activation. The speaker
// embedding, when enabled, is tiled over the bottleneck time steps and
// concatenated before the Dense layer.

#ifndef SESR_ENHANCER_HPP
#define SESR_ENHANCER_HPP

#include <array>
#include <optional>
#include <stdexcept>
#include <vector>

#include "sesr/layers.hpp"

namespace sesr {

struct EnhancerStageSpec {
  int features;
  int stride_t;
  int stride_f;
};

struct EnhancerConfig {
  int in_t = 300;
  int in_f = 257;
  std::vector<EnhancerStageSpec> stages = {
      {16, 1, 2}, {32, 2, 2}, {64, 2, 2}, {128, 2, 2}, {256, 2, 4}};
  int dense_units = 512;
  int gru_units = 640;  // per direction; 2*gru_units must equal bf*bc
  bool use_embedding = false;
  int embedding_dim = 256;
  int kernel_t = 3;
  int kernel_f = 3;
  double leaky_slope = 0.2;
};

struct EnhancerTrace {
  std::vector<std::array<int, 3>> encoder;  // per-stage output (T,F,C)
  std::array<int, 2> flat{};                // post-reshape
  std::array<int, 2> concat{};              // post embedding concat
  std::array<int, 2> dense{};
  std::array<int, 2> gru{};
  std::array<int, 3> reshaped{};            // bottleneck output (T,F,C)
};

template <typename T>
class EnhancerT {
 public:
  EnhancerT() = default;

  EnhancerT(EnhancerConfig cfg, Rng& rng) : cfg_(std::move(cfg)) {
    const int n = static_cast<int>(cfg_.stages.size());
    if (n < 1) throw std::invalid_argument("enhancer: needs >= 1 stage");
    // Track stage input dims (ceil-mode strided shapes).
    int t = cfg_.in_t, f = cfg_.in_f, c = 1;
    for (int i = 0; i < n; ++i) {
      const auto& s = cfg_.stages[static_cast<size_t>(i)];
      stage_in_t_.push_back(t);
      stage_in_f_.push_back(f);
      stage_in_c_.push_back(c);
      enc_.emplace_back("enc" + std::to_string(i), c, s.features,
                        cfg_.kernel_t, cfg_.kernel_f, s.stride_t, s.stride_f,
                        rng);
      enc_act_.emplace_back(static_cast<T>(cfg_.leaky_slope));
      t = (t + s.stride_t - 1) / s.stride_t;
      f = (f + s.stride_f - 1) / s.stride_f;
      c = s.features;
    }
    bt_ = t;
    bf_ = f;
    bc_ = c;
    if (2 * cfg_.gru_units != bf_ * bc_)
      throw std::invalid_argument(
          "enhancer: 2*gru_units must equal bottleneck width");
    const int dense_in =
        bf_ * bc_ + (cfg_.use_embedding ? cfg_.embedding_dim : 0);
    dense_ = DenseT<T>("bottleneck.dense", dense_in, cfg_.dense_units, rng);
    dense_act_ = LeakyReluT<T>(static_cast<T>(cfg_.leaky_slope));
    gru_ = BiGruT<T>("bottleneck.gru", cfg_.dense_units, cfg_.gru_units, rng);
    // Decoder mirrors the encoder; stage i consumes 2*C_i features.
    for (int i = n - 1; i >= 0; --i) {
      const auto& s = cfg_.stages[static_cast<size_t>(i)];
      dec_.emplace_back("dec" + std::to_string(i), 2 * s.features,
                        stage_in_c_[static_cast<size_t>(i)], cfg_.kernel_t,
                        cfg_.kernel_f, s.stride_t, s.stride_f,
                        stage_in_t_[static_cast<size_t>(i)],
                        stage_in_f_[static_cast<size_t>(i)], rng);
      // Hidden stages keep the leaky slope; the output stage is a plain
      // rectifier so the enhanced magnitude is nonnegative.
      dec_act_.emplace_back(i > 0 ? static_cast<T>(cfg_.leaky_slope) : T(0));
    }
  }

  const EnhancerConfig& config() const { return cfg_; }
  const EnhancerTrace& trace() const { return trace_; }
  bool uses_embedding() const { return cfg_.use_embedding; }

  TensorT<T> forward(const TensorT<T>& x,
                     const TensorT<T>* embedding = nullptr) {
    if (x.ndim() != 3 || x.dim(0) != cfg_.in_t || x.dim(1) != cfg_.in_f ||
        x.dim(2) != 1)
      throw std::invalid_argument("enhancer: bad input shape");
    if (cfg_.use_embedding) {
      if (embedding == nullptr ||
          static_cast<int>(embedding->numel()) != cfg_.embedding_dim)
        throw std::invalid_argument("enhancer: embedding missing or wrong dim");
    } else if (embedding != nullptr) {
      throw std::invalid_argument("enhancer: embedding not accepted");
    }

    const int n = static_cast<int>(enc_.size());
    trace_ = EnhancerTrace{};
    enc_out_.clear();
    TensorT<T> a = x;
    for (int i = 0; i < n; ++i) {
      a = enc_act_[static_cast<size_t>(i)].forward(
          enc_[static_cast<size_t>(i)].forward(a));
      trace_.encoder.push_back({a.dim(0), a.dim(1), a.dim(2)});
      enc_out_.push_back(a);
    }

    TensorT<T> flat = a.reshaped({bt_, bf_ * bc_});
    trace_.flat = {flat.dim(0), flat.dim(1)};
    TensorT<T> merged = flat;
    if (cfg_.use_embedding) {
      TensorT<T> tiled({bt_, cfg_.embedding_dim});
      for (int r = 0; r < bt_; ++r)
        std::copy(embedding->data(), embedding->data() + cfg_.embedding_dim,
                  tiled.data() + static_cast<size_t>(r) * cfg_.embedding_dim);
      merged = concat_features(flat, tiled);
    }
    trace_.concat = {merged.dim(0), merged.dim(1)};
    TensorT<T> h = dense_act_.forward(dense_.forward(merged));
    trace_.dense = {h.dim(0), h.dim(1)};
    h = gru_.forward(h);
    trace_.gru = {h.dim(0), h.dim(1)};
    TensorT<T> u = h.reshaped({bt_, bf_, bc_});
    trace_.reshaped = {u.dim(0), u.dim(1), u.dim(2)};

    TensorT<T> d = u;
    for (int k = 0; k < n; ++k) {
      const int i = n - 1 - k;
      d = concat_features(d, enc_out_[static_cast<size_t>(i)]);
      d = dec_act_[static_cast<size_t>(k)].forward(
          dec_[static_cast<size_t>(k)].forward(d));
    }
    return d;
  }

  // Backpropagates dL/d(output); accumulates parameter grads and returns
  // dL/d(input). The embedding gradient of the last forward is kept in
  // embedding_grad() (unused by training: the embedding path is frozen).
  TensorT<T> backward(const TensorT<T>& dy) {
    const int n = static_cast<int>(enc_.size());
    std::vector<TensorT<T>> skip_grad(static_cast<size_t>(n));
    TensorT<T> d = dy;
    for (int k = n - 1; k >= 0; --k) {
      const int i = n - 1 - k;
      d = dec_act_[static_cast<size_t>(k)].backward(d);
      d = dec_[static_cast<size_t>(k)].backward(d);
      TensorT<T> d_main, d_skip;
      split_features(d, enc_out_[static_cast<size_t>(i)].dim(2), d_main, d_skip);
      skip_grad[static_cast<size_t>(i)] = std::move(d_skip);
      d = std::move(d_main);
    }

    // Bottleneck
    TensorT<T> g = d.reshaped({bt_, bf_ * bc_});
    g = gru_.backward(g);
    g = dense_act_.backward(g);
    g = dense_.backward(g);
    if (cfg_.use_embedding) {
      TensorT<T> g_flat, g_emb;
      split_features(g, bf_ * bc_, g_flat, g_emb);
      emb_grad_ = TensorT<T>({cfg_.embedding_dim});
      for (int r = 0; r < bt_; ++r)
        for (int c = 0; c < cfg_.embedding_dim; ++c)
          emb_grad_[static_cast<size_t>(c)] += g_emb.at(r, c);
      g = std::move(g_flat);
    }
    TensorT<T> da = g.reshaped({bt_, bf_, bc_});

    // Encoder: bottleneck grad plus the decoder skip grads.
    for (int i = n - 1; i >= 0; --i) {
      kernels::axpy(da.numel(), T(1), skip_grad[static_cast<size_t>(i)].data(),
                    da.data());
      da = enc_act_[static_cast<size_t>(i)].backward(da);
      da = enc_[static_cast<size_t>(i)].backward(da);
    }
    return da;
  }

  const TensorT<T>& embedding_grad() const { return emb_grad_; }

  std::vector<ParamT<T>*> params() {
    std::vector<ParamT<T>*> out;
    for (auto& l : enc_)
      for (auto* p : l.params()) out.push_back(p);
    for (auto* p : dense_.params()) out.push_back(p);
    for (auto* p : gru_.params()) out.push_back(p);
    for (auto& l : dec_)
      for (auto* p : l.params()) out.push_back(p);
    return out;
  }

  // Copies weights from a non-embedding twin. The Dense rows feeding the new
  // embedding inputs are initialized small-random; everything else is an
  // exact copy.
  void warm_start_from(EnhancerT& src, Rng& rng) {
    auto dst_params = params();
    auto src_params = src.params();
    if (dst_params.size() != src_params.size())
      throw std::invalid_argument("warm_start: layer count mismatch");
    for (std::size_t i = 0; i < dst_params.size(); ++i) {
      ParamT<T>& d = *dst_params[i];
      ParamT<T>& s = *src_params[i];
      if (d.value.same_shape(s.value)) {
        d.value = s.value;
      } else if (d.name == "bottleneck.dense.w") {
        // (bf*bc + D, units) <- (bf*bc, units); extra rows small-random.
        const int units = d.value.dim(1);
        const int base = s.value.dim(0);
        std::copy(s.value.data(), s.value.data() + s.value.numel(),
                  d.value.data());
        std::uniform_real_distribution<double> dist(-1e-3, 1e-3);
        for (std::size_t j = static_cast<size_t>(base) * units;
             j < d.value.numel(); ++j)
          d.value[j] = static_cast<T>(dist(rng));
      } else {
        throw std::invalid_argument("warm_start: shape mismatch at " + d.name);
      }
    }
  }

 private:
  EnhancerConfig cfg_;
  std::vector<Conv2dT<T>> enc_;
  std::vector<LeakyReluT<T>> enc_act_;
  DenseT<T> dense_;
  LeakyReluT<T> dense_act_{T(0.2)};
  BiGruT<T> gru_;
  std::vector<ConvTranspose2dT<T>> dec_;
  std::vector<LeakyReluT<T>> dec_act_;

  std::vector<int> stage_in_t_, stage_in_f_, stage_in_c_;
  int bt_ = 0, bf_ = 0, bc_ = 0;

  std::vector<TensorT<T>> enc_out_;
  TensorT<T> emb_grad_;
  EnhancerTrace trace_;
};

using Enhancer = EnhancerT<float>;

}  // namespace sesr

#endif  // SESR_ENHANCER_HPP
