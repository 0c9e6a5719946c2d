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
// Network layers with explicit forward/backward passes. Layers cache the
// activations of the most recent forward call; backward() consumes them and
// accumulates into each parameter's .grad. Single-sample tensors throughout;
// minibatches are handled by accumulating gradients across samples.

#ifndef SESR_LAYERS_HPP
#define SESR_LAYERS_HPP

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "sesr/kernels.hpp"
#include "sesr/tensor.hpp"

namespace sesr {

using Rng = std::mt19937_64;

template <typename T>
struct ParamT {
  std::string name;
  TensorT<T> value;
  TensorT<T> grad;

  void init_shape(std::string n, std::vector<int> shape) {
    name = std::move(n);
    value = TensorT<T>(shape);
    grad = TensorT<T>(std::move(shape));
  }
  void zero_grad() { grad.fill(T(0)); }
};

template <typename T>
void fill_uniform(TensorT<T>& t, T limit, Rng& rng) {
  std::uniform_real_distribution<double> dist(-double(limit), double(limit));
  for (std::size_t i = 0; i < t.numel(); ++i) t[i] = static_cast<T>(dist(rng));
}

// ---------------------------------------------------------------------------
// Conv2d: (T,F,Cin) -> (ceil(T/st), ceil(F/sf), Cout), same-ceil padding.
// Weight layout (kt*kf*Cin, Cout) so forward is one im2col + gemm.
// ---------------------------------------------------------------------------
template <typename T>
class Conv2dT {
 public:
  Conv2dT() = default;
  Conv2dT(std::string name, int c_in, int c_out, int k_t, int k_f, int s_t,
          int s_f, Rng& rng)
      : c_in_(c_in), c_out_(c_out), k_t_(k_t), k_f_(k_f), s_t_(s_t),
        s_f_(s_f) {
    w_.init_shape(name + ".w", {k_t * k_f * c_in, c_out});
    b_.init_shape(name + ".b", {c_out});
    const T limit = static_cast<T>(std::sqrt(6.0 / (k_t * k_f * c_in)));
    fill_uniform(w_.value, limit, rng);
  }

  TensorT<T> forward(const TensorT<T>& x) {
    geom_ = kernels::ConvGeom{x.dim(0), x.dim(1), c_in_, k_t_, k_f_,
                              s_t_, s_f_};
    if (x.dim(2) != c_in_) throw std::invalid_argument("conv: channel mismatch");
    const int ot = geom_.out_t(), of = geom_.out_f();
    const int rows = ot * of, cols = k_t_ * k_f_ * c_in_;
    col_ = TensorT<T>({rows, cols});
    kernels::im2col(geom_, x.data(), col_.data());
    TensorT<T> y({ot, of, c_out_});
    kernels::gemm(false, false, rows, c_out_, cols, T(1), col_.data(), cols,
                  w_.value.data(), c_out_, T(0), y.data(), c_out_);
    T* yd = y.data();
    const T* bd = b_.value.data();
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < c_out_; ++c) yd[static_cast<size_t>(r) * c_out_ + c] += bd[c];
    return y;
  }

  TensorT<T> backward(const TensorT<T>& dy) {
    const int rows = geom_.out_t() * geom_.out_f();
    const int cols = k_t_ * k_f_ * c_in_;
    // dW += col^T * dy ; db += column sums of dy
    kernels::gemm(true, false, cols, c_out_, rows, T(1), col_.data(), cols,
                  dy.data(), c_out_, T(1), w_.grad.data(), c_out_);
    const T* dyd = dy.data();
    T* dbd = b_.grad.data();
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < c_out_; ++c) dbd[c] += dyd[static_cast<size_t>(r) * c_out_ + c];
    // dx = col2im(dy * W^T)
    TensorT<T> dcol({rows, cols});
    kernels::gemm(false, true, rows, cols, c_out_, T(1), dy.data(), c_out_,
                  w_.value.data(), c_out_, T(0), dcol.data(), cols);
    TensorT<T> dx({geom_.in_t, geom_.in_f, c_in_});
    kernels::col2im(geom_, dcol.data(), dx.data());
    return dx;
  }

  std::vector<ParamT<T>*> params() { return {&w_, &b_}; }
  ParamT<T>& weight() { return w_; }
  ParamT<T>& bias() { return b_; }

 private:
  int c_in_ = 0, c_out_ = 0, k_t_ = 0, k_f_ = 0, s_t_ = 1, s_f_ = 1;
  ParamT<T> w_, b_;
  kernels::ConvGeom geom_;
  TensorT<T> col_;
};

// ---------------------------------------------------------------------------
// ConvTranspose2d: exact spatial adjoint of a Conv2d with the given kernel
// and strides, so an encoder stage's input shape is reproduced bit-for-bit
// by the mirroring decoder stage. Target output dims are fixed at
// construction time via the mirrored conv geometry.
// ---------------------------------------------------------------------------
template <typename T>
class ConvTranspose2dT {
 public:
  ConvTranspose2dT() = default;
  // Maps (in_t,in_f,c_in) -> (out_t,out_f,c_out) where the mirrored conv
  // maps (out_t,out_f) -> (in_t,in_f) with stride (s_t,s_f).
  ConvTranspose2dT(std::string name, int c_in, int c_out, int k_t, int k_f,
                   int s_t, int s_f, int out_t, int out_f, Rng& rng)
      : c_in_(c_in), c_out_(c_out) {
    geom_ = kernels::ConvGeom{out_t, out_f, c_out, k_t, k_f, s_t, s_f};
    w_.init_shape(name + ".w", {k_t * k_f * c_out, c_in});
    b_.init_shape(name + ".b", {c_out});
    const T limit = static_cast<T>(std::sqrt(6.0 / (k_t * k_f * c_in)));
    fill_uniform(w_.value, limit, rng);
  }

  TensorT<T> forward(const TensorT<T>& x) {
    if (x.dim(0) != geom_.out_t() || x.dim(1) != geom_.out_f() ||
        x.dim(2) != c_in_)
      throw std::invalid_argument("conv_transpose: input shape mismatch");
    x_ = x;
    const int rows = geom_.out_t() * geom_.out_f();
    const int cols = static_cast<int>(w_.value.dim(0));
    TensorT<T> col({rows, cols});
    // col = x * W^T, then scatter into the output image.
    kernels::gemm(false, true, rows, cols, c_in_, T(1), x.data(), c_in_,
                  w_.value.data(), c_in_, T(0), col.data(), cols);
    TensorT<T> y({geom_.in_t, geom_.in_f, c_out_});
    kernels::col2im(geom_, col.data(), y.data());
    T* yd = y.data();
    const T* bd = b_.value.data();
    const std::size_t spatial = static_cast<size_t>(geom_.in_t) * geom_.in_f;
    for (std::size_t r = 0; r < spatial; ++r)
      for (int c = 0; c < c_out_; ++c) yd[r * c_out_ + c] += bd[c];
    return y;
  }

  TensorT<T> backward(const TensorT<T>& dy) {
    const int rows = geom_.out_t() * geom_.out_f();
    const int cols = static_cast<int>(w_.value.dim(0));
    TensorT<T> dcol({rows, cols});
    kernels::im2col(geom_, dy.data(), dcol.data());
    // dW += dcol^T * x ; dx = dcol * W ; db += per-channel sums of dy
    kernels::gemm(true, false, cols, c_in_, rows, T(1), dcol.data(), cols,
                  x_.data(), c_in_, T(1), w_.grad.data(), c_in_);
    TensorT<T> dx({geom_.out_t(), geom_.out_f(), c_in_});
    kernels::gemm(false, false, rows, c_in_, cols, T(1), dcol.data(), cols,
                  w_.value.data(), c_in_, T(0), dx.data(), c_in_);
    const T* dyd = dy.data();
    T* dbd = b_.grad.data();
    const std::size_t spatial = static_cast<size_t>(geom_.in_t) * geom_.in_f;
    for (std::size_t r = 0; r < spatial; ++r)
      for (int c = 0; c < c_out_; ++c) dbd[c] += dyd[r * c_out_ + c];
    return dx;
  }

  std::vector<ParamT<T>*> params() { return {&w_, &b_}; }

 private:
  int c_in_ = 0, c_out_ = 0;
  ParamT<T> w_, b_;
  kernels::ConvGeom geom_;  // geometry of the mirrored forward conv
  TensorT<T> x_;
};

// ---------------------------------------------------------------------------
// Dense: rows of x are independent positions. x (R,in) -> y (R,out).
// ---------------------------------------------------------------------------
template <typename T>
class DenseT {
 public:
  DenseT() = default;
  DenseT(std::string name, int in, int out, Rng& rng) : in_(in), out_(out) {
    w_.init_shape(name + ".w", {in, out});
    b_.init_shape(name + ".b", {out});
    fill_uniform(w_.value, static_cast<T>(std::sqrt(6.0 / in)), rng);
  }

  TensorT<T> forward(const TensorT<T>& x) {
    if (x.dim(1) != in_) throw std::invalid_argument("dense: width mismatch");
    x_ = x;
    const int rows = x.dim(0);
    TensorT<T> y({rows, out_});
    kernels::gemm(false, false, rows, out_, in_, T(1), x.data(), in_,
                  w_.value.data(), out_, T(0), y.data(), out_);
    T* yd = y.data();
    const T* bd = b_.value.data();
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < out_; ++c) yd[static_cast<size_t>(r) * out_ + c] += bd[c];
    return y;
  }

  TensorT<T> backward(const TensorT<T>& dy) {
    const int rows = x_.dim(0);
    kernels::gemm(true, false, in_, out_, rows, T(1), x_.data(), in_,
                  dy.data(), out_, T(1), w_.grad.data(), out_);
    const T* dyd = dy.data();
    T* dbd = b_.grad.data();
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < out_; ++c) dbd[c] += dyd[static_cast<size_t>(r) * out_ + c];
    TensorT<T> dx({rows, in_});
    kernels::gemm(false, true, rows, in_, out_, T(1), dy.data(), out_,
                  w_.value.data(), out_, T(0), dx.data(), in_);
    return dx;
  }

  std::vector<ParamT<T>*> params() { return {&w_, &b_}; }
  ParamT<T>& weight() { return w_; }
  int in_features() const { return in_; }
  int out_features() const { return out_; }

 private:
  int in_ = 0, out_ = 0;
  ParamT<T> w_, b_;
  TensorT<T> x_;
};

// ---------------------------------------------------------------------------
// Activations. Forward mutates a copy and caches slopes for backward.
// ---------------------------------------------------------------------------
template <typename T>
class LeakyReluT {
 public:
  explicit LeakyReluT(T negative_slope = T(0.2)) : ns_(negative_slope) {}

  TensorT<T> forward(TensorT<T> x) {
    slope_ = TensorT<T>(x.shape());
    kernels::leaky_relu_forward(x.data(), slope_.data(), x.numel(), ns_);
    return x;
  }
  TensorT<T> backward(const TensorT<T>& dy) {
    TensorT<T> dx(dy.shape());
    kernels::slope_backward(slope_.data(), dy.data(), dx.data(), dy.numel());
    return dx;
  }

 private:
  T ns_;
  TensorT<T> slope_;
};

template <typename T>
using ReluT = LeakyReluT<T>;  // negative_slope 0

// ---------------------------------------------------------------------------
// Bi-directional GRU over a (T, in) sequence; output (T, 2*hidden).
// Gate order [z, r, n]; update h' = (1 - z) * n + z * h.
// ---------------------------------------------------------------------------
template <typename T>
class BiGruT {
 public:
  BiGruT() = default;
  BiGruT(std::string name, int in, int hidden, Rng& rng)
      : in_(in), h_(hidden) {
    dir_[0].init(name + ".fwd", in, hidden, rng);
    dir_[1].init(name + ".bwd", in, hidden, rng);
  }

  TensorT<T> forward(const TensorT<T>& x) {
    if (x.dim(1) != in_) throw std::invalid_argument("gru: width mismatch");
    const int steps = x.dim(0);
    TensorT<T> y({steps, 2 * h_});
    for (int d = 0; d < 2; ++d) {
      dir_[d].run_forward(x, d == 1);
      for (int t = 0; t < steps; ++t) {
        const T* src = dir_[d].h_out.data() + static_cast<size_t>(t) * h_;
        T* dst = y.data() + static_cast<size_t>(t) * 2 * h_ + d * h_;
        std::copy(src, src + h_, dst);
      }
    }
    return y;
  }

  TensorT<T> backward(const TensorT<T>& dy) {
    const int steps = dy.dim(0);
    TensorT<T> dx({steps, in_});
    for (int d = 0; d < 2; ++d) {
      TensorT<T> dh({steps, h_});
      for (int t = 0; t < steps; ++t) {
        const T* src = dy.data() + static_cast<size_t>(t) * 2 * h_ + d * h_;
        std::copy(src, src + h_, dh.data() + static_cast<size_t>(t) * h_);
      }
      dir_[d].run_backward(dh, d == 1, dx);
    }
    return dx;
  }

  std::vector<ParamT<T>*> params() {
    return {&dir_[0].wx, &dir_[0].wh, &dir_[0].bx, &dir_[0].bh,
            &dir_[1].wx, &dir_[1].wh, &dir_[1].bx, &dir_[1].bh};
  }

 private:
  static T sigmoid(T v) { return T(1) / (T(1) + std::exp(-v)); }

  struct Direction {
    ParamT<T> wx, wh, bx, bh;  // (in,3H), (H,3H), (3H), (3H)
    int in = 0, h = 0;
    // caches, indexed [t]
    TensorT<T> x_seq, h_prev, z, r, n, ghn, h_out;

    void init(const std::string& name, int in_dim, int hidden, Rng& rng) {
      in = in_dim;
      h = hidden;
      wx.init_shape(name + ".wx", {in, 3 * h});
      wh.init_shape(name + ".wh", {h, 3 * h});
      bx.init_shape(name + ".bx", {3 * h});
      bh.init_shape(name + ".bh", {3 * h});
      const T lim = static_cast<T>(1.0 / std::sqrt(double(hidden)));
      fill_uniform(wx.value, lim, rng);
      fill_uniform(wh.value, lim, rng);
    }

    void run_forward(const TensorT<T>& x, bool reversed) {
      const int steps = x.dim(0);
      x_seq = x;
      h_prev = TensorT<T>({steps, h});
      z = TensorT<T>({steps, h});
      r = TensorT<T>({steps, h});
      n = TensorT<T>({steps, h});
      ghn = TensorT<T>({steps, h});
      h_out = TensorT<T>({steps, h});
      // input projection for all steps in one gemm
      TensorT<T> gx({steps, 3 * h});
      kernels::gemm(false, false, steps, 3 * h, in, T(1), x.data(), in,
                    wx.value.data(), 3 * h, T(0), gx.data(), 3 * h);
      std::vector<T> hc(static_cast<size_t>(h), T(0));
      std::vector<T> gh(static_cast<size_t>(3 * h));
      for (int s = 0; s < steps; ++s) {
        const int t = reversed ? steps - 1 - s : s;
        std::copy(hc.begin(), hc.end(), h_prev.data() + static_cast<size_t>(t) * h);
        kernels::gemm(false, false, 1, 3 * h, h, T(1), hc.data(), h,
                      wh.value.data(), 3 * h, T(0), gh.data(), 3 * h);
        const T* gxt = gx.data() + static_cast<size_t>(t) * 3 * h;
        for (int j = 0; j < h; ++j) {
          const T zj = sigmoid(gxt[j] + bx.value[j] + gh[j] + bh.value[j]);
          const T rj = sigmoid(gxt[h + j] + bx.value[h + j] + gh[h + j] +
                               bh.value[h + j]);
          const T ghn_j = gh[2 * h + j] + bh.value[2 * h + j];
          const T nj = std::tanh(gxt[2 * h + j] + bx.value[2 * h + j] + rj * ghn_j);
          z.at(t, j) = zj;
          r.at(t, j) = rj;
          n.at(t, j) = nj;
          ghn.at(t, j) = ghn_j;
          hc[static_cast<size_t>(j)] = (T(1) - zj) * nj + zj * hc[static_cast<size_t>(j)];
        }
        std::copy(hc.begin(), hc.end(), h_out.data() + static_cast<size_t>(t) * h);
      }
    }

    void run_backward(const TensorT<T>& dh_out, bool reversed, TensorT<T>& dx) {
      const int steps = dh_out.dim(0);
      std::vector<T> dh(static_cast<size_t>(h), T(0));
      TensorT<T> dgx({steps, 3 * h});
      std::vector<T> dgh(static_cast<size_t>(3 * h));
      std::vector<T> dh_from_gh(static_cast<size_t>(h));
      for (int s = steps - 1; s >= 0; --s) {
        const int t = reversed ? steps - 1 - s : s;
        T* dgxt = dgx.data() + static_cast<size_t>(t) * 3 * h;
        for (int j = 0; j < h; ++j) {
          const T d = dh[static_cast<size_t>(j)] + dh_out.at(t, j);
          const T zj = z.at(t, j), rj = r.at(t, j), nj = n.at(t, j);
          const T hp = h_prev.at(t, j);
          const T dz = d * (hp - nj);
          const T dn = d * (T(1) - zj);
          T dh_next = d * zj;
          const T dgn = dn * (T(1) - nj * nj);
          const T dr = dgn * ghn.at(t, j);
          const T dghn = dgn * rj;
          const T dgz = dz * zj * (T(1) - zj);
          const T dgr = dr * rj * (T(1) - rj);
          dgxt[j] = dgz;
          dgxt[h + j] = dgr;
          dgxt[2 * h + j] = dgn;
          dgh[static_cast<size_t>(j)] = dgz;
          dgh[static_cast<size_t>(h + j)] = dgr;
          dgh[static_cast<size_t>(2 * h + j)] = dghn;
          dh[static_cast<size_t>(j)] = dh_next;
          bx.grad[static_cast<size_t>(j)] += dgz;
          bx.grad[static_cast<size_t>(h + j)] += dgr;
          bx.grad[static_cast<size_t>(2 * h + j)] += dgn;
          bh.grad[static_cast<size_t>(j)] += dgz;
          bh.grad[static_cast<size_t>(h + j)] += dgr;
          bh.grad[static_cast<size_t>(2 * h + j)] += dghn;
        }
        // dWh += h_prev^T dgh ; dh += dgh Wh^T
        kernels::gemm(true, false, h, 3 * h, 1, T(1),
                      h_prev.data() + static_cast<size_t>(t) * h, h, dgh.data(),
                      3 * h, T(1), wh.grad.data(), 3 * h);
        kernels::gemm(false, true, 1, h, 3 * h, T(1), dgh.data(), 3 * h,
                      wh.value.data(), 3 * h, T(0), dh_from_gh.data(), h);
        for (int j = 0; j < h; ++j) dh[static_cast<size_t>(j)] += dh_from_gh[static_cast<size_t>(j)];
      }
      // dWx += x^T dgx ; dx += dgx Wx^T
      kernels::gemm(true, false, in, 3 * h, steps, T(1), x_seq.data(), in,
                    dgx.data(), 3 * h, T(1), wx.grad.data(), 3 * h);
      kernels::gemm(false, true, steps, in, 3 * h, T(1), dgx.data(), 3 * h,
                    wx.value.data(), 3 * h, T(1), dx.data(), in);
    }
  };

  int in_ = 0, h_ = 0;
  Direction dir_[2];
};

// ---------------------------------------------------------------------------
// Global average pool over (T,F): (T,F,C) -> (1,C).
// ---------------------------------------------------------------------------
template <typename T>
class GlobalAvgPoolT {
 public:
  TensorT<T> forward(const TensorT<T>& x) {
    t_ = x.dim(0);
    f_ = x.dim(1);
    const int c = x.dim(2);
    TensorT<T> y({1, c});
    const std::size_t spatial = static_cast<size_t>(t_) * f_;
    for (int ch = 0; ch < c; ++ch) {
      double acc = 0;
      for (std::size_t r = 0; r < spatial; ++r) acc += x[r * c + ch];
      y[static_cast<size_t>(ch)] = static_cast<T>(acc / double(spatial));
    }
    return y;
  }
  TensorT<T> backward(const TensorT<T>& dy) {
    const int c = dy.dim(1);
    TensorT<T> dx({t_, f_, c});
    const std::size_t spatial = static_cast<size_t>(t_) * f_;
    const T inv = T(1) / static_cast<T>(spatial);
    for (std::size_t r = 0; r < spatial; ++r)
      for (int ch = 0; ch < c; ++ch) dx[r * c + ch] = dy[static_cast<size_t>(ch)] * inv;
    return dx;
  }

 private:
  int t_ = 0, f_ = 0;
};

// Feature-axis concatenation helpers (last dimension).
template <typename T>
TensorT<T> concat_features(const TensorT<T>& a, const TensorT<T>& b) {
  if (a.ndim() != b.ndim()) throw std::invalid_argument("concat: rank mismatch");
  std::vector<int> shape = a.shape();
  const int ca = shape.back(), cb = b.shape().back();
  for (int i = 0; i + 1 < a.ndim(); ++i)
    if (a.dim(i) != b.dim(i)) throw std::invalid_argument("concat: shape mismatch");
  shape.back() = ca + cb;
  TensorT<T> out(shape);
  const std::size_t rows = a.numel() / ca;
  for (std::size_t r = 0; r < rows; ++r) {
    std::copy(a.data() + r * ca, a.data() + (r + 1) * ca,
              out.data() + r * (ca + cb));
    std::copy(b.data() + r * cb, b.data() + (r + 1) * cb,
              out.data() + r * (ca + cb) + ca);
  }
  return out;
}

template <typename T>
void split_features(const TensorT<T>& d, int ca, TensorT<T>& da, TensorT<T>& db) {
  std::vector<int> sa = d.shape(), sb = d.shape();
  const int c = d.shape().back();
  sa.back() = ca;
  sb.back() = c - ca;
  da = TensorT<T>(sa);
  db = TensorT<T>(sb);
  const std::size_t rows = d.numel() / c;
  for (std::size_t r = 0; r < rows; ++r) {
    std::copy(d.data() + r * c, d.data() + r * c + ca, da.data() + r * ca);
    std::copy(d.data() + r * c + ca, d.data() + (r + 1) * c,
              db.data() + r * (c - ca));
  }
}

}  // namespace sesr

#endif  // SESR_LAYERS_HPP
