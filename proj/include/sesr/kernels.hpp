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
// Compute kernels used by the network layers: gemm, im2col/col2im with
// TF-style "same" ceiling padding, and elementwise activations.
//
// gemm has three implementations:
//   * gemm_serial  — naive triple loop, the reference the others are tested
//                    against
//   * gemm_omp     — OpenMP-parallel over output rows, vectorized inner loop
//   * gemm         — the production entry point; dispatches to CBLAS when
//                    built with SESR_USE_CBLAS, else to gemm_omp
//
// Accumulation order per output element is fixed in all three, so results
// are deterministic regardless of thread count.

#ifndef SESR_KERNELS_HPP
#define SESR_KERNELS_HPP

#include <algorithm>
#include <cmath>
#include <cstring>

#ifdef SESR_USE_CBLAS
#include <cblas.h>
#endif

#include "sesr/tensor.hpp"

namespace sesr::kernels {

// C = alpha * op(A) * op(B) + beta * C, row-major.
// op(A) is (M,K), op(B) is (K,N), C is (M,N).

template <typename T>
void gemm_serial(bool trans_a, bool trans_b, int m, int n, int k, T alpha,
                 const T* a, int lda, const T* b, int ldb, T beta, T* c,
                 int ldc) {
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      T acc = 0;
      for (int p = 0; p < k; ++p) {
        T av = trans_a ? a[static_cast<size_t>(p) * lda + i]
                       : a[static_cast<size_t>(i) * lda + p];
        T bv = trans_b ? b[static_cast<size_t>(j) * ldb + p]
                       : b[static_cast<size_t>(p) * ldb + j];
        acc += av * bv;
      }
      T& out = c[static_cast<size_t>(i) * ldc + j];
      out = alpha * acc + beta * out;
    }
  }
}

template <typename T>
void gemm_omp(bool trans_a, bool trans_b, int m, int n, int k, T alpha,
              const T* a, int lda, const T* b, int ldb, T beta, T* c,
              int ldc) {
  if (!trans_a && !trans_b) {
    // Stream rows of B; inner loop over n vectorizes.
#pragma omp parallel for schedule(static)
    for (int i = 0; i < m; ++i) {
      T* crow = c + static_cast<size_t>(i) * ldc;
      if (beta == T(0)) {
        std::fill(crow, crow + n, T(0));
      } else if (beta != T(1)) {
        for (int j = 0; j < n; ++j) crow[j] *= beta;
      }
      for (int p = 0; p < k; ++p) {
        const T av = alpha * a[static_cast<size_t>(i) * lda + p];
        const T* brow = b + static_cast<size_t>(p) * ldb;
#pragma omp simd
        for (int j = 0; j < n; ++j) crow[j] += av * brow[j];
      }
    }
    return;
  }
#pragma omp parallel for schedule(static)
  for (int i = 0; i < m; ++i)
    gemm_serial(trans_a, trans_b, 1, n, k, alpha,
                trans_a ? a + i : a + static_cast<size_t>(i) * lda, lda, b,
                ldb, beta, c + static_cast<size_t>(i) * ldc, ldc);
}

#ifdef SESR_USE_CBLAS
inline void gemm_blas(bool trans_a, bool trans_b, int m, int n, int k,
                      float alpha, const float* a, int lda, const float* b,
                      int ldb, float beta, float* c, int ldc) {
  cblas_sgemm(CblasRowMajor, trans_a ? CblasTrans : CblasNoTrans,
              trans_b ? CblasTrans : CblasNoTrans, m, n, k, alpha, a, lda, b,
              ldb, beta, c, ldc);
}
inline void gemm_blas(bool trans_a, bool trans_b, int m, int n, int k,
                      double alpha, const double* a, int lda, const double* b,
                      int ldb, double beta, double* c, int ldc) {
  cblas_dgemm(CblasRowMajor, trans_a ? CblasTrans : CblasNoTrans,
              trans_b ? CblasTrans : CblasNoTrans, m, n, k, alpha, a, lda, b,
              ldb, beta, c, ldc);
}
#endif

template <typename T>
void gemm(bool trans_a, bool trans_b, int m, int n, int k, T alpha,
          const T* a, int lda, const T* b, int ldb, T beta, T* c, int ldc) {
  if (m == 0 || n == 0) return;
#ifdef SESR_USE_CBLAS
  gemm_blas(trans_a, trans_b, m, n, k, alpha, a, lda, b, ldb, beta, c, ldc);
#else
  gemm_omp(trans_a, trans_b, m, n, k, alpha, a, lda, b, ldb, beta, c, ldc);
#endif
}

// TF-style SAME padding with ceil-mode output size: out = ceil(in / stride),
// pad_total = max((out-1)*stride + kernel - in, 0), split low = pad_total/2.
struct ConvGeom {
  int in_t = 0, in_f = 0, channels = 0;
  int k_t = 0, k_f = 0;
  int s_t = 1, s_f = 1;

  int out_t() const { return (in_t + s_t - 1) / s_t; }
  int out_f() const { return (in_f + s_f - 1) / s_f; }
  int pad_t_lo() const { return pad_lo(in_t, k_t, s_t); }
  int pad_f_lo() const { return pad_lo(in_f, k_f, s_f); }

  static int pad_lo(int in, int k, int s) {
    int out = (in + s - 1) / s;
    int total = std::max((out - 1) * s + k - in, 0);
    return total / 2;
  }
};

// Unrolls (T,F,C) patches into rows of col: (out_t*out_f, k_t*k_f*C).
template <typename T>
void im2col(const ConvGeom& g, const T* in, T* col) {
  const int ot = g.out_t(), of = g.out_f();
  const int pt = g.pad_t_lo(), pf = g.pad_f_lo();
  const int c = g.channels;
  const int row_len = g.k_t * g.k_f * c;
#pragma omp parallel for schedule(static)
  for (int i = 0; i < ot; ++i) {
    for (int j = 0; j < of; ++j) {
      T* row = col + (static_cast<size_t>(i) * of + j) * row_len;
      for (int dt = 0; dt < g.k_t; ++dt) {
        const int t = i * g.s_t - pt + dt;
        for (int df = 0; df < g.k_f; ++df) {
          const int f = j * g.s_f - pf + df;
          T* dst = row + (static_cast<size_t>(dt) * g.k_f + df) * c;
          if (t < 0 || t >= g.in_t || f < 0 || f >= g.in_f) {
            std::fill(dst, dst + c, T(0));
          } else {
            const T* src = in + (static_cast<size_t>(t) * g.in_f + f) * c;
            std::copy(src, src + c, dst);
          }
        }
      }
    }
  }
}

// Adjoint of im2col: scatters col rows back into the (T,F,C) image,
// accumulating overlaps. `in` must be zeroed by the caller.
template <typename T>
void col2im(const ConvGeom& g, const T* col, T* in) {
  const int ot = g.out_t(), of = g.out_f();
  const int pt = g.pad_t_lo(), pf = g.pad_f_lo();
  const int c = g.channels;
  const int row_len = g.k_t * g.k_f * c;
  // Serial: overlapping scatter; keeps accumulation order fixed.
  for (int i = 0; i < ot; ++i) {
    for (int j = 0; j < of; ++j) {
      const T* row = col + (static_cast<size_t>(i) * of + j) * row_len;
      for (int dt = 0; dt < g.k_t; ++dt) {
        const int t = i * g.s_t - pt + dt;
        if (t < 0 || t >= g.in_t) continue;
        for (int df = 0; df < g.k_f; ++df) {
          const int f = j * g.s_f - pf + df;
          if (f < 0 || f >= g.in_f) continue;
          const T* src = row + (static_cast<size_t>(dt) * g.k_f + df) * c;
          T* dst = in + (static_cast<size_t>(t) * g.in_f + f) * c;
          for (int q = 0; q < c; ++q) dst[q] += src[q];
        }
      }
    }
  }
}

// Elementwise kernels. Masks are stored as the activation slopes so the
// backward pass is a single multiply.

template <typename T>
void leaky_relu_forward(T* x, T* slope, std::size_t n, T negative_slope) {
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
    const T s = x[i] > T(0) ? T(1) : negative_slope;
    slope[i] = s;
    x[i] *= s;
  }
}

template <typename T>
void slope_backward(const T* slope, const T* dy, T* dx, std::size_t n) {
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i)
    dx[i] = dy[i] * slope[i];
}

template <typename T>
void axpy(std::size_t n, T alpha, const T* x, T* y) {
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i)
    y[i] += alpha * x[i];
}

}  // namespace sesr::kernels

#endif  // SESR_KERNELS_HPP
