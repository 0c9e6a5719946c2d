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
// Compares the serial reference gemm, the OpenMP kernel, and the production
// dispatch (CBLAS when available) on conv-sized problems.

#include <chrono>
#include <cstdio>
#include <random>
#include <vector>

#include "sesr/kernels.hpp"

using namespace sesr::kernels;

namespace {

using Clock = std::chrono::steady_clock;

double time_gflops(int m, int n, int k, int reps,
                   void (*fn)(bool, bool, int, int, int, float, const float*,
                              int, const float*, int, float, float*, int),
                   const float* a, const float* b, float* c) {
  fn(false, false, m, n, k, 1.0f, a, k, b, n, 0.0f, c, n);  // warm up
  const auto t0 = Clock::now();
  for (int r = 0; r < reps; ++r)
    fn(false, false, m, n, k, 1.0f, a, k, b, n, 0.0f, c, n);
  const double s = std::chrono::duration<double>(Clock::now() - t0).count();
  return 2.0 * m * n * k * reps / s / 1e9;
}

}  // namespace

int main() {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<float> d(-1.0f, 1.0f);

  // (m,n,k) drawn from the actual conv/dense workloads.
  const int shapes[][3] = {
      {300 * 129, 16, 9},     // first encoder stage
      {19 * 5, 256, 1152},    // deepest encoder stage
      {19, 512, 1280},        // bottleneck dense
      {512, 512, 512},        // square reference point
  };

  std::puts("impl            m       n     k       GFLOP/s");
  for (const auto& sh : shapes) {
    const int m = sh[0], n = sh[1], k = sh[2];
    std::vector<float> a(static_cast<size_t>(m) * k), b(static_cast<size_t>(k) * n),
        c(static_cast<size_t>(m) * n);
    for (auto& x : a) x = d(rng);
    for (auto& x : b) x = d(rng);
    const long flops = 2L * m * n * k;
    const int reps = std::max(1, static_cast<int>(2e9 / flops));

    std::printf("serial   %8d %7d %5d  %10.2f\n", m, n, k,
                time_gflops(m, n, k, std::max(1, reps / 8), &gemm_serial<float>,
                            a.data(), b.data(), c.data()));
    std::printf("omp      %8d %7d %5d  %10.2f\n", m, n, k,
                time_gflops(m, n, k, reps, &gemm_omp<float>, a.data(), b.data(),
                            c.data()));
    std::printf("dispatch %8d %7d %5d  %10.2f\n", m, n, k,
                time_gflops(m, n, k, reps, &gemm<float>, a.data(), b.data(),
                            c.data()));
  }
  return 0;
}
