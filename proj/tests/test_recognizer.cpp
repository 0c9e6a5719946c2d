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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "sesr/losses.hpp"
#include "sesr/recognizer.hpp"

using namespace sesr;

namespace {

template <typename T>
TensorT<T> random_spec(int t, int f, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(0.0, 1.0);
  TensorT<T> x({t, f, 1});
  for (std::size_t i = 0; i < x.numel(); ++i) x[i] = static_cast<T>(d(rng));
  return x;
}

RecognizerConfig small_config(int classes) {
  RecognizerConfig cfg;
  cfg.in_t = 24;
  cfg.in_f = 20;
  cfg.num_classes = classes;
  cfg.stage_channels = {4, 8};
  cfg.blocks_per_stage = 1;
  cfg.embedding_dim = 8;
  return cfg;
}

}  // namespace

TEST_CASE("full-size recognizer emits logits and a 256-D embedding") {
  RecognizerConfig cfg;
  cfg.num_classes = 10;
  Rng rng(1);
  Recognizer sr(cfg, rng);
  auto out = sr.forward(random_spec<float>(300, 257, 2));
  CHECK(out.logits.numel() == 10);
  CHECK(out.embedding.numel() == 256);
  for (std::size_t i = 0; i < out.logits.numel(); ++i)
    CHECK(std::isfinite(out.logits[i]));
}

TEST_CASE("forward is deterministic") {
  Rng rng(3);
  Recognizer sr(small_config(5), rng);
  auto x = random_spec<float>(24, 20, 4);
  auto a = sr.forward(x);
  auto b = sr.forward(x);
  for (std::size_t i = 0; i < a.logits.numel(); ++i)
    CHECK(a.logits[i] == b.logits[i]);
}

TEST_CASE("softmax of logits sums to one") {
  Rng rng(5);
  Recognizer sr(small_config(7), rng);
  auto out = sr.forward(random_spec<float>(24, 20, 6));
  auto p = softmax(out.logits);
  double sum = 0;
  for (std::size_t i = 0; i < p.numel(); ++i) {
    sum += p[i];
    CHECK(p[i] >= 0.0f);
  }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("cross entropy matches a scalar oracle") {
  Tensor logits({3});
  logits[0] = 0.2f;
  logits[1] = -1.0f;
  logits[2] = 2.5f;
  for (int target = 0; target < 3; ++target) {
    double denom = 0;
    for (int j = 0; j < 3; ++j) denom += std::exp(double(logits[static_cast<size_t>(j)]));
    const double expect = -std::log(std::exp(double(logits[static_cast<size_t>(target)])) / denom);
    CHECK(ce_loss(logits, target) == doctest::Approx(expect).epsilon(1e-12));
  }
  CHECK_THROWS(static_cast<void>(ce_loss(logits, 3)));
  CHECK_THROWS(static_cast<void>(ce_loss(logits, -1)));
}

TEST_CASE("recognizer end-to-end gradients match finite differences") {
  // Double precision, tiny network, CE loss at a fixed target.
  Rng rng(7);
  RecognizerConfig cfg = small_config(4);
  RecognizerT<double> sr(cfg, rng);
  auto x = random_spec<double>(24, 20, 8);
  const int target = 2;

  auto out = sr.forward(x);
  for (auto* p : sr.params()) p->zero_grad();
  auto dx = sr.backward(ce_loss_grad(out.logits, target, 1.0));

  auto loss = [&](const TensorT<double>& xin) {
    return ce_loss(sr.forward(xin).logits, target);
  };

  const double eps = 1e-6;
  double worst = 0;
  auto probe = [&](double* v, double analytic) {
    const double keep = *v;
    *v = keep + eps;
    const double lp = loss(x);
    *v = keep - eps;
    const double lm = loss(x);
    *v = keep;
    const double numeric = (lp - lm) / (2 * eps);
    // Skip near-zero gradients: central differences on a ~1.0 loss carry
    // ~1e-10 absolute noise, which swamps the relative error there.
    if (std::max(std::abs(analytic), std::abs(numeric)) < 1e-6) return;
    const double rel = std::abs(analytic - numeric) /
                       std::max(std::abs(analytic), std::abs(numeric));
    worst = std::max(worst, rel);
  };
  for (auto* p : sr.params()) {
    const std::size_t stride = std::max<std::size_t>(1, p->value.numel() / 15);
    for (std::size_t i = 0; i < p->value.numel(); i += stride)
      probe(&p->value[i], p->grad[i]);
  }
  const std::size_t sx = std::max<std::size_t>(1, x.numel() / 15);
  for (std::size_t i = 0; i < x.numel(); i += sx) probe(&x[i], dx[i]);
  CHECK(worst < 1e-4);
}

TEST_CASE("embedding is the pre-activation projection") {
  // Negative embedding coordinates must survive (no rectifier applied).
  Rng rng(9);
  Recognizer sr(small_config(5), rng);
  bool saw_negative = false;
  for (uint64_t s = 0; s < 5 && !saw_negative; ++s) {
    auto out = sr.forward(random_spec<float>(24, 20, 20 + s));
    for (std::size_t i = 0; i < out.embedding.numel(); ++i)
      if (out.embedding[i] < 0.0f) saw_negative = true;
  }
  CHECK(saw_negative);
}

TEST_CASE("config validation") {
  Rng rng(11);
  RecognizerConfig cfg = small_config(0);
  CHECK_THROWS(Recognizer(cfg, rng));
  Recognizer ok(small_config(3), rng);
  CHECK_THROWS(static_cast<void>(ok.forward(Tensor({10, 20, 1}))));
}
