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

#include <array>
#include <cmath>
#include <random>

#include "sesr/adam.hpp"
#include "sesr/enhancer.hpp"
#include "sesr/losses.hpp"

using namespace sesr;

namespace {

Tensor random_spec(int t, int f, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> d(0.0f, 1.0f);
  Tensor x({t, f, 1});
  for (std::size_t i = 0; i < x.numel(); ++i) x[i] = d(rng);
  return x;
}

// Small config that keeps the full architecture (5 conv stages + dense +
// bi-gru bottleneck) but runs fast.
EnhancerConfig small_config() {
  EnhancerConfig cfg;
  cfg.in_t = 40;
  cfg.in_f = 33;
  cfg.stages = {{4, 1, 2}, {8, 2, 2}, {8, 2, 2}};
  // bottleneck: t=10, f=5, c=8 -> width 40 -> gru 20/dir
  cfg.dense_units = 16;
  cfg.gru_units = 20;
  cfg.embedding_dim = 6;
  return cfg;
}

}  // namespace

TEST_CASE("encoder/bottleneck trace reproduces the published shape chain") {
  EnhancerConfig cfg;  // defaults: (300,257,1) input
  Rng rng(1);
  Enhancer se(cfg, rng);
  Tensor x = random_spec(300, 257, 2);
  Tensor y = se.forward(x);

  const auto& tr = se.trace();
  const std::array<std::array<int, 3>, 5> expect = {{{300, 129, 16},
                                                     {150, 65, 32},
                                                     {75, 33, 64},
                                                     {38, 17, 128},
                                                     {19, 5, 256}}};
  REQUIRE(tr.encoder.size() == 5);
  for (int i = 0; i < 5; ++i) CHECK(tr.encoder[static_cast<size_t>(i)] == expect[static_cast<size_t>(i)]);
  CHECK(tr.flat == std::array<int, 2>{19, 1280});
  CHECK(tr.concat == std::array<int, 2>{19, 1280});  // no embedding path
  CHECK(tr.dense == std::array<int, 2>{19, 512});
  CHECK(tr.gru == std::array<int, 2>{19, 1280});
  CHECK(tr.reshaped == std::array<int, 3>{19, 5, 256});
  CHECK(y.dim(0) == 300);
  CHECK(y.dim(1) == 257);
  CHECK(y.dim(2) == 1);
}

TEST_CASE("embedding concat widens the bottleneck from 1280 to 1536") {
  EnhancerConfig cfg;
  cfg.use_embedding = true;
  cfg.embedding_dim = 256;
  Rng rng(3);
  Enhancer se(cfg, rng);
  Tensor x = random_spec(300, 257, 4);
  Tensor emb({256});
  for (std::size_t i = 0; i < emb.numel(); ++i) emb[i] = 0.01f * float(i % 17);
  Tensor y = se.forward(x, &emb);
  CHECK(se.trace().concat == std::array<int, 2>{19, 1536});
  CHECK(y.dim(1) == 257);
}

TEST_CASE("zero input produces finite output") {
  Rng rng(5);
  Enhancer se(small_config(), rng);
  Tensor x({40, 33, 1});
  Tensor y = se.forward(x);
  for (std::size_t i = 0; i < y.numel(); ++i) CHECK(std::isfinite(y[i]));
}

TEST_CASE("output is nonnegative for arbitrary inputs") {
  Rng rng(6);
  Enhancer se(small_config(), rng);
  std::mt19937_64 xr(7);
  std::uniform_real_distribution<float> d(-3.0f, 3.0f);
  for (int it = 0; it < 3; ++it) {
    Tensor x({40, 33, 1});
    for (std::size_t i = 0; i < x.numel(); ++i) x[i] = d(xr);
    Tensor y = se.forward(x);
    for (std::size_t i = 0; i < y.numel(); ++i) CHECK(y[i] >= 0.0f);
  }
}

TEST_CASE("input validation") {
  Rng rng(8);
  Enhancer se(small_config(), rng);
  CHECK_THROWS(static_cast<void>(se.forward(Tensor({10, 33, 1}))));
  Tensor emb({6});
  CHECK_THROWS(static_cast<void>(se.forward(random_spec(40, 33, 1), &emb)));

  auto cfg2 = small_config();
  cfg2.use_embedding = true;
  Enhancer se2(cfg2, rng);
  CHECK_THROWS(static_cast<void>(se2.forward(random_spec(40, 33, 2))));
  Tensor bad_emb({5});
  CHECK_THROWS(static_cast<void>(se2.forward(random_spec(40, 33, 3), &bad_emb)));
}

TEST_CASE("one optimizer step decreases the reconstruction loss (5 seeds)") {
  int improved = 0;
  for (uint64_t seed = 0; seed < 5; ++seed) {
    Rng rng(100 + seed);
    Enhancer se(small_config(), rng);
    Tensor noisy = random_spec(40, 33, 200 + seed);
    Tensor clean = random_spec(40, 33, 300 + seed);
    Adam opt(se.params());
    Tensor y0 = se.forward(noisy);
    const double l0 = mae_loss(clean, y0);
    opt.zero_grad();
    se.backward(mae_loss_grad(clean, y0));
    opt.step(1e-3);
    Tensor y1 = se.forward(noisy);
    const double l1 = mae_loss(clean, y1);
    if (l1 < l0) ++improved;
  }
  CHECK(improved == 5);
}

TEST_CASE("warm start copies shared weights and extends the dense layer") {
  Rng rng(9);
  auto base_cfg = small_config();
  Enhancer se1(base_cfg, rng);
  auto cfg2 = base_cfg;
  cfg2.use_embedding = true;
  Enhancer se2(cfg2, rng);
  se2.warm_start_from(se1, rng);

  auto p1 = se1.params();
  auto p2 = se2.params();
  REQUIRE(p1.size() == p2.size());
  for (std::size_t i = 0; i < p1.size(); ++i) {
    if (p1[i]->name == "bottleneck.dense.w") {
      const int units = p1[i]->value.dim(1);
      const int base_rows = p1[i]->value.dim(0);
      CHECK(p2[i]->value.dim(0) == base_rows + cfg2.embedding_dim);
      for (int r = 0; r < base_rows; ++r)
        for (int c = 0; c < units; ++c)
          CHECK(p2[i]->value.at(r, c) == p1[i]->value.at(r, c));
      // extra rows are small
      for (int r = base_rows; r < p2[i]->value.dim(0); ++r)
        for (int c = 0; c < units; ++c)
          CHECK(std::abs(p2[i]->value.at(r, c)) <= 1e-3f);
    } else {
      REQUIRE(p1[i]->value.same_shape(p2[i]->value));
      for (std::size_t j = 0; j < p1[i]->value.numel(); ++j)
        CHECK(p2[i]->value[j] == p1[i]->value[j]);
    }
  }
}

TEST_CASE("backward produces an embedding gradient for the SE2 variant") {
  Rng rng(10);
  auto cfg = small_config();
  cfg.use_embedding = true;
  Enhancer se(cfg, rng);
  Tensor x = random_spec(40, 33, 11);
  Tensor emb({6});
  emb.fill(0.1f);
  Tensor y = se.forward(x, &emb);
  Tensor dy(y.shape());
  dy.fill(1.0f);
  se.backward(dy);
  double norm = 0;
  for (std::size_t i = 0; i < se.embedding_grad().numel(); ++i)
    norm += std::abs(se.embedding_grad()[i]);
  CHECK(norm > 0.0);
}
