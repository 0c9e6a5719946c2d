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

#include "sesr/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "sesr/losses.hpp"

namespace sesr::train {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

std::string describe(const EnhancerConfig& se, const RecognizerConfig& sr) {
  std::ostringstream os;
  os << se.in_t << 'x' << se.in_f << '|';
  for (const auto& s : se.stages)
    os << s.features << '/' << s.stride_t << ',' << s.stride_f << ';';
  os << se.dense_units << '|' << se.gru_units << '|' << se.embedding_dim
     << "||" << sr.num_classes << '|' << sr.blocks_per_stage << '|'
     << sr.stem_stride << '|' << sr.embedding_dim << '|';
  for (int c : sr.stage_channels) os << c << ',';
  return os.str();
}

void check_finite(double loss, const char* what) {
  if (!std::isfinite(loss))
    throw std::runtime_error(std::string("non-finite loss in ") + what);
}

void zero_params(const std::vector<ParamT<float>*>& params) {
  for (auto* p : params) p->zero_grad();
}

void scale_inplace(Tensor& t, float s) {
  for (std::size_t i = 0; i < t.numel(); ++i) t[i] *= s;
}

}  // namespace

Pipeline::Pipeline(const EnhancerConfig& se_cfg, const RecognizerConfig& sr_cfg,
                   uint64_t seed)
    : se_cfg_(se_cfg), sr_cfg_(sr_cfg), rng_(seed) {
  if (se_cfg_.use_embedding)
    throw std::invalid_argument("pipeline: pass the SE1 (no-embedding) config");
  se2_cfg_ = se_cfg_;
  se2_cfg_.use_embedding = true;
  se2_cfg_.embedding_dim = sr_cfg_.embedding_dim;
  config_hash_ = fnv1a(describe(se_cfg_, sr_cfg_));

  Rng init_rng(seed ^ 0x5e5e5e5e5e5e5e5eull);
  se1_ = std::make_unique<Enhancer>(se_cfg_, init_rng);
  sr1_ = std::make_unique<Recognizer>(sr_cfg_, init_rng);
  se2_ = std::make_unique<Enhancer>(se2_cfg_, init_rng);
}

void Pipeline::require_stage(const std::string& needed,
                             const std::string& target) {
  if (stage_ == target) return;  // resuming mid-stage
  if (stage_ != needed)
    throw std::runtime_error("stage order violation: " + target +
                             " requires a " + needed +
                             " checkpoint (current stage: " + stage_ + ")");
  // entering the stage fresh
  stage_ = target;
  epoch_ = 0;
  opt_se1_.reset();
  opt_sr1_.reset();
  opt_se2_.reset();
  if (target == "step1_independent" || target == "step1_joint") {
    opt_se1_ = std::make_unique<Adam>(se1_->params());
    opt_sr1_ = std::make_unique<Adam>(sr1_->params());
  } else if (target == "step2") {
    se2_->warm_start_from(*se1_, rng_);
    opt_se2_ = std::make_unique<Adam>(se2_->params());
  }
}

std::vector<std::size_t> Pipeline::shuffled_indices(std::size_t n) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::shuffle(idx.begin(), idx.end(), rng_);
  return idx;
}

std::vector<EpochLog> Pipeline::train_step1_independent(
    const Dataset& data, const StageConfig& cfg, const EpochCallback& cb) {
  if (data.empty()) throw std::invalid_argument("empty training manifest");
  for (const auto& s : data)
    if (s.speaker < 0 || s.speaker >= sr_cfg_.num_classes)
      throw std::invalid_argument("speaker id outside classifier inventory");
  require_stage("init", "step1_independent");

  std::vector<EpochLog> logs;
  for (int e = epoch_; e < cfg.epochs; ++e) {
    const auto t0 = std::chrono::steady_clock::now();
    const double lr = lr_at_epoch(cfg.lr_init, cfg.lr_decay_per_epoch, e);
    double sum_se = 0, sum_sr = 0;
    const auto order = shuffled_indices(data.size());
    for (std::size_t b = 0; b < order.size();
         b += static_cast<size_t>(cfg.batch_size)) {
      const std::size_t end =
          std::min(order.size(), b + static_cast<size_t>(cfg.batch_size));
      const float inv_bn = 1.0f / static_cast<float>(end - b);

      // SE1 on the enhancement loss
      opt_se1_->zero_grad();
      for (std::size_t i = b; i < end; ++i) {
        const TrainSample& s = data[order[i]];
        Tensor enh = se1_->forward(s.noisy);
        const double l = mae_loss(s.clean, enh);
        check_finite(l, "step1_independent/se");
        sum_se += l;
        Tensor g = mae_loss_grad(s.clean, enh);
        scale_inplace(g, inv_bn);
        se1_->backward(g);
      }
      opt_se1_->step(lr);

      // SR1 on cross entropy over SE1-enhanced inputs; SE1 not updated here
      opt_sr1_->zero_grad();
      zero_params(se1_->params());
      for (std::size_t i = b; i < end; ++i) {
        const TrainSample& s = data[order[i]];
        Tensor enh = se1_->forward(s.noisy);
        SrOutput out = sr1_->forward(enh);
        const double l = ce_loss(out.logits, s.speaker);
        check_finite(l, "step1_independent/sr");
        sum_sr += l;
        const float w = cfg.ce_sum_reduction ? 1.0f : inv_bn;
        sr1_->backward(ce_loss_grad(out.logits, s.speaker, w));
      }
      zero_params(se1_->params());  // SE1 stays put in this phase
      opt_sr1_->step(lr);
    }
    epoch_ = e + 1;
    EpochLog log{stage_, e, lr, sum_se / data.size(), sum_sr / data.size(),
                 (sum_se + sum_sr) / data.size(), seconds_since(t0)};
    logs.push_back(log);
    if (cb) cb(log);
  }
  return logs;
}

std::vector<EpochLog> Pipeline::finetune_step1_joint(const Dataset& data,
                                                     const StageConfig& cfg,
                                                     const EpochCallback& cb) {
  if (data.empty()) throw std::invalid_argument("empty training manifest");
  require_stage("step1_independent", "step1_joint");

  std::vector<EpochLog> logs;
  for (int e = epoch_; e < cfg.epochs; ++e) {
    const auto t0 = std::chrono::steady_clock::now();
    const double lr = lr_at_epoch(cfg.lr_init, cfg.lr_decay_per_epoch, e);
    double sum_se = 0, sum_sr = 0;
    const auto order = shuffled_indices(data.size());
    for (std::size_t b = 0; b < order.size();
         b += static_cast<size_t>(cfg.batch_size)) {
      const std::size_t end =
          std::min(order.size(), b + static_cast<size_t>(cfg.batch_size));
      const float inv_bn = 1.0f / static_cast<float>(end - b);
      opt_se1_->zero_grad();
      opt_sr1_->zero_grad();
      for (std::size_t i = b; i < end; ++i) {
        const TrainSample& s = data[order[i]];
        Tensor enh = se1_->forward(s.noisy);
        SrOutput out = sr1_->forward(enh);
        const double lse = mae_loss(s.clean, enh);
        const double lsr = ce_loss(out.logits, s.speaker);
        check_finite(lse + lsr, "step1_joint");
        sum_se += lse;
        sum_sr += lsr;
        const float w = cfg.ce_sum_reduction ? 1.0f : inv_bn;
        // L = L_SE + L_SR; recognition gradient flows through SE1
        Tensor g = sr1_->backward(ce_loss_grad(out.logits, s.speaker, w));
        Tensor gm = mae_loss_grad(s.clean, enh);
        kernels::axpy(g.numel(), inv_bn, gm.data(), g.data());
        se1_->backward(g);
      }
      opt_se1_->step(lr);
      opt_sr1_->step(lr);
    }
    epoch_ = e + 1;
    EpochLog log{stage_, e, lr, sum_se / data.size(), sum_sr / data.size(),
                 (sum_se + sum_sr) / data.size(), seconds_since(t0)};
    logs.push_back(log);
    if (cb) cb(log);
  }
  return logs;
}

std::vector<EpochLog> Pipeline::train_step2(const Dataset& data,
                                            const StageConfig& cfg,
                                            const EpochCallback& cb) {
  if (data.empty()) throw std::invalid_argument("empty training manifest");
  require_stage("step1_joint", "step2");

  std::vector<EpochLog> logs;
  for (int e = epoch_; e < cfg.epochs; ++e) {
    const auto t0 = std::chrono::steady_clock::now();
    const double lr = lr_at_epoch(cfg.lr_init, cfg.lr_decay_per_epoch, e);
    double sum_se = 0, sum_sr = 0;
    const auto order = shuffled_indices(data.size());
    for (std::size_t b = 0; b < order.size();
         b += static_cast<size_t>(cfg.batch_size)) {
      const std::size_t end =
          std::min(order.size(), b + static_cast<size_t>(cfg.batch_size));
      const float inv_bn = 1.0f / static_cast<float>(end - b);
      opt_se2_->zero_grad();
      for (std::size_t i = b; i < end; ++i) {
        const TrainSample& s = data[order[i]];
        // frozen Step1 path produces the speaker embedding
        Tensor enh1 = se1_->forward(s.noisy);
        Tensor emb = sr1_->forward(enh1).embedding;
        // Step2: SE2 conditioned on the embedding; SR2 aliases SR1
        Tensor enh2 = se2_->forward(s.noisy, &emb);
        SrOutput out = sr2().forward(enh2);
        const double lse = mae_loss(s.clean, enh2);
        const double lsr = ce_loss(out.logits, s.speaker);
        check_finite(lse + lsr, "step2");
        sum_se += lse;
        sum_sr += lsr;
        const float w = cfg.ce_sum_reduction ? 1.0f : inv_bn;
        // gradient flows through the frozen SR2 into SE2
        Tensor g = sr2().backward(ce_loss_grad(out.logits, s.speaker, w));
        Tensor gm = mae_loss_grad(s.clean, enh2);
        kernels::axpy(g.numel(), inv_bn, gm.data(), g.data());
        se2_->backward(g);
      }
      // SE1/SR1 are fixed: their accumulated grads are discarded, never applied
      zero_params(se1_->params());
      zero_params(sr1_->params());
      opt_se2_->step(lr);
    }
    epoch_ = e + 1;
    EpochLog log{stage_, e, lr, sum_se / data.size(), sum_sr / data.size(),
                 (sum_se + sum_sr) / data.size(), seconds_since(t0)};
    logs.push_back(log);
    if (cb) cb(log);
  }
  return logs;
}

Tensor Pipeline::enhance_step1(const Tensor& noisy) {
  return se1_->forward(noisy);
}

Tensor Pipeline::enhance_step2(const Tensor& noisy) {
  Tensor emb = sr1_->forward(se1_->forward(noisy)).embedding;
  return se2_->forward(noisy, &emb);
}

SrOutput Pipeline::classify_step1(const Tensor& noisy) {
  return sr1_->forward(se1_->forward(noisy));
}

SrOutput Pipeline::classify_step2(const Tensor& noisy) {
  Tensor emb = sr1_->forward(se1_->forward(noisy)).embedding;
  return sr2().forward(se2_->forward(noisy, &emb));
}

void Pipeline::dump_optimizer(AdamT<float>& opt, const std::string& prefix,
                              Checkpoint& out) const {
  out.blocks.emplace_back(prefix + "t",
                          std::vector<float>{static_cast<float>(opt.step_count())});
  for (std::size_t i = 0; i < opt.size(); ++i) {
    auto& m = opt.moments1()[i];
    auto& v = opt.moments2()[i];
    out.blocks.emplace_back(prefix + "m" + std::to_string(i),
                            std::vector<float>(m.data(), m.data() + m.numel()));
    out.blocks.emplace_back(prefix + "v" + std::to_string(i),
                            std::vector<float>(v.data(), v.data() + v.numel()));
  }
}

void Pipeline::restore_optimizer(AdamT<float>& opt, const std::string& prefix,
                                 const Checkpoint& ckpt) {
  const auto* t = ckpt.find(prefix + "t");
  if (t == nullptr || t->size() != 1)
    throw std::runtime_error("checkpoint: missing optimizer state " + prefix);
  opt.set_step_count(static_cast<long>((*t)[0]));
  for (std::size_t i = 0; i < opt.size(); ++i) {
    const auto* m = ckpt.find(prefix + "m" + std::to_string(i));
    const auto* v = ckpt.find(prefix + "v" + std::to_string(i));
    if (m == nullptr || v == nullptr)
      throw std::runtime_error("checkpoint: missing optimizer moments " + prefix);
    std::copy(m->begin(), m->end(), opt.moments1()[i].data());
    std::copy(v->begin(), v->end(), opt.moments2()[i].data());
  }
}

Checkpoint Pipeline::to_checkpoint() const {
  Checkpoint ckpt;
  ckpt.stage = stage_;
  ckpt.epoch = epoch_;
  ckpt.config_hash = config_hash_;
  std::ostringstream os;
  os << rng_;
  ckpt.rng_state = os.str();
  dump_params(se1_->params(), "se1/", ckpt);
  dump_params(sr1_->params(), "sr1/", ckpt);
  dump_params(se2_->params(), "se2/", ckpt);
  if (opt_se1_) dump_optimizer(*opt_se1_, "opt_se1/", ckpt);
  if (opt_sr1_) dump_optimizer(*opt_sr1_, "opt_sr1/", ckpt);
  if (opt_se2_) dump_optimizer(*opt_se2_, "opt_se2/", ckpt);
  return ckpt;
}

void Pipeline::from_checkpoint(const Checkpoint& ckpt) {
  if (ckpt.config_hash != config_hash_)
    throw std::runtime_error("checkpoint: config hash mismatch");
  restore_params(se1_->params(), "se1/", ckpt);
  restore_params(sr1_->params(), "sr1/", ckpt);
  restore_params(se2_->params(), "se2/", ckpt);
  stage_ = ckpt.stage;
  epoch_ = ckpt.epoch;
  std::istringstream is(ckpt.rng_state);
  is >> rng_;
  opt_se1_.reset();
  opt_sr1_.reset();
  opt_se2_.reset();
  if (stage_ == "step1_independent" || stage_ == "step1_joint") {
    opt_se1_ = std::make_unique<Adam>(se1_->params());
    opt_sr1_ = std::make_unique<Adam>(sr1_->params());
    if (ckpt.find("opt_se1/t")) restore_optimizer(*opt_se1_, "opt_se1/", ckpt);
    if (ckpt.find("opt_sr1/t")) restore_optimizer(*opt_sr1_, "opt_sr1/", ckpt);
  } else if (stage_ == "step2") {
    opt_se2_ = std::make_unique<Adam>(se2_->params());
    if (ckpt.find("opt_se2/t")) restore_optimizer(*opt_se2_, "opt_se2/", ckpt);
  }
}

std::vector<EpochLog> train_recognizer_only(Recognizer& sr, const Dataset& data,
                                            const StageConfig& cfg,
                                            uint64_t seed,
                                            const EpochCallback& cb) {
  if (data.empty()) throw std::invalid_argument("empty training manifest");
  Adam opt(sr.params());
  Rng rng(seed);
  std::vector<EpochLog> logs;
  for (int e = 0; e < cfg.epochs; ++e) {
    const auto t0 = std::chrono::steady_clock::now();
    const double lr = lr_at_epoch(cfg.lr_init, cfg.lr_decay_per_epoch, e);
    double sum_sr = 0;
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t b = 0; b < order.size();
         b += static_cast<size_t>(cfg.batch_size)) {
      const std::size_t end =
          std::min(order.size(), b + static_cast<size_t>(cfg.batch_size));
      const float inv_bn = 1.0f / static_cast<float>(end - b);
      opt.zero_grad();
      for (std::size_t i = b; i < end; ++i) {
        const TrainSample& s = data[order[i]];
        SrOutput out = sr.forward(s.noisy);
        const double l = ce_loss(out.logits, s.speaker);
        check_finite(l, "recognizer_only");
        sum_sr += l;
        const float w = cfg.ce_sum_reduction ? 1.0f : inv_bn;
        sr.backward(ce_loss_grad(out.logits, s.speaker, w));
      }
      opt.step(lr);
    }
    EpochLog log{"sid_baseline", e, lr, 0.0, sum_sr / data.size(),
                 sum_sr / data.size(), seconds_since(t0)};
    logs.push_back(log);
    if (cb) cb(log);
  }
  return logs;
}

}  // namespace sesr::train
