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
// Command-line harness: synth | prepare | mix | audit | train | evaluate |
// enhance. Deterministic under a fixed seed. Exit codes: 0 success,
// 1 runtime failure, 2 usage/config error. Precedence: flags > env > config
// file (env vars SESR_SEED, SESR_WORKDIR, SESR_CONFIG).

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "sesr/checkpoint.hpp"
#include "sesr/dsp.hpp"
#include "sesr/heatmap.hpp"
#include "sesr/manifest.hpp"
#include "sesr/metrics.hpp"
#include "sesr/mixer.hpp"
#include "sesr/pesq.hpp"
#include "sesr/stoi.hpp"
#include "sesr/synth.hpp"
#include "sesr/trainer.hpp"
#include "sesr/wav.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace sesr;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------- config

struct RunConfig {
  std::string workdir = ".";
  uint64_t seed = 1;
  dsp::StftConfig stft;
  EnhancerConfig enhancer;
  RecognizerConfig recognizer;
  std::map<std::string, train::StageConfig> stages;
  std::vector<double> snrs = {0, 5, 10, 15, 20};
  std::vector<std::string> noise_categories = {"noise", "music", "babble"};
  std::string pesq_command;  // empty = PESQ unavailable
};

void require_type(const json& j, const std::string& key, json::value_t t,
                  const std::string& where) {
  if (!j.contains(key))
    throw UsageError("config: missing key '" + key + "' in " + where);
  const auto& v = j.at(key);
  const bool num_ok = t == json::value_t::number_float &&
                      (v.is_number_float() || v.is_number_integer());
  if (v.type() != t && !num_ok &&
      !(t == json::value_t::number_integer && v.is_number_integer()))
    throw UsageError("config: key '" + key + "' in " + where +
                     " has the wrong type");
}

train::StageConfig parse_stage(const json& j, const std::string& name) {
  train::StageConfig s;
  require_type(j, "epochs", json::value_t::number_integer, name);
  s.epochs = j.at("epochs").get<int>();
  s.batch_size = j.value("batch_size", s.batch_size);
  s.lr_init = j.value("lr_init", s.lr_init);
  s.lr_decay_per_epoch = j.value("lr_decay", s.lr_decay_per_epoch);
  s.ce_sum_reduction = j.value("ce_sum_reduction", false);
  if (s.epochs < 0 || s.batch_size < 1 || s.lr_init <= 0)
    throw UsageError("config: invalid stage settings for " + name);
  return s;
}

// Schema validation happens here, before any compute.
RunConfig load_config(const std::string& path) {
  RunConfig cfg;
  if (path.empty()) return cfg;
  std::ifstream f(path);
  if (!f) throw UsageError("cannot open config: " + path);
  json j = json::parse(f, nullptr, false);
  if (j.is_discarded()) throw UsageError("config is not valid JSON: " + path);

  static const std::set<std::string> known = {
      "workdir", "seed",  "stft", "enhancer", "recognizer",
      "stages",  "snrs",  "noise_categories", "pesq_command"};
  for (const auto& [key, _] : j.items())
    if (!known.count(key)) throw UsageError("config: unknown key '" + key + "'");

  cfg.workdir = j.value("workdir", cfg.workdir);
  cfg.seed = j.value("seed", cfg.seed);
  if (j.contains("stft")) {
    const auto& s = j.at("stft");
    cfg.stft.window_ms = s.value("window_ms", 25);
    cfg.stft.hop_ms = s.value("hop_ms", 10);
    cfg.stft.fft_size = s.value("fft_size", 512);
    if (cfg.stft.fft_size < 8 || (cfg.stft.fft_size & (cfg.stft.fft_size - 1)))
      throw UsageError("config: stft.fft_size must be a power of two");
  }
  if (j.contains("enhancer")) {
    const auto& e = j.at("enhancer");
    cfg.enhancer.in_t = e.value("in_t", cfg.enhancer.in_t);
    cfg.enhancer.in_f = e.value("in_f", cfg.enhancer.in_f);
    if (e.contains("stages")) {
      cfg.enhancer.stages.clear();
      for (const auto& st : e.at("stages")) {
        if (!st.is_array() || st.size() != 3)
          throw UsageError("config: enhancer.stages entries are [features,st,sf]");
        cfg.enhancer.stages.push_back(
            {st[0].get<int>(), st[1].get<int>(), st[2].get<int>()});
      }
    }
    cfg.enhancer.dense_units = e.value("dense_units", cfg.enhancer.dense_units);
    cfg.enhancer.gru_units = e.value("gru_units", cfg.enhancer.gru_units);
  }
  if (j.contains("recognizer")) {
    const auto& r = j.at("recognizer");
    if (r.contains("stage_channels"))
      cfg.recognizer.stage_channels =
          r.at("stage_channels").get<std::vector<int>>();
    cfg.recognizer.blocks_per_stage =
        r.value("blocks_per_stage", cfg.recognizer.blocks_per_stage);
    cfg.recognizer.stem_stride = r.value("stem_stride", cfg.recognizer.stem_stride);
    cfg.recognizer.embedding_dim =
        r.value("embedding_dim", cfg.recognizer.embedding_dim);
  }
  if (j.contains("stages")) {
    for (const auto& [name, sj] : j.at("stages").items()) {
      static const std::set<std::string> stage_names = {
          "step1_independent", "step1_joint", "step2", "sid"};
      if (!stage_names.count(name))
        throw UsageError("config: unknown stage '" + name + "'");
      cfg.stages[name] = parse_stage(sj, name);
    }
  }
  if (j.contains("snrs")) cfg.snrs = j.at("snrs").get<std::vector<double>>();
  if (j.contains("noise_categories"))
    cfg.noise_categories =
        j.at("noise_categories").get<std::vector<std::string>>();
  cfg.pesq_command = j.value("pesq_command", std::string());
  return cfg;
}

std::string env_or(const char* name, const std::string& fallback) {
  const char* v = std::getenv(name);
  return v != nullptr ? std::string(v) : fallback;
}

// ---------------------------------------------------------------- shared

// Speaker identity is the enhancer input shape; recognizer consumes the
// enhanced (or noisy) spectrogram directly, so both shapes must match.
void sync_shapes(RunConfig& cfg) {
  cfg.enhancer.in_f = cfg.stft.bins();
  cfg.recognizer.in_t = cfg.enhancer.in_t;
  cfg.recognizer.in_f = cfg.enhancer.in_f;
}

Tensor feature_of(const dsp::Waveform& w, const RunConfig& cfg) {
  auto spec = dsp::magnitude(dsp::stft(w, cfg.stft));
  auto cropped = dsp::crop_or_pad_center(spec, cfg.enhancer.in_t);
  return cropped.values.reshaped({cfg.enhancer.in_t, cfg.enhancer.in_f, 1});
}

std::map<std::string, int> speaker_map_of(
    const std::vector<mix::MixSpec>& specs) {
  std::set<std::string> ids;
  for (const auto& s : specs) ids.insert(s.speaker_id);
  std::map<std::string, int> m;
  int idx = 0;
  for (const auto& id : ids) m[id] = idx++;
  return m;
}

void write_speaker_map(const std::map<std::string, int>& m,
                       const std::string& path) {
  json j;
  for (const auto& [id, idx] : m) j[id] = idx;
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write speaker map: " + path);
  f << j.dump(2) << '\n';
}

std::map<std::string, int> read_speaker_map(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("missing speaker map: " + path);
  json j = json::parse(f);
  std::map<std::string, int> m;
  for (const auto& [id, idx] : j.items()) m[id] = idx.get<int>();
  return m;
}

dsp::Waveform mixture_of(const mix::MixSpec& spec) {
  auto clean = wav::read(spec.clean_path);
  auto noise = wav::read(spec.noise_path);
  return mix::mix_at_snr(clean, noise, spec.snr_db, spec.offset);
}

train::Dataset load_dataset(const std::vector<mix::MixSpec>& specs,
                            const std::map<std::string, int>& spk_map,
                            const RunConfig& cfg) {
  train::Dataset data;
  for (const auto& spec : specs) {
    train::TrainSample s;
    auto clean = wav::read(spec.clean_path);
    s.clean = feature_of(clean, cfg);
    s.noisy = feature_of(mixture_of(spec), cfg);
    s.speaker = spk_map.at(spec.speaker_id);
    data.push_back(std::move(s));
  }
  return data;
}

std::string ckpt_path(const RunConfig& cfg, const std::string& stage) {
  return (fs::path(cfg.workdir) / ("ckpt_" + stage + ".bin")).string();
}

void save_pipeline(train::Pipeline& pipe, const RunConfig& cfg) {
  save_checkpoint(pipe.to_checkpoint(), ckpt_path(cfg, pipe.stage()));
}

// Loads the newest checkpoint whose stage is `wanted` (or, when resuming,
// `target`); returns the stage actually loaded.
std::string restore_pipeline(train::Pipeline& pipe, const RunConfig& cfg,
                             const std::vector<std::string>& candidates) {
  for (const auto& stage : candidates) {
    const auto path = ckpt_path(cfg, stage);
    if (fs::exists(path)) {
      pipe.from_checkpoint(load_checkpoint(path, pipe.config_hash()));
      return stage;
    }
  }
  return "";
}

// ---------------------------------------------------------------- synth

int cmd_synth(const RunConfig& cfg, int speakers, int utts, double duration,
              int noises_per_category) {
  const fs::path clean_dir = fs::path(cfg.workdir) / "clean";
  const fs::path noise_dir = fs::path(cfg.workdir) / "noise";
  fs::create_directories(clean_dir);
  fs::create_directories(noise_dir);

  std::vector<manifest::UttRecord> utt_records;
  for (int s = 0; s < speakers; ++s) {
    const std::string spk = "spk" + std::to_string(s);
    fs::create_directories(clean_dir / spk);
    for (int u = 0; u < utts; ++u) {
      auto w = synth::speech(s, u, duration, 16000, cfg.seed);
      const auto path = clean_dir / spk / ("utt" + std::to_string(u) + ".wav");
      wav::write_float32(path.string(), w);
      utt_records.push_back({spk + "-utt" + std::to_string(u), spk,
                             path.string(), w.duration_s()});
    }
  }
  manifest::write_utterances(utt_records,
                             (fs::path(cfg.workdir) / "clean.jsonl").string());

  std::vector<mix::NoiseEntry> noise_entries;
  for (const auto& cat : cfg.noise_categories) {
    for (int i = 0; i < noises_per_category; ++i) {
      auto w = synth::noise(cat, i, duration + 1.0, 16000, cfg.seed);
      const auto path = noise_dir / (cat + std::to_string(i) + ".wav");
      wav::write_float32(path.string(), w);
      noise_entries.push_back({cat, cat + std::to_string(i), path.string(),
                               static_cast<long>(w.samples.size())});
    }
  }
  manifest::write_noise_entries(
      noise_entries, (fs::path(cfg.workdir) / "noise.jsonl").string());
  std::cout << "wrote " << utt_records.size() << " utterances, "
            << noise_entries.size() << " noise files under " << cfg.workdir
            << "\n";
  return 0;
}

// ---------------------------------------------------------------- prepare

int cmd_prepare(const std::string& clean_root, const std::string& out) {
  if (!fs::is_directory(clean_root))
    throw UsageError("prepare: not a directory: " + clean_root);
  std::vector<manifest::UttRecord> records;
  std::vector<std::string> rejected;
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(clean_root))
    if (e.is_regular_file() && e.path().extension() == ".wav")
      files.push_back(e.path());
  std::sort(files.begin(), files.end());
  for (const auto& p : files) {
    try {
      auto w = wav::read(p.string());
      const std::string spk = p.parent_path().filename().string();
      records.push_back({spk + "-" + p.stem().string(), spk, p.string(),
                         w.duration_s()});
    } catch (const std::exception& e) {
      rejected.push_back(p.string() + ": " + e.what());
    }
  }
  for (const auto& r : rejected) std::cerr << "rejected " << r << "\n";
  if (records.empty())
    throw UsageError("prepare: no valid wav files under " + clean_root);
  manifest::write_utterances(records, out);
  std::cout << "wrote " << records.size() << " records to " << out << " ("
            << rejected.size() << " rejected)\n";
  return 0;
}

// ---------------------------------------------------------------- mix

int cmd_mix(const RunConfig& cfg, const std::string& clean_manifest,
            const std::string& noise_manifest, const std::string& noise_type) {
  auto clean = manifest::read_utterances(clean_manifest);
  mix::NoiseCorpus corpus;
  corpus.entries = manifest::read_noise_entries(noise_manifest);

  std::vector<std::string> cats = cfg.noise_categories;
  if (noise_type != "all") cats = {noise_type};

  std::vector<mix::CleanUtterance> clean_utts;
  for (const auto& r : clean) clean_utts.push_back({r.utt_id, r.speaker_id, r.path});
  auto specs =
      mix::build_mixture_manifest(clean_utts, corpus, cats, cfg.snrs, cfg.seed);

  const fs::path mix_dir = fs::path(cfg.workdir) / "mix";
  fs::create_directories(mix_dir);
  for (auto& spec : specs) {
    auto mixed = mixture_of(spec);
    wav::write_float32((mix_dir / (spec.utt_id + ".wav")).string(), mixed);
  }
  manifest::write_mixtures(specs,
                           (fs::path(cfg.workdir) / "mixtures.jsonl").string());
  std::cout << "wrote " << specs.size() << " mixtures under " << mix_dir
            << "\n";
  return 0;
}

int cmd_audit(const RunConfig& cfg, double tolerance_db) {
  auto specs = manifest::read_mixtures(
      (fs::path(cfg.workdir) / "mixtures.jsonl").string());
  const fs::path mix_dir = fs::path(cfg.workdir) / "mix";
  double worst = 0;
  for (const auto& spec : specs) {
    auto clean = wav::read(spec.clean_path);
    auto mixed = wav::read((mix_dir / (spec.utt_id + ".wav")).string());
    dsp::Waveform noise_part;
    noise_part.sample_rate = clean.sample_rate;
    noise_part.samples.resize(clean.samples.size());
    for (std::size_t i = 0; i < clean.samples.size(); ++i)
      noise_part.samples[i] = mixed.samples[i] - clean.samples[i];
    const double measured = mix::measure_snr(clean, noise_part);
    worst = std::max(worst, std::abs(measured - spec.snr_db));
  }
  std::cout << "audited " << specs.size() << " mixtures, max |SNR error| = "
            << worst << " dB\n";
  if (worst > tolerance_db) {
    std::cerr << "audit failed: exceeds tolerance " << tolerance_db << " dB\n";
    return kExitRuntime;
  }
  return 0;
}

// ---------------------------------------------------------------- train

void append_logs(const std::vector<train::EpochLog>& logs,
                 const std::string& path) {
  std::ofstream f(path, std::ios::app);
  for (const auto& l : logs) {
    json j{{"stage", l.stage},   {"epoch", l.epoch}, {"lr", l.lr},
           {"l_se", l.l_se},     {"l_sr", l.l_sr},   {"l", l.l},
           {"wall_time_s", l.wall_time_s}};
    f << j.dump() << '\n';
  }
}

int cmd_train(RunConfig cfg, const std::string& stage, bool resume) {
  auto specs = manifest::read_mixtures(
      (fs::path(cfg.workdir) / "mixtures.jsonl").string());
  auto spk_map = speaker_map_of(specs);
  write_speaker_map(spk_map,
                    (fs::path(cfg.workdir) / "speakers.json").string());
  cfg.recognizer.num_classes = static_cast<int>(spk_map.size());
  sync_shapes(cfg);

  if (!cfg.stages.count(stage))
    throw UsageError("config: no stage settings for '" + stage + "'");
  const auto& stage_cfg = cfg.stages.at(stage);
  auto data = load_dataset(specs, spk_map, cfg);
  const std::string log_path =
      (fs::path(cfg.workdir) / ("logs_" + stage + ".jsonl")).string();
  auto on_epoch = [&](const train::EpochLog& l) {
    append_logs({l}, log_path);
    std::cout << l.stage << " epoch " << l.epoch << " lr " << l.lr << " L "
              << l.l << " (se " << l.l_se << ", sr " << l.l_sr << ")\n";
  };

  if (stage == "sid") {
    Rng rng(cfg.seed + 17);
    Recognizer sr(cfg.recognizer, rng);
    static_cast<void>(
        train::train_recognizer_only(sr, data, stage_cfg, cfg.seed, on_epoch));
    Checkpoint ckpt;
    ckpt.stage = "sid";
    ckpt.config_hash = 0;
    dump_params(sr.params(), "sid/", ckpt);
    save_checkpoint(ckpt, ckpt_path(cfg, "sid"));
    return 0;
  }

  train::Pipeline pipe(cfg.enhancer, cfg.recognizer, cfg.seed);
  static const std::map<std::string, std::string> prereq = {
      {"step1_independent", ""},
      {"step1_joint", "step1_independent"},
      {"step2", "step1_joint"}};
  if (!prereq.count(stage)) throw UsageError("unknown stage: " + stage);

  std::vector<std::string> candidates;
  if (resume) candidates.push_back(stage);
  if (!prereq.at(stage).empty()) candidates.push_back(prereq.at(stage));
  const std::string loaded = restore_pipeline(pipe, cfg, candidates);
  if (!candidates.empty() && loaded.empty() && !prereq.at(stage).empty())
    throw std::runtime_error("stage " + stage +
                             " requires a checkpoint from its prerequisite "
                             "stage '" + prereq.at(stage) + "' (run that first)");

  if (stage == "step1_independent")
    static_cast<void>(pipe.train_step1_independent(data, stage_cfg, on_epoch));
  else if (stage == "step1_joint")
    static_cast<void>(pipe.finetune_step1_joint(data, stage_cfg, on_epoch));
  else
    static_cast<void>(pipe.train_step2(data, stage_cfg, on_epoch));
  save_pipeline(pipe, cfg);
  std::cout << "checkpoint: " << ckpt_path(cfg, pipe.stage()) << "\n";
  return 0;
}

// ---------------------------------------------------------------- evaluate

struct Condition {
  std::string category;  // "original" for the clean condition
  double snr_db = 0;

  bool operator<(const Condition& o) const {
    return std::tie(category, snr_db) < std::tie(o.category, o.snr_db);
  }
  std::string label() const {
    if (category == "original") return "original";
    return category + "/" + std::to_string(static_cast<int>(snr_db)) + "dB";
  }
};

train::Pipeline load_eval_pipeline(RunConfig& cfg, const std::string& stage,
                                   int num_classes) {
  cfg.recognizer.num_classes = num_classes;
  sync_shapes(cfg);
  train::Pipeline pipe(cfg.enhancer, cfg.recognizer, cfg.seed);
  const auto path = ckpt_path(cfg, stage);
  if (!fs::exists(path))
    throw std::runtime_error("missing checkpoint: " + path);
  pipe.from_checkpoint(load_checkpoint(path, pipe.config_hash()));
  return pipe;
}

int cmd_evaluate(RunConfig cfg, const std::string& task,
                 const std::string& stage, const std::string& trials_path,
                 const std::string& noise_type_filter) {
  auto specs = manifest::read_mixtures(
      (fs::path(cfg.workdir) / "mixtures.jsonl").string());
  auto spk_map =
      read_speaker_map((fs::path(cfg.workdir) / "speakers.json").string());

  if (!noise_type_filter.empty() && noise_type_filter != "all") {
    std::erase_if(specs, [&](const mix::MixSpec& s) {
      return s.category != noise_type_filter;
    });
    if (specs.empty())
      throw std::runtime_error("no mixtures for noise type " +
                               noise_type_filter);
  }

  auto pipe = load_eval_pipeline(cfg, stage, static_cast<int>(spk_map.size()));

  // Group utterances by condition; "original" holds the clean signals.
  std::map<Condition, std::vector<const mix::MixSpec*>> groups;
  for (const auto& s : specs) {
    groups[{s.category, s.snr_db}].push_back(&s);
    groups[{"original", 0}].push_back(&s);
  }

  json report;
  std::cout.setf(std::ios::fixed);
  std::cout.precision(3);

  if (task == "sid") {
    std::cout << "condition        top1(step1) top5(step1) top1(step2) top5(step2)\n";
    for (const auto& [cond, members] : groups) {
      std::vector<std::vector<double>> l1, l2;
      std::vector<int> targets;
      for (const auto* s : members) {
        const Tensor x = cond.category == "original"
                             ? feature_of(wav::read(s->clean_path), cfg)
                             : feature_of(mixture_of(*s), cfg);
        auto o1 = pipe.classify_step1(x);
        auto o2 = pipe.classify_step2(x);
        l1.emplace_back(o1.logits.data(), o1.logits.data() + o1.logits.numel());
        l2.emplace_back(o2.logits.data(), o2.logits.data() + o2.logits.numel());
        targets.push_back(spk_map.at(s->speaker_id));
      }
      const int k5 = std::min<int>(5, static_cast<int>(spk_map.size()));
      json row{{"condition", cond.label()},
               {"top1_step1", metrics::topk_accuracy(l1, targets, 1)},
               {"top5_step1", metrics::topk_accuracy(l1, targets, k5)},
               {"top1_step2", metrics::topk_accuracy(l2, targets, 1)},
               {"top5_step2", metrics::topk_accuracy(l2, targets, k5)}};
      report["sid"].push_back(row);
      std::cout << cond.label() << "  " << row["top1_step1"].get<double>()
                << "  " << row["top5_step1"].get<double>() << "  "
                << row["top1_step2"].get<double>() << "  "
                << row["top5_step2"].get<double>() << "\n";
    }
  } else if (task == "sv") {
    if (trials_path.empty() || !fs::exists(trials_path))
      throw std::runtime_error("sv evaluation needs --trials FILE");
    auto trials = metrics::read_trial_list(trials_path);
    // Each utterance appears under one sampled (category, SNR), so trial
    // pairs rarely share a fine-grained condition. Verification pools by
    // category instead: "original" (clean), each noise category, and "all".
    std::map<std::string, std::vector<const mix::MixSpec*>> sv_groups;
    for (const auto& s : specs) {
      sv_groups["original"].push_back(&s);
      sv_groups["all"].push_back(&s);
      sv_groups[s.category].push_back(&s);
    }
    std::cout << "condition        eer(step1) avgdcf(step1) eer(step2) avgdcf(step2)\n";
    bool any_row = false;
    for (const auto& [label, members] : sv_groups) {
      std::map<std::string, std::vector<float>> emb1, emb2;
      for (const auto* s : members) {
        const Tensor x = label == "original"
                             ? feature_of(wav::read(s->clean_path), cfg)
                             : feature_of(mixture_of(*s), cfg);
        auto o1 = pipe.classify_step1(x);
        auto o2 = pipe.classify_step2(x);
        emb1[s->utt_id].assign(o1.embedding.data(),
                               o1.embedding.data() + o1.embedding.numel());
        emb2[s->utt_id].assign(o2.embedding.data(),
                               o2.embedding.data() + o2.embedding.numel());
      }
      metrics::ScoreSet s1, s2;
      bool saw_target = false, saw_nontarget = false;
      for (const auto& t : trials) {
        if (!emb1.count(t.utt_a) || !emb1.count(t.utt_b)) continue;
        s1.scores.push_back(metrics::cosine_score(emb1[t.utt_a], emb1[t.utt_b]));
        s1.labels.push_back(t.same_speaker);
        s2.scores.push_back(metrics::cosine_score(emb2[t.utt_a], emb2[t.utt_b]));
        s2.labels.push_back(t.same_speaker);
        (t.same_speaker ? saw_target : saw_nontarget) = true;
      }
      if (!saw_target || !saw_nontarget) {
        std::cout << label << "  (skipped: trial list does not cover both "
                  << "classes here)\n";
        continue;
      }
      any_row = true;
      json row{{"condition", label},
               {"n_trials", s1.scores.size()},
               {"eer_step1", metrics::eer(s1)},
               {"avg_dcf_step1", metrics::avg_dcf(s1)},
               {"eer_step2", metrics::eer(s2)},
               {"avg_dcf_step2", metrics::avg_dcf(s2)}};
      report["sv"].push_back(row);
      std::cout << label << "  " << row["eer_step1"].get<double>() << "  "
                << row["avg_dcf_step1"].get<double>() << "  "
                << row["eer_step2"].get<double>() << "  "
                << row["avg_dcf_step2"].get<double>() << "\n";
    }
    if (!any_row)
      throw std::runtime_error("no trial pair is covered by the mixture set");
  } else if (task == "enhance") {
    metrics::PesqHook pesq{cfg.pesq_command};
    std::cout << "condition        stoi(noisy) stoi(se1) stoi(se2)"
              << (pesq.configured() ? " pesq(se2)" : "") << "\n";
    for (const auto& [cond, members] : groups) {
      if (cond.category == "original") continue;
      double acc_noisy = 0, acc1 = 0, acc2 = 0, acc_pesq = 0;
      int n_pesq = 0;
      for (const auto* s : members) {
        auto clean = wav::read(s->clean_path);
        auto mixed = mixture_of(*s);
        auto noisy_stft = dsp::stft(mixed, cfg.stft);
        auto noisy_spec = dsp::crop_or_pad_center(dsp::magnitude(noisy_stft),
                                                  cfg.enhancer.in_t);
        const Tensor x = noisy_spec.values.reshaped(
            {cfg.enhancer.in_t, cfg.enhancer.in_f, 1});
        // Splice the fixed-length enhanced window back into the full-length
        // magnitude (centered, matching the crop) so istft sees matching
        // frame counts.
        auto render = [&](const Tensor& mag_t) {
          dsp::Spectrogram full = dsp::magnitude(noisy_stft);
          const int t_off = std::max(0, (full.frames() - cfg.enhancer.in_t) / 2);
          const int n_copy = std::min(cfg.enhancer.in_t, full.frames());
          for (int t = 0; t < n_copy; ++t)
            for (int f = 0; f < cfg.enhancer.in_f; ++f)
              full.values.at(t_off + t, f) = mag_t.at(t, f, 0);
          return dsp::istft(full, noisy_stft, cfg.stft);
        };
        auto w1 = render(pipe.enhance_step1(x));
        auto w2 = render(pipe.enhance_step2(x));
        auto clip = [&](const dsp::Waveform& w) {
          dsp::Waveform c = clean;
          c.samples.resize(std::min(clean.samples.size(), w.samples.size()));
          dsp::Waveform p = w;
          p.samples.resize(c.samples.size());
          return std::pair{c, p};
        };
        auto [cn, pn] = clip(mixed);
        acc_noisy += metrics::stoi(cn, pn);
        auto [c1, p1] = clip(w1);
        acc1 += metrics::stoi(c1, p1);
        auto [c2, p2] = clip(w2);
        acc2 += metrics::stoi(c2, p2);
        if (pesq.configured()) {
          const auto tmp_ref = fs::temp_directory_path() / "sesr_pesq_ref.wav";
          const auto tmp_deg = fs::temp_directory_path() / "sesr_pesq_deg.wav";
          wav::write_pcm16(tmp_ref.string(), c2);
          wav::write_pcm16(tmp_deg.string(), p2);
          auto v = metrics::pesq_external(pesq, tmp_ref.string(), tmp_deg.string());
          if (v) {
            acc_pesq += *v;
            ++n_pesq;
          }
        }
      }
      const double n = static_cast<double>(members.size());
      json row{{"condition", cond.label()},
               {"stoi_noisy", acc_noisy / n},
               {"stoi_step1", acc1 / n},
               {"stoi_step2", acc2 / n}};
      if (n_pesq > 0) row["pesq_step2"] = acc_pesq / n_pesq;
      else if (pesq.configured()) row["pesq_step2"] = "unavailable";
      report["enhance"].push_back(row);
      std::cout << cond.label() << "  " << acc_noisy / n << "  " << acc1 / n
                << "  " << acc2 / n;
      if (n_pesq > 0) std::cout << "  " << acc_pesq / n_pesq;
      std::cout << "\n";
    }
  } else {
    throw UsageError("unknown task: " + task);
  }

  const auto out = fs::path(cfg.workdir) / ("report_" + task + ".json");
  std::ofstream f(out);
  f << report.dump(2) << '\n';
  std::cout << "report: " << out << "\n";
  return 0;
}

// ---------------------------------------------------------------- enhance

int cmd_enhance(RunConfig cfg, const std::string& stage,
                const std::string& wav_in, const std::string& wav_out,
                const std::string& png_path, const std::string& clean_path) {
  auto spk_map =
      read_speaker_map((fs::path(cfg.workdir) / "speakers.json").string());
  auto pipe = load_eval_pipeline(cfg, stage, static_cast<int>(spk_map.size()));

  auto noisy = wav::read(wav_in);
  auto noisy_stft = dsp::stft(noisy, cfg.stft);
  auto noisy_mag = dsp::magnitude(noisy_stft);

  // Process in blocks of in_t frames; the embedding comes from the first
  // block of the first pass, mirroring inference on fixed-length training
  // windows.
  const int bt = cfg.enhancer.in_t;
  dsp::Spectrogram out_mag1 = noisy_mag, out_mag2 = noisy_mag;
  for (int t0 = 0; t0 < noisy_mag.frames(); t0 += bt) {
    Tensor block({bt, cfg.enhancer.in_f, 1});
    for (int t = 0; t < bt; ++t)
      if (t0 + t < noisy_mag.frames())
        for (int f = 0; f < cfg.enhancer.in_f; ++f)
          block.at(t, f, 0) = noisy_mag.values.at(t0 + t, f);
    Tensor e1 = pipe.enhance_step1(block);
    Tensor e2 = pipe.enhance_step2(block);
    for (int t = 0; t < bt && t0 + t < noisy_mag.frames(); ++t)
      for (int f = 0; f < cfg.enhancer.in_f; ++f) {
        out_mag1.values.at(t0 + t, f) = e1.at(t, f, 0);
        out_mag2.values.at(t0 + t, f) = e2.at(t, f, 0);
      }
  }

  auto enhanced = dsp::istft(out_mag2, noisy_stft, cfg.stft);
  wav::write_float32(wav_out, enhanced);
  std::cout << "wrote " << wav_out << " (" << enhanced.duration_s() << " s)\n";

  if (!png_path.empty()) {
    std::vector<Tensor> panels = {noisy_mag.values, out_mag1.values,
                                  out_mag2.values};
    if (!clean_path.empty()) {
      auto clean_mag = dsp::magnitude(dsp::stft(wav::read(clean_path), cfg.stft));
      if (clean_mag.frames() >= noisy_mag.frames()) {
        Tensor cropped({noisy_mag.frames(), noisy_mag.bins()});
        for (int t = 0; t < noisy_mag.frames(); ++t)
          for (int f = 0; f < noisy_mag.bins(); ++f)
            cropped.at(t, f) = clean_mag.values.at(t, f);
        panels.push_back(cropped);
      }
    }
    viz::write_spectrogram_panels(panels, png_path);
    std::cout << "wrote " << png_path << " (" << panels.size() << " panels)\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"two-step speech enhancement + speaker recognition toolkit"};
  app.require_subcommand(1);
  app.fallthrough();  // accept --config/--seed/--workdir after the subcommand

  std::string config_path = env_or("SESR_CONFIG", "");
  std::optional<uint64_t> seed_flag;
  std::optional<std::string> workdir_flag;
  app.add_option("--config", config_path, "JSON run configuration");
  app.add_option("--seed", seed_flag, "global random seed");
  app.add_option("--workdir", workdir_flag, "working directory");

  // synth
  auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic corpus");
  int sy_speakers = 10, sy_utts = 8, sy_noises = 3;
  double sy_duration = 3.0;
  synth_cmd->add_option("--speakers", sy_speakers);
  synth_cmd->add_option("--utts", sy_utts);
  synth_cmd->add_option("--duration", sy_duration);
  synth_cmd->add_option("--noises-per-category", sy_noises);

  // prepare
  auto* prep_cmd = app.add_subcommand("prepare", "scan a clean corpus tree");
  std::string prep_root, prep_out = "clean.jsonl";
  prep_cmd->add_option("root", prep_root, "speaker/utterance wav tree")->required();
  prep_cmd->add_option("--out", prep_out, "output manifest");

  // mix
  auto* mix_cmd = app.add_subcommand("mix", "mix clean speech with noise");
  std::string mx_clean = "clean.jsonl", mx_noise = "noise.jsonl",
              mx_type = "all";
  mix_cmd->add_option("--manifest", mx_clean);
  mix_cmd->add_option("--noise-manifest", mx_noise);
  mix_cmd->add_option("--noise-type", mx_type)
      ->check(CLI::IsMember({"noise", "music", "babble", "all"}));

  // audit
  auto* audit_cmd = app.add_subcommand("audit", "re-measure mixture SNRs");
  double audit_tol = 0.01;
  audit_cmd->add_option("--tolerance-db", audit_tol);

  // train
  auto* train_cmd = app.add_subcommand("train", "run one training stage");
  std::string tr_stage;
  bool tr_resume = false;
  train_cmd->add_option("--stage", tr_stage)
      ->required()
      ->check(CLI::IsMember({"step1_independent", "step1_joint", "step2", "sid"}));
  train_cmd->add_flag("--resume", tr_resume, "resume this stage's checkpoint");

  // evaluate
  auto* eval_cmd = app.add_subcommand("evaluate", "score a checkpoint");
  std::string ev_task, ev_stage = "step2", ev_trials, ev_type = "all";
  eval_cmd->add_option("--task", ev_task)
      ->required()
      ->check(CLI::IsMember({"sid", "sv", "enhance"}));
  eval_cmd->add_option("--stage", ev_stage);
  eval_cmd->add_option("--trials", ev_trials);
  eval_cmd->add_option("--noise-type", ev_type)
      ->check(CLI::IsMember({"noise", "music", "babble", "all"}));

  // enhance
  auto* enh_cmd = app.add_subcommand("enhance", "enhance a wav file");
  std::string en_in, en_out, en_png, en_clean, en_stage = "step2";
  enh_cmd->add_option("input", en_in)->required();
  enh_cmd->add_option("output", en_out)->required();
  enh_cmd->add_option("--png", en_png, "spectrogram comparison image");
  enh_cmd->add_option("--clean", en_clean, "clean reference for the image");
  enh_cmd->add_option("--stage", en_stage);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    RunConfig cfg = load_config(config_path);
    // precedence: flags > env > file
    cfg.seed = static_cast<uint64_t>(
        std::stoull(env_or("SESR_SEED", std::to_string(cfg.seed))));
    cfg.workdir = env_or("SESR_WORKDIR", cfg.workdir);
    if (seed_flag) cfg.seed = *seed_flag;
    if (workdir_flag) cfg.workdir = *workdir_flag;
    fs::create_directories(cfg.workdir);

    if (*synth_cmd)
      return cmd_synth(cfg, sy_speakers, sy_utts, sy_duration, sy_noises);
    if (*prep_cmd) return cmd_prepare(prep_root, prep_out);
    if (*mix_cmd) {
      auto rel = [&](const std::string& p) {
        return fs::exists(p) ? p : (fs::path(cfg.workdir) / p).string();
      };
      return cmd_mix(cfg, rel(mx_clean), rel(mx_noise), mx_type);
    }
    if (*audit_cmd) return cmd_audit(cfg, audit_tol);
    if (*train_cmd) return cmd_train(cfg, tr_stage, tr_resume);
    if (*eval_cmd)
      return cmd_evaluate(cfg, ev_task, ev_stage, ev_trials, ev_type);
    if (*enh_cmd)
      return cmd_enhance(cfg, en_stage, en_in, en_out, en_png, en_clean);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return 0;
}
