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

#include "sesr/manifest.hpp"

#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace sesr::manifest {

using nlohmann::json;

namespace {

std::vector<json> read_jsonl(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open manifest: " + path);
  std::vector<json> out;
  std::string line;
  int lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded())
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": malformed JSON record");
    out.push_back(std::move(j));
  }
  return out;
}

void write_jsonl(const std::vector<json>& records, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  for (const auto& j : records) f << j.dump() << '\n';
  if (!f) throw std::runtime_error("short write: " + path);
}

}  // namespace

std::vector<UttRecord> read_utterances(const std::string& path) {
  std::vector<UttRecord> out;
  for (const auto& j : read_jsonl(path))
    out.push_back({j.at("utt_id").get<std::string>(),
                   j.at("speaker_id").get<std::string>(),
                   j.at("path").get<std::string>(),
                   j.value("duration_s", 0.0)});
  return out;
}

void write_utterances(const std::vector<UttRecord>& records,
                      const std::string& path) {
  std::vector<json> js;
  for (const auto& r : records)
    js.push_back({{"utt_id", r.utt_id},
                  {"speaker_id", r.speaker_id},
                  {"path", r.path},
                  {"duration_s", r.duration_s}});
  write_jsonl(js, path);
}

std::vector<mix::MixSpec> read_mixtures(const std::string& path) {
  std::vector<mix::MixSpec> out;
  for (const auto& j : read_jsonl(path)) {
    mix::MixSpec s;
    s.utt_id = j.at("utt_id").get<std::string>();
    s.speaker_id = j.at("speaker_id").get<std::string>();
    s.clean_path = j.at("clean_path").get<std::string>();
    s.noise_path = j.at("noise_path").get<std::string>();
    s.category = j.at("category").get<std::string>();
    s.snr_db = j.at("snr_db").get<double>();
    s.offset = j.at("offset").get<long>();
    s.seed = j.at("seed").get<uint64_t>();
    out.push_back(std::move(s));
  }
  return out;
}

void write_mixtures(const std::vector<mix::MixSpec>& specs,
                    const std::string& path) {
  std::vector<json> js;
  for (const auto& s : specs)
    js.push_back({{"utt_id", s.utt_id},
                  {"speaker_id", s.speaker_id},
                  {"clean_path", s.clean_path},
                  {"noise_path", s.noise_path},
                  {"category", s.category},
                  {"snr_db", s.snr_db},
                  {"offset", s.offset},
                  {"seed", s.seed}});
  write_jsonl(js, path);
}

std::vector<mix::NoiseEntry> read_noise_entries(const std::string& path) {
  std::vector<mix::NoiseEntry> out;
  for (const auto& j : read_jsonl(path))
    out.push_back({j.at("category").get<std::string>(),
                   j.at("id").get<std::string>(),
                   j.at("path").get<std::string>(),
                   j.value("num_samples", 0L)});
  return out;
}

void write_noise_entries(const std::vector<mix::NoiseEntry>& entries,
                         const std::string& path) {
  std::vector<json> js;
  for (const auto& e : entries)
    js.push_back({{"category", e.category},
                  {"id", e.id},
                  {"path", e.path},
                  {"num_samples", e.num_samples}});
  write_jsonl(js, path);
}

void write_feature(const Tensor& feat, const dsp::StftConfig& cfg,
                   const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f.write(reinterpret_cast<const char*>(feat.data()),
          static_cast<std::streamsize>(feat.numel() * sizeof(float)));
  if (!f) throw std::runtime_error("short write: " + path);

  json side;
  side["shape"] = feat.shape();
  side["dtype"] = "float32";
  side["frame_ms"] = cfg.window_ms;
  side["hop_ms"] = cfg.hop_ms;
  side["fft_size"] = cfg.fft_size;
  side["window"] = cfg.window_fn;
  std::ofstream sf(path + ".json");
  if (!sf) throw std::runtime_error("cannot open for writing: " + path + ".json");
  sf << side.dump(2) << '\n';
}

Tensor read_feature(const std::string& path, dsp::StftConfig* cfg) {
  std::ifstream sf(path + ".json");
  if (!sf) throw std::runtime_error("missing feature sidecar: " + path + ".json");
  json side = json::parse(sf);
  const auto shape = side.at("shape").get<std::vector<int>>();
  if (cfg != nullptr) {
    cfg->window_ms = side.value("frame_ms", 25);
    cfg->hop_ms = side.value("hop_ms", 10);
    cfg->fft_size = side.value("fft_size", 512);
    cfg->window_fn = side.value("window", std::string("hann"));
  }
  Tensor t(shape);
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open feature file: " + path);
  f.read(reinterpret_cast<char*>(t.data()),
         static_cast<std::streamsize>(t.numel() * sizeof(float)));
  if (f.gcount() != static_cast<std::streamsize>(t.numel() * sizeof(float)))
    throw std::runtime_error("feature file shorter than sidecar shape: " + path);
  return t;
}

}  // namespace sesr::manifest
