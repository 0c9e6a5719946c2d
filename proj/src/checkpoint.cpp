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

#include "sesr/checkpoint.hpp"

#include <zlib.h>

#include <cstring>
#include <fstream>
#include <stdexcept>

namespace sesr {

namespace {

constexpr char kMagic[8] = {'S', 'E', 'S', 'R', 'C', 'K', 'P', '1'};
constexpr uint32_t kVersion = 1;

void put_u32(std::string& b, uint32_t x) {
  char c[4];
  std::memcpy(c, &x, 4);
  b.append(c, 4);
}
void put_u64(std::string& b, uint64_t x) {
  char c[8];
  std::memcpy(c, &x, 8);
  b.append(c, 8);
}
void put_str(std::string& b, const std::string& s) {
  put_u32(b, static_cast<uint32_t>(s.size()));
  b.append(s);
}

struct Reader {
  const std::string& b;
  std::size_t pos = 0;

  void need(std::size_t n) const {
    if (pos + n > b.size()) throw std::runtime_error("checkpoint: truncated");
  }
  uint32_t u32() {
    need(4);
    uint32_t x;
    std::memcpy(&x, b.data() + pos, 4);
    pos += 4;
    return x;
  }
  uint64_t u64() {
    need(8);
    uint64_t x;
    std::memcpy(&x, b.data() + pos, 8);
    pos += 8;
    return x;
  }
  std::string str() {
    const uint32_t n = u32();
    need(n);
    std::string s = b.substr(pos, n);
    pos += n;
    return s;
  }
};

}  // namespace

uint64_t fnv1a(const std::string& s) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

const std::vector<float>* Checkpoint::find(const std::string& name) const {
  for (const auto& [n, v] : blocks)
    if (n == name) return &v;
  return nullptr;
}

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
  std::string body;
  body.append(kMagic, 8);
  put_u32(body, kVersion);
  put_u64(body, ckpt.config_hash);
  put_str(body, ckpt.stage);
  put_u32(body, static_cast<uint32_t>(ckpt.epoch));
  put_str(body, ckpt.rng_state);
  put_u32(body, static_cast<uint32_t>(ckpt.blocks.size()));
  for (const auto& [name, data] : ckpt.blocks) {
    put_str(body, name);
    put_u64(body, data.size());
    body.append(reinterpret_cast<const char*>(data.data()), data.size() * 4);
  }
  const uint32_t crc = static_cast<uint32_t>(
      crc32(0, reinterpret_cast<const Bytef*>(body.data()),
            static_cast<uInt>(body.size())));
  put_u32(body, crc);

  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f.write(body.data(), static_cast<std::streamsize>(body.size()));
  if (!f) throw std::runtime_error("short write: " + path);
}

Checkpoint load_checkpoint(const std::string& path,
                           uint64_t expected_config_hash) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open checkpoint: " + path);
  std::string body((std::istreambuf_iterator<char>(f)),
                   std::istreambuf_iterator<char>());
  if (body.size() < 16) throw std::runtime_error("checkpoint: truncated");

  const uint32_t stored_crc = [&] {
    uint32_t x;
    std::memcpy(&x, body.data() + body.size() - 4, 4);
    return x;
  }();
  const uint32_t crc = static_cast<uint32_t>(
      crc32(0, reinterpret_cast<const Bytef*>(body.data()),
            static_cast<uInt>(body.size() - 4)));
  if (crc != stored_crc)
    throw std::runtime_error("checkpoint: checksum mismatch (corrupt file)");

  Reader r{body};
  r.need(8);
  if (std::memcmp(body.data(), kMagic, 8) != 0)
    throw std::runtime_error("checkpoint: bad magic");
  r.pos = 8;
  if (r.u32() != kVersion) throw std::runtime_error("checkpoint: version mismatch");

  Checkpoint ckpt;
  ckpt.config_hash = r.u64();
  if (expected_config_hash != 0 && ckpt.config_hash != expected_config_hash)
    throw std::runtime_error("checkpoint: config hash mismatch");
  ckpt.stage = r.str();
  ckpt.epoch = static_cast<int>(r.u32());
  ckpt.rng_state = r.str();
  const uint32_t n_blocks = r.u32();
  for (uint32_t i = 0; i < n_blocks; ++i) {
    std::string name = r.str();
    const uint64_t n = r.u64();
    r.need(n * 4);
    std::vector<float> data(n);
    std::memcpy(data.data(), body.data() + r.pos, n * 4);
    r.pos += n * 4;
    ckpt.blocks.emplace_back(std::move(name), std::move(data));
  }
  return ckpt;
}

void dump_params(const std::vector<ParamT<float>*>& params,
                 const std::string& prefix, Checkpoint& out) {
  for (const auto* p : params) {
    std::vector<float> data(p->value.data(), p->value.data() + p->value.numel());
    out.blocks.emplace_back(prefix + p->name, std::move(data));
  }
}

void restore_params(const std::vector<ParamT<float>*>& params,
                    const std::string& prefix, const Checkpoint& ckpt) {
  for (auto* p : params) {
    const auto* data = ckpt.find(prefix + p->name);
    if (data == nullptr)
      throw std::runtime_error("checkpoint: missing block " + prefix + p->name);
    if (data->size() != p->value.numel())
      throw std::runtime_error("checkpoint: size mismatch for " + prefix + p->name);
    std::copy(data->begin(), data->end(), p->value.data());
  }
}

}  // namespace sesr
