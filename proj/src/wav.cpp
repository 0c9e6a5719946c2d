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

#include "sesr/wav.hpp"

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace sesr::wav {

namespace {

uint32_t read_u32(const uint8_t* p) {
  return uint32_t(p[0]) | uint32_t(p[1]) << 8 | uint32_t(p[2]) << 16 |
         uint32_t(p[3]) << 24;
}
uint16_t read_u16(const uint8_t* p) { return uint16_t(p[0]) | uint16_t(p[1]) << 8; }

void put_u32(std::vector<uint8_t>& v, uint32_t x) {
  v.push_back(uint8_t(x)); v.push_back(uint8_t(x >> 8));
  v.push_back(uint8_t(x >> 16)); v.push_back(uint8_t(x >> 24));
}
void put_u16(std::vector<uint8_t>& v, uint16_t x) {
  v.push_back(uint8_t(x)); v.push_back(uint8_t(x >> 8));
}

void write_file(const std::string& path, const std::vector<uint8_t>& bytes) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f.write(reinterpret_cast<const char*>(bytes.data()),
          static_cast<std::streamsize>(bytes.size()));
  if (!f) throw std::runtime_error("short write: " + path);
}

std::vector<uint8_t> header(uint16_t format, uint16_t bits, int sample_rate,
                            uint32_t data_bytes) {
  std::vector<uint8_t> h;
  h.insert(h.end(), {'R', 'I', 'F', 'F'});
  put_u32(h, 36 + data_bytes);
  h.insert(h.end(), {'W', 'A', 'V', 'E', 'f', 'm', 't', ' '});
  put_u32(h, 16);
  put_u16(h, format);
  put_u16(h, 1);  // mono
  put_u32(h, static_cast<uint32_t>(sample_rate));
  put_u32(h, static_cast<uint32_t>(sample_rate) * bits / 8);
  put_u16(h, static_cast<uint16_t>(bits / 8));
  put_u16(h, bits);
  h.insert(h.end(), {'d', 'a', 't', 'a'});
  put_u32(h, data_bytes);
  return h;
}

}  // namespace

dsp::Waveform read(const std::string& path, int target_rate) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open: " + path);
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                             std::istreambuf_iterator<char>());
  if (bytes.size() < 44 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
    throw std::runtime_error("not a WAV file: " + path);

  uint16_t format = 0, channels = 0, bits = 0;
  uint32_t sample_rate = 0;
  const uint8_t* data = nullptr;
  uint32_t data_len = 0;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const uint32_t chunk_len = read_u32(bytes.data() + pos + 4);
    if (std::memcmp(bytes.data() + pos, "fmt ", 4) == 0 && chunk_len >= 16) {
      const uint8_t* p = bytes.data() + pos + 8;
      format = read_u16(p);
      channels = read_u16(p + 2);
      sample_rate = read_u32(p + 4);
      bits = read_u16(p + 14);
    } else if (std::memcmp(bytes.data() + pos, "data", 4) == 0) {
      data = bytes.data() + pos + 8;
      data_len = std::min<uint32_t>(chunk_len,
                                    static_cast<uint32_t>(bytes.size() - pos - 8));
    }
    pos += 8 + chunk_len + (chunk_len & 1);
  }
  if (data == nullptr || channels == 0 || sample_rate == 0)
    throw std::runtime_error("malformed WAV: " + path);

  dsp::Waveform w;
  w.sample_rate = static_cast<int>(sample_rate);
  if (format == 1 && bits == 16) {
    const uint32_t frames = data_len / (2u * channels);
    w.samples.resize(frames);
    for (uint32_t i = 0; i < frames; ++i) {
      double acc = 0;
      for (uint16_t c = 0; c < channels; ++c) {
        const int16_t s = static_cast<int16_t>(
            read_u16(data + (static_cast<size_t>(i) * channels + c) * 2));
        acc += s / 32768.0;
      }
      w.samples[i] = static_cast<float>(acc / channels);
    }
  } else if (format == 3 && bits == 32) {
    const uint32_t frames = data_len / (4u * channels);
    w.samples.resize(frames);
    for (uint32_t i = 0; i < frames; ++i) {
      double acc = 0;
      for (uint16_t c = 0; c < channels; ++c) {
        uint32_t u = read_u32(data + (static_cast<size_t>(i) * channels + c) * 4);
        float s;
        std::memcpy(&s, &u, 4);
        acc += s;
      }
      w.samples[i] = static_cast<float>(acc / channels);
    }
  } else {
    throw std::runtime_error("unsupported WAV encoding in " + path);
  }
  if (target_rate > 0 && target_rate != w.sample_rate)
    w = dsp::resample(w, target_rate);
  return w;
}

void write_float32(const std::string& path, const dsp::Waveform& w) {
  const uint32_t data_bytes = static_cast<uint32_t>(w.samples.size() * 4);
  std::vector<uint8_t> out = header(3, 32, w.sample_rate, data_bytes);
  out.reserve(out.size() + data_bytes);
  for (float s : w.samples) {
    uint32_t u;
    std::memcpy(&u, &s, 4);
    put_u32(out, u);
  }
  write_file(path, out);
}

void write_pcm16(const std::string& path, const dsp::Waveform& w) {
  const uint32_t data_bytes = static_cast<uint32_t>(w.samples.size() * 2);
  std::vector<uint8_t> out = header(1, 16, w.sample_rate, data_bytes);
  out.reserve(out.size() + data_bytes);
  for (float s : w.samples) {
    const float c = std::clamp(s, -1.0f, 1.0f);
    put_u16(out, static_cast<uint16_t>(static_cast<int16_t>(
                     std::lrint(c * 32767.0f))));
  }
  write_file(path, out);
}

}  // namespace sesr::wav
