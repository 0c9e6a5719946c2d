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

#include "sesr/pesq.hpp"

#include <cstdio>
#include <cstdlib>
#include <sstream>

namespace sesr::metrics {

namespace {

std::string substitute(std::string tmpl, const std::string& key,
                       const std::string& value) {
  for (std::size_t pos; (pos = tmpl.find(key)) != std::string::npos;)
    tmpl.replace(pos, key.size(), value);
  return tmpl;
}

}  // namespace

std::optional<double> parse_last_float(const std::string& text) {
  std::istringstream is(text);
  std::string tok;
  std::optional<double> last;
  while (is >> tok) {
    try {
      std::size_t used = 0;
      const double v = std::stod(tok, &used);
      if (used == tok.size()) last = v;
    } catch (...) {
    }
  }
  return last;
}

std::optional<double> pesq_external(const PesqHook& hook,
                                    const std::string& ref_wav,
                                    const std::string& deg_wav) {
  if (!hook.configured()) return std::nullopt;
  std::string cmd = substitute(hook.command_template, "{ref}", ref_wav);
  cmd = substitute(cmd, "{deg}", deg_wav);
  cmd += " 2>/dev/null";

  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) return std::nullopt;
  std::string output;
  char buf[512];
  while (fgets(buf, sizeof(buf), pipe) != nullptr) output += buf;
  const int status = pclose(pipe);
  if (status != 0) return std::nullopt;
  return parse_last_float(output);
}

}  // namespace sesr::metrics
