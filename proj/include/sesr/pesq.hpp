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
// Perceptual quality scoring is delegated to an external ITU-T P.862 tool.
// The command template contains {ref} and {deg} placeholders; the tool's
// stdout is scanned for its final numeric token. No tool configured (or a
// failing run) yields "unavailable" (std::nullopt), never a fake score.

#ifndef SESR_PESQ_HPP
#define SESR_PESQ_HPP

#include <optional>
#include <string>

namespace sesr::metrics {

struct PesqHook {
  std::string command_template;  // e.g. "pesq +16000 {ref} {deg}"

  bool configured() const { return !command_template.empty(); }
};

std::optional<double> pesq_external(const PesqHook& hook,
                                    const std::string& ref_wav,
                                    const std::string& deg_wav);

// Exposed for testing: last parseable float in a tool's output.
std::optional<double> parse_last_float(const std::string& text);

}  // namespace sesr::metrics

#endif  // SESR_PESQ_HPP
