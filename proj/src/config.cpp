// Copyright 2026 The lexnmt Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "lexnmt/config.hpp"

#include "lexnmt/io.hpp"

namespace lexnmt {

void RunConfig::validate() const {
  if (profile != "desk" && profile != "paper") throw Error("unknown profile: " + profile);
  if (lexicon_kind != "auto" && lexicon_kind != "manual" && lexicon_kind != "hybrid" &&
      lexicon_kind != "none")
    throw Error("unknown lexicon kind: " + lexicon_kind);
  if (mode != Mode::base && lexicon_kind == "none")
    throw Error(to_string(mode) + " mode requires a lexicon");
  if (threshold < 1) throw Error("threshold must be >= 1");
  if (layers < 1 || hidden < 1 || embed < 1) throw Error("model sizes must be positive");
  if (batch_size < 1) throw Error("batch size must be >= 1");
  if (epochs < 1) throw Error("epochs must be >= 1");
  if (beam < 1) throw Error("beam must be >= 1");
  if (!(epsilon > 0.0)) throw Error("epsilon must be > 0");
  if (!(eos_discount > 0.0 && eos_discount <= 1.0)) throw Error("eos discount must be in (0, 1]");
  if (dropout < 0.0 || dropout >= 1.0) throw Error("dropout must be in [0, 1)");
  if (!(learning_rate > 0.0)) throw Error("learning rate must be > 0");
  if (max_len < 1) throw Error("max length must be >= 1");
  if (ibm_iterations < 1) throw Error("IBM iterations must be >= 1");
}

RunConfig profile_defaults(const std::string& profile) {
  RunConfig c;
  c.profile = profile;
  if (profile == "desk") return c;
  if (profile == "paper") {
    c.layers = 4;
    c.hidden = 800;
    c.embed = 800;
    c.batch_size = 64;
    c.epochs = 14;
    c.beam = 5;
    c.epsilon = 1e-3;
    c.dropout = 0.2;
    c.eos_discount = 0.9;
    c.learning_rate = 1e-3;
    return c;
  }
  throw Error("unknown profile: " + profile);
}

std::map<std::string, std::string> read_config_file(const std::filesystem::path& path) {
  std::map<std::string, std::string> out;
  const auto lines = read_lines(path);
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return std::string();
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
  };
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto line = trim(lines[i]);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(path.string() + ": expected key=value on line " + std::to_string(i + 1));
    auto key = trim(line.substr(0, eq));
    if (key.empty()) throw Error(path.string() + ": empty key on line " + std::to_string(i + 1));
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

}  // namespace lexnmt
