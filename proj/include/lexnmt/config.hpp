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


#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include "lexnmt/model.hpp"

namespace lexnmt {

// User-facing knobs shared by the CLI commands.
struct RunConfig {
  std::string command;
  std::string profile = "desk";
  Mode mode = Mode::base;
  std::string lexicon_kind = "none";  // auto|manual|hybrid|none
  int threshold = 1;
  int layers = 2;
  int hidden = 64;
  int embed = 64;
  int batch_size = 32;
  int epochs = 14;
  int beam = 5;
  double epsilon = 1e-3;
  double eos_discount = 0.9;
  double dropout = 0.2;
  double learning_rate = 1e-3;
  int max_len = 50;
  int ibm_iterations = 10;
  std::uint64_t seed = 1;

  void validate() const;
};

// "desk": laptop-sized defaults. "paper": 4 layers, hidden 800, batch 64, 14 epochs.
RunConfig profile_defaults(const std::string& profile);

// Flat `key = value` file; `#` starts a comment line.
std::map<std::string, std::string> read_config_file(const std::filesystem::path& path);

}  // namespace lexnmt
