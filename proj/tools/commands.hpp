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

#include <map>
#include <string>

namespace lexnmt::cli {

// Merged settings for one invocation: profile defaults < config file < flags.
using Settings = std::map<std::string, std::string>;

int cmd_vocab(const Settings& s);
int cmd_lexicon_train(const Settings& s);
int cmd_lexicon_merge(const Settings& s);
int cmd_train(const Settings& s);
int cmd_translate(const Settings& s);
int cmd_evaluate(const Settings& s);

}  // namespace lexnmt::cli
