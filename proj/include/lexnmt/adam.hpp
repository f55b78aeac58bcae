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

#include "lexnmt/model.hpp"

namespace lexnmt {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Bias-corrected Adam. Moment buffers live here and persist across updates.
class Adam {
 public:
  Adam(const ModelConfig& config, AdamConfig hyper = {});

  // Applies one update in place and advances the step counter. Throws on a
  // non-finite gradient without touching the parameters.
  void update(Parameters& params, const Parameters& grads, Mode mode);

  long step() const { return step_; }
  const AdamConfig& hyper() const { return hyper_; }

 private:
  AdamConfig hyper_;
  Parameters first_;
  Parameters second_;
  long step_ = 0;
};

}  // namespace lexnmt
