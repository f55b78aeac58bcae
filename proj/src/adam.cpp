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


#include "lexnmt/adam.hpp"

#include <cmath>

#include "lexnmt/io.hpp"

namespace lexnmt {

Adam::Adam(const ModelConfig& config, AdamConfig hyper)
    : hyper_(hyper), first_(Parameters::zeros(config)), second_(Parameters::zeros(config)) {}

void Adam::update(Parameters& params, const Parameters& grads, Mode mode) {
  std::vector<const Mat*> g;
  grads.for_each(mode, [&](const std::string& name, const Mat& m) {
    if (!m.allFinite()) throw Error("non-finite gradient in '" + name + "'");
    g.push_back(&m);
  });
  std::vector<Mat*> m1, m2;
  first_.for_each(mode, [&](const std::string&, Mat& m) { m1.push_back(&m); });
  second_.for_each(mode, [&](const std::string&, Mat& m) { m2.push_back(&m); });

  ++step_;
  const double t = static_cast<double>(step_);
  const double c1 = 1.0 - std::pow(hyper_.beta1, t);
  const double c2 = 1.0 - std::pow(hyper_.beta2, t);
  std::size_t k = 0;
  params.for_each(mode, [&](const std::string&, Mat& p) {
    Mat& m = *m1[k];
    Mat& v = *m2[k];
    const Mat& grad = *g[k];
    ++k;
    m = hyper_.beta1 * m + (1.0 - hyper_.beta1) * grad;
    v = hyper_.beta2 * v + (1.0 - hyper_.beta2) * grad.cwiseProduct(grad);
    p.array() -= hyper_.learning_rate * (m.array() / c1) /
                 ((v.array() / c2).sqrt() + hyper_.epsilon);
  });
}

}  // namespace lexnmt
