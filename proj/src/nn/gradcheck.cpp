// Copyright 2026 The FloodSight Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "floodsight/nn/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace floodsight::nn {

std::vector<std::string> GradCheckReport::failing_parameters() const {
  std::vector<std::string> names;
  for (const auto& f : failures) {
    if (std::find(names.begin(), names.end(), f.name) == names.end()) names.push_back(f.name);
  }
  return names;
}

namespace {

double weighted_sum(const Tensor<double>& y, const Tensor<double>& w) {
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) s += y[i] * w[i];
  return s;
}

}  // namespace

GradCheckReport finite_diff_check(Sequential<double>& net, const Tensor<double>& input,
                                  const GradCheckOptions& options) {
  if (net.parameter_count() > options.max_parameters) {
    throw ArgumentError("finite_diff_check: network has " +
                        std::to_string(net.parameter_count()) + " parameters, limit is " +
                        std::to_string(options.max_parameters));
  }
  Tape<double> tape;
  const Tensor<double> y = net.forward(input, tape);
  Tensor<double> weights(y.shape());
  std::mt19937_64 rng(options.loss_seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (auto& w : weights.data()) w = dist(rng);

  auto grads = net.zero_grads();
  const Tensor<double> input_grad = net.backward(weights, tape, grads);

  GradCheckReport report;
  auto record = [&](const std::string& name, std::size_t index, double analytic,
                    double numeric) {
    const double denom = std::max({std::abs(analytic), std::abs(numeric), options.abs_floor});
    const double rel = std::abs(analytic - numeric) / denom;
    GradCheckEntry entry{name, index, analytic, numeric, rel};
    ++report.checked;
    if (rel > report.max_rel_error || report.checked == 1) {
      report.max_rel_error = std::max(report.max_rel_error, rel);
      report.worst = entry;
    }
    if (!(rel < options.tolerance)) report.failures.push_back(entry);
  };
  struct Probe {
    double slope;
    bool smooth;
  };
  auto probe = [&](double& slot, const Tensor<double>& x) {
    const double saved = slot;
    Tape<double> tp, tm;
    slot = saved + options.h;
    const double plus = weighted_sum(net.forward(x, tp), weights);
    slot = saved - options.h;
    const double minus = weighted_sum(net.forward(x, tm), weights);
    slot = saved;
    const bool smooth = net.same_linear_region(tape, tp) && net.same_linear_region(tape, tm);
    return Probe{(plus - minus) / (2.0 * options.h), smooth};
  };
  auto check = [&](const std::string& name, std::size_t index, double analytic, Probe pr) {
    if (options.skip_kinks && !pr.smooth) {
      ++report.skipped_kinks;
      return;
    }
    record(name, index, analytic, pr.slope);
  };

  const auto params = net.parameters();
  for (std::size_t p = 0; p < params.size(); ++p) {
    auto data = params[p].tensor->data();
    for (std::size_t i = 0; i < data.size(); ++i) {
      check(params[p].name, i, grads[p][i], probe(data[i], input));
    }
  }
  if (options.check_input) {
    Tensor<double> x = input;
    for (std::size_t i = 0; i < x.size(); ++i) check("input", i, input_grad[i], probe(x[i], x));
  }
  return report;
}

}  // namespace floodsight::nn
