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

#ifndef FLOODSIGHT_NN_GRADCHECK_HPP
#define FLOODSIGHT_NN_GRADCHECK_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "floodsight/nn/layers.hpp"

namespace floodsight::nn {

struct GradCheckEntry {
  std::string name;  // parameter name, or "input"
  std::size_t index;
  double analytic;
  double numeric;
  double rel_error;
};

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::size_t checked = 0;
  /// Coordinates whose +-h probes crossed a ReLU/LeakyReLU kink. Central
  /// differences there average two one-sided slopes, so they are not compared.
  std::size_t skipped_kinks = 0;
  GradCheckEntry worst{};
  std::vector<GradCheckEntry> failures;

  [[nodiscard]] bool passed() const noexcept { return failures.empty(); }
  /// Distinct parameter names among the failures, in first-seen order.
  [[nodiscard]] std::vector<std::string> failing_parameters() const;
};

struct GradCheckOptions {
  double h = 1e-3;
  double tolerance = 1e-3;
  /// Denominator floor for the relative error so exactly-zero gradients do
  /// not turn round-off into spurious failures.
  double abs_floor = 1e-6;
  bool check_input = true;
  std::uint64_t loss_seed = 0x5eed;
  std::size_t max_parameters = 10000;
  bool skip_kinks = true;
};

/// Compares the analytic gradient of L = sum(w * net(x)), w a fixed random
/// weighting, against central differences for every parameter (and the
/// input). rel = |a - n| / max(|a|, |n|, abs_floor).
[[nodiscard]] GradCheckReport finite_diff_check(Sequential<double>& net,
                                                const Tensor<double>& input,
                                                const GradCheckOptions& options = {});

}  // namespace floodsight::nn

#endif  // FLOODSIGHT_NN_GRADCHECK_HPP
