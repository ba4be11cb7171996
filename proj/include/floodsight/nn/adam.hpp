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

#ifndef FLOODSIGHT_NN_ADAM_HPP
#define FLOODSIGHT_NN_ADAM_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "floodsight/nn/layers.hpp"
#include "floodsight/nn/tensor.hpp"

namespace floodsight::nn {

struct AdamHyper {
  double beta1 = 0.5;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// First/second moments per parameter tensor plus the shared step counter.
template <typename T>
struct AdamState {
  AdamHyper hyper;
  std::vector<Tensor<T>> m;
  std::vector<Tensor<T>> v;
  std::uint64_t t = 0;

  AdamState() = default;
  AdamState(const std::vector<ConstParamRef<T>>& params, AdamHyper h);
};

/// One bias-corrected Adam update. Gradients are checked before anything is
/// written, so a non-finite gradient (TrainingError naming the parameter)
/// leaves params and state untouched.
template <typename T>
void adam_step(std::span<const ParamRef<T>> params, std::span<const Tensor<T>> grads,
               AdamState<T>& state, double lr);

}  // namespace floodsight::nn

#endif  // FLOODSIGHT_NN_ADAM_HPP
