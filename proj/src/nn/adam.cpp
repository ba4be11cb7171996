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

#include "floodsight/nn/adam.hpp"

#include <cmath>

namespace floodsight::nn {

template <typename T>
AdamState<T>::AdamState(const std::vector<ConstParamRef<T>>& params, AdamHyper h) : hyper(h) {
  for (const auto& p : params) {
    m.emplace_back(p.tensor->shape());
    v.emplace_back(p.tensor->shape());
  }
}

template <typename T>
void adam_step(std::span<const ParamRef<T>> params, std::span<const Tensor<T>> grads,
               AdamState<T>& state, double lr) {
  if (params.size() != grads.size() || params.size() != state.m.size() ||
      params.size() != state.v.size()) {
    throw ShapeError("adam: parameter, gradient and moment counts differ");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    const Shape& s = params[i].tensor->shape();
    if (grads[i].shape() != s || state.m[i].shape() != s || state.v[i].shape() != s) {
      throw ShapeError("adam: shape mismatch for " + params[i].name);
    }
    if (!grads[i].all_finite()) {
      throw TrainingError("non-finite gradient for parameter " + params[i].name);
    }
  }

  ++state.t;
  const double t = static_cast<double>(state.t);
  const auto b1 = static_cast<T>(state.hyper.beta1);
  const auto b2 = static_cast<T>(state.hyper.beta2);
  const auto eps = static_cast<T>(state.hyper.eps);
  const auto corr1 = static_cast<T>(1.0 - std::pow(state.hyper.beta1, t));
  const auto corr2 = static_cast<T>(1.0 - std::pow(state.hyper.beta2, t));
  const auto step = static_cast<T>(lr);
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto p = params[i].tensor->data();
    auto g = grads[i].data();
    auto m = state.m[i].data();
    auto v = state.v[i].data();
    for (std::size_t j = 0; j < p.size(); ++j) {
      m[j] = b1 * m[j] + (T(1) - b1) * g[j];
      v[j] = b2 * v[j] + (T(1) - b2) * g[j] * g[j];
      const T m_hat = m[j] / corr1;
      const T v_hat = v[j] / corr2;
      p[j] -= step * m_hat / (std::sqrt(v_hat) + eps);
    }
  }
}

template struct AdamState<float>;
template struct AdamState<double>;
template void adam_step<float>(std::span<const ParamRef<float>>, std::span<const Tensor<float>>,
                               AdamState<float>&, double);
template void adam_step<double>(std::span<const ParamRef<double>>,
                                std::span<const Tensor<double>>, AdamState<double>&, double);

}  // namespace floodsight::nn
