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

#include <cmath>
#include <string>

#include "floodsight/cyclegan.hpp"
#include "floodsight/error.hpp"

namespace floodsight::cyclegan {

void CycleGanConfig::validate() const {
  auto fail = [](const std::string& what) { throw ArgumentError("config: " + what); };
  if (image_size < 16 || image_size % 4 != 0) {
    fail("image_size must be a multiple of 4 and >= 16");
  }
  if (base_width < 1) fail("base_width must be >= 1");
  if (epochs_constant > epochs_total) fail("epochs_constant must not exceed epochs_total");
  if (!(lr0 > 0.0) || !std::isfinite(lr0)) fail("lr0 must be > 0");
  if (batch_size < 1) fail("batch_size must be >= 1");
  if (!(lambda_cycle >= 0.0) || !std::isfinite(lambda_cycle)) fail("lambda_cycle must be >= 0");
  if (!(beta1 >= 0.0 && beta1 < 1.0)) fail("beta1 must lie in [0, 1)");
  if (!(beta2 >= 0.0 && beta2 < 1.0)) fail("beta2 must lie in [0, 1)");
  if (!(adam_eps > 0.0)) fail("adam_eps must be > 0");
  if (!(init_std >= 0.0) || !std::isfinite(init_std)) fail("init_std must be >= 0");
}

double lr_at(const CycleGanConfig& config, std::uint32_t epoch) {
  if (epoch >= config.epochs_total) {
    throw ArgumentError("epoch " + std::to_string(epoch) + " outside [0, " +
                        std::to_string(config.epochs_total) + ")");
  }
  if (epoch < config.epochs_constant) return config.lr0;
  return config.lr0 * static_cast<double>(config.epochs_total - epoch) /
         static_cast<double>(config.epochs_total - config.epochs_constant);
}

namespace {

template <typename T>
void require_same_shape(const Tensor<T>& a, const Tensor<T>& b, const char* what) {
  if (a.shape() != b.shape()) {
    throw ShapeError(std::string(what) + ": shape " + nn::shape_str(a.shape()) + " vs " +
                     nn::shape_str(b.shape()));
  }
  if (a.size() == 0) throw ShapeError(std::string(what) + ": empty tensor");
}

template <typename T>
double mean_sq_from(const Tensor<T>& s, double target) {
  if (s.size() == 0) throw ShapeError("adversarial loss: empty score tensor");
  double acc = 0.0;
  for (T v : s.data()) acc += (v - target) * (v - target);
  return acc / static_cast<double>(s.size());
}

}  // namespace

template <typename T>
double cycle_loss(const Tensor<T>& x, const Tensor<T>& x_rec) {
  require_same_shape(x, x_rec, "cycle loss");
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    acc += std::abs(static_cast<double>(x[i]) - static_cast<double>(x_rec[i]));
  }
  return acc / static_cast<double>(x.size());
}

template <typename T>
double adv_loss_d(const Tensor<T>& real_scores, const Tensor<T>& fake_scores) {
  return mean_sq_from(real_scores, 1.0) + mean_sq_from(fake_scores, 0.0);
}

template <typename T>
double adv_loss_g(const Tensor<T>& fake_scores) {
  return mean_sq_from(fake_scores, 1.0);
}

template double cycle_loss(const Tensor<float>&, const Tensor<float>&);
template double cycle_loss(const Tensor<double>&, const Tensor<double>&);
template double adv_loss_d(const Tensor<float>&, const Tensor<float>&);
template double adv_loss_d(const Tensor<double>&, const Tensor<double>&);
template double adv_loss_g(const Tensor<float>&);
template double adv_loss_g(const Tensor<double>&);

double total_generator_loss(const GeneratorLossParts& p, const CycleGanConfig& config) {
  double total = p.adv_g + p.adv_f + config.lambda_cycle * (p.cycle_x + p.cycle_y);
  if (config.use_identity_loss) total += 0.5 * config.lambda_cycle * (p.identity_x + p.identity_y);
  return total;
}

std::vector<nn::LayerSpec> generator_specs(const CycleGanConfig& config) {
  using namespace nn;
  const std::size_t w = config.base_width;
  const auto relu = ActivationSpec{ActivationKind::kRelu};
  std::vector<LayerSpec> s = {
      ConvSpec{3, w, 7, 1, PadMode::kReflect},         InstanceNormSpec{w},     relu,
      ConvSpec{w, 2 * w, 3, 2, PadMode::kReflect},     InstanceNormSpec{2 * w}, relu,
      ConvSpec{2 * w, 4 * w, 3, 2, PadMode::kReflect}, InstanceNormSpec{4 * w}, relu,
  };
  for (std::uint32_t i = 0; i < config.n_res_blocks; ++i) s.push_back(ResidualBlockSpec{4 * w});
  s.insert(s.end(), {ConvTransposeSpec{4 * w, 2 * w}, InstanceNormSpec{2 * w}, relu,
                     ConvTransposeSpec{2 * w, w}, InstanceNormSpec{w}, relu,
                     ConvSpec{w, 3, 7, 1, PadMode::kReflect},
                     ActivationSpec{ActivationKind::kTanh}});
  return s;
}

std::vector<nn::LayerSpec> discriminator_specs(const CycleGanConfig& config) {
  using namespace nn;
  const std::size_t w = config.base_width;
  const auto lrelu = ActivationSpec{ActivationKind::kLeakyRelu, 0.2};
  return {
      ConvSpec{3, w, 4, 2, PadMode::kZero, 1},         lrelu,
      ConvSpec{w, 2 * w, 4, 2, PadMode::kZero, 1},     InstanceNormSpec{2 * w}, lrelu,
      ConvSpec{2 * w, 4 * w, 4, 2, PadMode::kZero, 1}, InstanceNormSpec{4 * w}, lrelu,
      ConvSpec{4 * w, 1, 3, 1, PadMode::kZero, 1},
  };
}

}  // namespace floodsight::cyclegan
