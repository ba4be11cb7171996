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

/**
 * @file
 * @brief Two-generator, two-discriminator unpaired translation model:
 * losses, learning-rate schedule, training loop, checkpoints and inference.
 *
 * Domain X is non-flooded imagery and Y is flooded imagery. G maps X to Y,
 * F maps Y to X, D_X and D_Y score patches of their domains.
 */

#ifndef FLOODSIGHT_CYCLEGAN_HPP
#define FLOODSIGHT_CYCLEGAN_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "floodsight/image.hpp"
#include "floodsight/nn/adam.hpp"
#include "floodsight/nn/layers.hpp"
#include "floodsight/nn/tensor.hpp"

namespace floodsight::cyclegan {

using nn::Tensor;

struct CycleGanConfig {
  std::uint32_t image_size = 64;
  std::uint32_t base_width = 32;
  std::uint32_t n_res_blocks = 3;
  double lambda_cycle = 10.0;
  bool use_identity_loss = false;
  std::uint32_t epochs_total = 200;
  std::uint32_t epochs_constant = 100;
  double lr0 = 2e-4;
  std::uint32_t batch_size = 1;
  std::uint32_t pool_size = 50;
  std::uint64_t seed = 0;
  double beta1 = 0.5;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  double init_std = nn::kDefaultInitStd;

  /// Throws ArgumentError naming the offending field.
  void validate() const;
  bool operator==(const CycleGanConfig&) const = default;
};

/// "key = value" text using the field names above. Unknown keys and invalid
/// values are rejected (ParseError / ArgumentError).
[[nodiscard]] CycleGanConfig parse_cyclegan_config(std::string_view text);
/// Inverse of parse_cyclegan_config; doubles round-trip exactly.
[[nodiscard]] std::string format_cyclegan_config(const CycleGanConfig& config);

/// lr0 for epoch < epochs_constant, then linear decay towards 0 at epochs_total.
[[nodiscard]] double lr_at(const CycleGanConfig& config, std::uint32_t epoch);

// Losses. All return double whatever the tensor precision.

/// mean |x - x_rec|
template <typename T>
[[nodiscard]] double cycle_loss(const Tensor<T>& x, const Tensor<T>& x_rec);
/// mean((real - 1)^2) + mean(fake^2)
template <typename T>
[[nodiscard]] double adv_loss_d(const Tensor<T>& real_scores, const Tensor<T>& fake_scores);
/// mean((fake - 1)^2)
template <typename T>
[[nodiscard]] double adv_loss_g(const Tensor<T>& fake_scores);

struct GeneratorLossParts {
  double adv_g = 0.0;  // D_Y on G(x)
  double adv_f = 0.0;  // D_X on F(y)
  double cycle_x = 0.0;
  double cycle_y = 0.0;
  double identity_x = 0.0;
  double identity_y = 0.0;
};

[[nodiscard]] double total_generator_loss(const GeneratorLossParts& parts,
                                          const CycleGanConfig& config);

// Architecture

[[nodiscard]] std::vector<nn::LayerSpec> generator_specs(const CycleGanConfig& config);
[[nodiscard]] std::vector<nn::LayerSpec> discriminator_specs(const CycleGanConfig& config);

/// History buffer of generated images for discriminator updates.
class ImagePool {
 public:
  explicit ImagePool(std::uint32_t capacity = 0) : capacity_(capacity) {}

  /// Fills up first; once full, returns a stored fake (replacing it with the
  /// new one) with probability 0.5, otherwise the new fake itself.
  [[nodiscard]] Tensor<float> query(const Tensor<float>& fake, Rng& rng);

  [[nodiscard]] std::uint32_t capacity() const noexcept { return capacity_; }
  [[nodiscard]] std::size_t size() const noexcept { return images_.size(); }
  [[nodiscard]] const std::vector<Tensor<float>>& images() const noexcept { return images_; }
  /// Used when restoring a checkpoint.
  void restore(std::vector<Tensor<float>> images);

 private:
  std::uint32_t capacity_;
  std::vector<Tensor<float>> images_;
};

struct ModelState {
  CycleGanConfig config;
  nn::Sequential<float> g;    // X -> Y
  nn::Sequential<float> f;    // Y -> X
  nn::Sequential<float> d_x;
  nn::Sequential<float> d_y;
  nn::AdamState<float> opt_g;
  nn::AdamState<float> opt_f;
  nn::AdamState<float> opt_d_x;
  nn::AdamState<float> opt_d_y;
  std::uint32_t epoch = 0;  // completed epochs
  ImagePool pool_x;         // fakes of X, i.e. F(y)
  ImagePool pool_y;         // fakes of Y, i.e. G(x)
};

/// Fresh networks initialised from config.seed.
[[nodiscard]] ModelState init_state(const CycleGanConfig& config);

struct EpochMetrics {
  std::uint32_t epoch = 0;
  double lr = 0.0;
  double adv_g = 0.0;
  double adv_f = 0.0;
  double loss_d_x = 0.0;
  double loss_d_y = 0.0;
  double cycle_x = 0.0;
  double cycle_y = 0.0;
  double seconds = 0.0;
};
using TrainMetrics = std::vector<EpochMetrics>;

using EpochCallback = std::function<void(const EpochMetrics&)>;

/// Runs epochs state.epoch .. stop_epoch-1 (stop_epoch <= epochs_total).
/// Each epoch draws from its own generator seeded by (config.seed, epoch), so
/// stopping, checkpointing and resuming reproduces an uninterrupted run.
/// Images must be image_size square. Throws TrainingError on a non-finite loss.
TrainMetrics train_epochs(ModelState& state, const std::vector<Image>& train_x,
                          const std::vector<Image>& train_y, std::uint32_t stop_epoch,
                          const EpochCallback& on_epoch = {});

struct TrainResult {
  ModelState state;
  TrainMetrics metrics;
};

/// init_state followed by train_epochs up to epochs_total.
[[nodiscard]] TrainResult train(const CycleGanConfig& config, const std::vector<Image>& train_x,
                                const std::vector<Image>& train_y,
                                const EpochCallback& on_epoch = {});

enum class Direction { kXtoY, kYtoX };

/// [0,1] image -> [-1,1] NCHW tensor and back.
[[nodiscard]] Tensor<float> to_tensor(const Image& img);
[[nodiscard]] Image to_image(const Tensor<float>& t);

/// Throws ShapeError when img is not image_size square.
[[nodiscard]] Image translate(const ModelState& state, const Image& img,
                              Direction direction = Direction::kXtoY);

using Oracle = std::function<bool(const Image&)>;

/// Fraction of translated images the oracle accepts. Throws on an empty set.
[[nodiscard]] double evaluate(const ModelState& state, const std::vector<Image>& images,
                              const Oracle& oracle, Direction direction = Direction::kXtoY);

/// Mean of cycle_loss over both directions, measured on [-1,1] tensors.
[[nodiscard]] double held_out_cycle_loss(const ModelState& state,
                                         const std::vector<Image>& test_x,
                                         const std::vector<Image>& test_y);

inline constexpr std::uint16_t kCheckpointVersion = 1;

[[nodiscard]] std::vector<std::uint8_t> save_checkpoint(const ModelState& state);
/// Throws DecodeError on bad magic, version, truncation or a tensor table that
/// does not match the stored configuration.
[[nodiscard]] ModelState load_checkpoint(std::span<const std::uint8_t> bytes);
void save_checkpoint_file(const ModelState& state, const std::string& path);
[[nodiscard]] ModelState load_checkpoint_file(const std::string& path);

/// Header plus one row per epoch.
[[nodiscard]] std::string metrics_csv(const TrainMetrics& metrics);

}  // namespace floodsight::cyclegan

#endif  // FLOODSIGHT_CYCLEGAN_HPP
