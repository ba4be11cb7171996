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

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <string>

#include "floodsight/cyclegan.hpp"
#include "floodsight/error.hpp"

namespace floodsight::cyclegan {

using nn::Shape;
using Net = nn::Sequential<float>;

void ImagePool::restore(std::vector<Tensor<float>> images) {
  if (images.size() > capacity_) throw ArgumentError("image pool: more images than capacity");
  images_ = std::move(images);
}

Tensor<float> ImagePool::query(const Tensor<float>& fake, Rng& rng) {
  if (capacity_ == 0) return fake;
  if (images_.size() < capacity_) {
    images_.push_back(fake);
    return fake;
  }
  if (std::uniform_real_distribution<double>(0.0, 1.0)(rng) > 0.5) {
    const auto idx = std::uniform_int_distribution<std::size_t>(0, capacity_ - 1)(rng);
    Tensor<float> stored = std::move(images_[idx]);
    images_[idx] = fake;
    return stored;
  }
  return fake;
}

namespace {

Rng seeded(std::uint64_t seed, std::uint64_t stream, std::uint64_t salt) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(salt)};
  return Rng(seq);
}

constexpr std::uint64_t kInitSalt = 0x1a17;
constexpr std::uint64_t kEpochSalt = 0xe90c;

nn::AdamState<float> adam_for(const Net& net, const CycleGanConfig& c) {
  return {net.parameters(), nn::AdamHyper{c.beta1, c.beta2, c.adam_eps}};
}

Tensor<float> stack(const std::vector<Tensor<float>>& items) {
  Shape shape = items.front().shape();
  shape[0] = items.size();
  Tensor<float> out(shape);
  const std::size_t n = items.front().size();
  for (std::size_t i = 0; i < items.size(); ++i) {
    std::copy(items[i].data().begin(), items[i].data().end(), out.data().begin() + i * n);
  }
  return out;
}

Tensor<float> slice(const Tensor<float>& batch, std::size_t i) {
  Shape shape = batch.shape();
  const std::size_t n = batch.size() / shape[0];
  shape[0] = 1;
  const auto begin = batch.data().begin() + i * n;
  return Tensor<float>(shape, std::vector<float>(begin, begin + n));
}

/// d/ds of scale * mean((s - target)^2)
Tensor<float> grad_sq(const Tensor<float>& s, float target, double scale) {
  Tensor<float> g(s.shape());
  const double k = 2.0 * scale / static_cast<double>(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) g[i] = static_cast<float>(k * (s[i] - target));
  return g;
}

/// d/da of scale * mean|a - b|
Tensor<float> grad_l1(const Tensor<float>& a, const Tensor<float>& b, double scale) {
  Tensor<float> g(a.shape());
  const auto k = static_cast<float>(scale / static_cast<double>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) {
    g[i] = a[i] > b[i] ? k : (a[i] < b[i] ? -k : 0.0f);
  }
  return g;
}

void check_images(const std::vector<Image>& imgs, std::uint32_t size, const char* which) {
  if (imgs.empty()) throw ArgumentError(std::string(which) + ": empty training set");
  for (const auto& img : imgs) {
    if (img.height() != size || img.width() != size) {
      throw ShapeError(std::string(which) + ": images must be " + std::to_string(size) + "x" +
                       std::to_string(size));
    }
  }
}

class Trainer {
 public:
  Trainer(ModelState& s, std::uint32_t epoch, std::uint32_t step)
      : s_(s), c_(s.config), epoch_(epoch), step_(step) {}

  void step(const Tensor<float>& x, const Tensor<float>& y, double lr, Rng& rng,
            EpochMetrics& acc) {
    // Generators.
    nn::Tape<float> t_gx, t_fgx, t_fy, t_gfy, t_dyf, t_dxf;
    const auto fake_y = s_.g.forward(x, t_gx);
    const auto rec_x = s_.f.forward(fake_y, t_fgx);
    const auto fake_x = s_.f.forward(y, t_fy);
    const auto rec_y = s_.g.forward(fake_x, t_gfy);
    const auto score_fy = s_.d_y.forward(fake_y, t_dyf);
    const auto score_fx = s_.d_x.forward(fake_x, t_dxf);

    GeneratorLossParts parts;
    parts.adv_g = adv_loss_g(score_fy);
    parts.adv_f = adv_loss_g(score_fx);
    parts.cycle_x = cycle_loss(x, rec_x);
    parts.cycle_y = cycle_loss(y, rec_y);

    auto g_grads = s_.g.zero_grads();
    auto f_grads = s_.f.zero_grads();
    auto dx_scratch = s_.d_x.zero_grads();
    auto dy_scratch = s_.d_y.zero_grads();
    const double lam = c_.lambda_cycle;

    if (c_.use_identity_loss) {
      nn::Tape<float> t_gy, t_fx;
      const auto idt_y = s_.g.forward(y, t_gy);
      const auto idt_x = s_.f.forward(x, t_fx);
      parts.identity_y = cycle_loss(y, idt_y);
      parts.identity_x = cycle_loss(x, idt_x);
      (void)s_.g.backward(grad_l1(idt_y, y, 0.5 * lam), t_gy, g_grads);
      (void)s_.f.backward(grad_l1(idt_x, x, 0.5 * lam), t_fx, f_grads);
    }
    const double total = total_generator_loss(parts, c_);
    require_finite(total, "generator");

    // X -> Y -> X
    auto d_fake_y = s_.d_y.backward(grad_sq(score_fy, 1.0f, 1.0), t_dyf, dy_scratch);
    d_fake_y += s_.f.backward(grad_l1(rec_x, x, lam), t_fgx, f_grads);
    (void)s_.g.backward(d_fake_y, t_gx, g_grads);
    // Y -> X -> Y
    auto d_fake_x = s_.d_x.backward(grad_sq(score_fx, 1.0f, 1.0), t_dxf, dx_scratch);
    d_fake_x += s_.g.backward(grad_l1(rec_y, y, lam), t_gfy, g_grads);
    (void)s_.f.backward(d_fake_x, t_fy, f_grads);

    apply(s_.g, g_grads, s_.opt_g, lr);
    apply(s_.f, f_grads, s_.opt_f, lr);

    // Discriminators on pooled fakes.
    const double ld_y = update_discriminator(s_.d_y, s_.opt_d_y, y,
                                             pooled(s_.pool_y, fake_y, rng), lr);
    const double ld_x = update_discriminator(s_.d_x, s_.opt_d_x, x,
                                             pooled(s_.pool_x, fake_x, rng), lr);

    acc.adv_g += parts.adv_g;
    acc.adv_f += parts.adv_f;
    acc.cycle_x += parts.cycle_x;
    acc.cycle_y += parts.cycle_y;
    acc.loss_d_x += ld_x;
    acc.loss_d_y += ld_y;
  }

 private:
  void require_finite(double loss, const char* which) const {
    if (!std::isfinite(loss)) {
      throw TrainingError("epoch " + std::to_string(epoch_) + " step " + std::to_string(step_) +
                          ": non-finite " + which + " loss");
    }
  }

  void apply(Net& net, const std::vector<Tensor<float>>& grads, nn::AdamState<float>& opt,
             double lr) const {
    try {
      const auto params = net.parameters();
      nn::adam_step<float>(params, grads, opt, lr);
    } catch (const TrainingError& e) {
      throw TrainingError("epoch " + std::to_string(epoch_) + " step " + std::to_string(step_) +
                          ": " + e.what());
    }
  }

  static Tensor<float> pooled(ImagePool& pool, const Tensor<float>& fakes, Rng& rng) {
    std::vector<Tensor<float>> picked;
    for (std::size_t i = 0; i < fakes.dim(0); ++i) picked.push_back(pool.query(slice(fakes, i), rng));
    return stack(picked);
  }

  double update_discriminator(Net& d, nn::AdamState<float>& opt, const Tensor<float>& real,
                              const Tensor<float>& fake, double lr) {
    nn::Tape<float> t_real, t_fake;
    const auto s_real = d.forward(real, t_real);
    const auto s_fake = d.forward(fake, t_fake);
    const double loss = adv_loss_d(s_real, s_fake);
    require_finite(loss, "discriminator");
    auto grads = d.zero_grads();
    (void)d.backward(grad_sq(s_real, 1.0f, 1.0), t_real, grads);
    (void)d.backward(grad_sq(s_fake, 0.0f, 1.0), t_fake, grads);
    apply(d, grads, opt, lr);
    return loss;
  }

  ModelState& s_;
  const CycleGanConfig& c_;
  std::uint32_t epoch_;
  std::uint32_t step_;
};

}  // namespace

ModelState init_state(const CycleGanConfig& config) {
  config.validate();
  ModelState s;
  s.config = config;
  const auto gspec = generator_specs(config);
  const auto dspec = discriminator_specs(config);
  Rng r_g = seeded(config.seed, 0, kInitSalt), r_f = seeded(config.seed, 1, kInitSalt);
  Rng r_dx = seeded(config.seed, 2, kInitSalt), r_dy = seeded(config.seed, 3, kInitSalt);
  s.g = nn::build_network<float>(gspec, r_g, config.init_std);
  s.f = nn::build_network<float>(gspec, r_f, config.init_std);
  s.d_x = nn::build_network<float>(dspec, r_dx, config.init_std);
  s.d_y = nn::build_network<float>(dspec, r_dy, config.init_std);
  s.opt_g = adam_for(s.g, config);
  s.opt_f = adam_for(s.f, config);
  s.opt_d_x = adam_for(s.d_x, config);
  s.opt_d_y = adam_for(s.d_y, config);
  s.pool_x = ImagePool(config.pool_size);
  s.pool_y = ImagePool(config.pool_size);
  return s;
}

TrainMetrics train_epochs(ModelState& state, const std::vector<Image>& train_x,
                          const std::vector<Image>& train_y, std::uint32_t stop_epoch,
                          const EpochCallback& on_epoch) {
  const auto& c = state.config;
  c.validate();
  if (stop_epoch > c.epochs_total) {
    throw ArgumentError("stop epoch " + std::to_string(stop_epoch) + " beyond epochs_total " +
                        std::to_string(c.epochs_total));
  }
  TrainMetrics metrics;
  if (state.epoch >= stop_epoch) return metrics;
  check_images(train_x, c.image_size, "trainX");
  check_images(train_y, c.image_size, "trainY");

  std::vector<Tensor<float>> xs, ys;
  for (const auto& img : train_x) xs.push_back(to_tensor(img));
  for (const auto& img : train_y) ys.push_back(to_tensor(img));
  const std::size_t n = std::min(xs.size(), ys.size());

  for (; state.epoch < stop_epoch; ++state.epoch) {
    const auto started = std::chrono::steady_clock::now();
    Rng rng = seeded(c.seed, state.epoch, kEpochSalt);
    std::vector<std::size_t> order_x(xs.size()), order_y(ys.size());
    std::iota(order_x.begin(), order_x.end(), 0);
    std::iota(order_y.begin(), order_y.end(), 0);
    std::shuffle(order_x.begin(), order_x.end(), rng);
    std::shuffle(order_y.begin(), order_y.end(), rng);

    EpochMetrics m;
    m.epoch = state.epoch;
    m.lr = lr_at(c, state.epoch);
    std::uint32_t steps = 0;
    for (std::size_t begin = 0; begin < n; begin += c.batch_size, ++steps) {
      const std::size_t end = std::min(n, begin + c.batch_size);
      std::vector<Tensor<float>> bx, by;
      for (std::size_t i = begin; i < end; ++i) {
        bx.push_back(xs[order_x[i]]);
        by.push_back(ys[order_y[i]]);
      }
      Trainer(state, state.epoch, steps).step(stack(bx), stack(by), m.lr, rng, m);
    }
    for (double* v : {&m.adv_g, &m.adv_f, &m.loss_d_x, &m.loss_d_y, &m.cycle_x, &m.cycle_y}) {
      *v /= steps;
    }
    m.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    metrics.push_back(m);
    if (on_epoch) on_epoch(m);
  }
  return metrics;
}

TrainResult train(const CycleGanConfig& config, const std::vector<Image>& train_x,
                  const std::vector<Image>& train_y, const EpochCallback& on_epoch) {
  TrainResult r{init_state(config), {}};
  r.metrics = train_epochs(r.state, train_x, train_y, config.epochs_total, on_epoch);
  return r;
}

Tensor<float> to_tensor(const Image& img) {
  const std::size_t h = img.height(), w = img.width();
  Tensor<float> t({1, 3, h, w});
  for (std::size_t c = 0; c < 3; ++c) {
    for (std::size_t y = 0; y < h; ++y) {
      for (std::size_t x = 0; x < w; ++x) {
        t[(c * h + y) * w + x] = 2.0f * img.at(y, x, c) - 1.0f;
      }
    }
  }
  return t;
}

Image to_image(const Tensor<float>& t) {
  if (t.rank() != 4 || t.dim(0) != 1 || t.dim(1) != 3) {
    throw ShapeError("to_image expects [1, 3, H, W], got " + nn::shape_str(t.shape()));
  }
  const std::size_t h = t.dim(2), w = t.dim(3);
  Image img(static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(w));
  for (std::size_t c = 0; c < 3; ++c) {
    for (std::size_t y = 0; y < h; ++y) {
      for (std::size_t x = 0; x < w; ++x) {
        img.at(y, x, c) = std::clamp(0.5f * (t[(c * h + y) * w + x] + 1.0f), 0.0f, 1.0f);
      }
    }
  }
  return img;
}

Image translate(const ModelState& state, const Image& img, Direction direction) {
  const auto size = state.config.image_size;
  if (img.height() != size || img.width() != size) {
    throw ShapeError("translate expects a " + std::to_string(size) + "x" + std::to_string(size) +
                     " image, got " + std::to_string(img.height()) + "x" +
                     std::to_string(img.width()));
  }
  const Net& net = direction == Direction::kXtoY ? state.g : state.f;
  return to_image(net.infer(to_tensor(img)));
}

double evaluate(const ModelState& state, const std::vector<Image>& images, const Oracle& oracle,
                Direction direction) {
  if (images.empty()) throw ArgumentError("evaluate: empty test set");
  std::size_t ok = 0;
  for (const auto& img : images) ok += oracle(translate(state, img, direction)) ? 1 : 0;
  return static_cast<double>(ok) / static_cast<double>(images.size());
}

double held_out_cycle_loss(const ModelState& state, const std::vector<Image>& test_x,
                           const std::vector<Image>& test_y) {
  if (test_x.empty() || test_y.empty()) throw ArgumentError("held-out cycle loss: empty set");
  auto direction = [](const Net& a, const Net& b, const std::vector<Image>& imgs) {
    double acc = 0.0;
    for (const auto& img : imgs) {
      const auto t = to_tensor(img);
      acc += cycle_loss(t, b.infer(a.infer(t)));
    }
    return acc / static_cast<double>(imgs.size());
  };
  return 0.5 * (direction(state.g, state.f, test_x) + direction(state.f, state.g, test_y));
}

std::string metrics_csv(const TrainMetrics& metrics) {
  std::string out = "epoch,lr,adv_g,adv_f,loss_d_x,loss_d_y,cycle_x,cycle_y,seconds\n";
  char line[256];
  for (const auto& m : metrics) {
    std::snprintf(line, sizeof line, "%u,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.3f\n", m.epoch,
                  m.lr, m.adv_g, m.adv_f, m.loss_d_x, m.loss_d_y, m.cycle_x, m.cycle_y,
                  m.seconds);
    out += line;
  }
  return out;
}

}  // namespace floodsight::cyclegan
