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
 * @brief Layer vocabulary for the image-translation networks and a
 * layer-granular reverse-mode engine.
 *
 * Every layer's forward() records what its backward() needs into a Tape; a
 * Sequential owns one child tape per layer, so a whole network forward pass
 * yields a tape that replays the backward pass exactly. Backward passes
 * accumulate (+=) into the gradient buffers, which lets one network appear
 * several times in a larger computation.
 */

#ifndef FLOODSIGHT_NN_LAYERS_HPP
#define FLOODSIGHT_NN_LAYERS_HPP

#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "floodsight/nn/tensor.hpp"

namespace floodsight::nn {

template <typename T>
struct Tape {
  Shape input_shape;
  std::vector<Tensor<T>> saved;
  std::vector<Tape> children;
};

template <typename T>
struct ParamRef {
  std::string name;
  Tensor<T>* tensor;
};

template <typename T>
struct ConstParamRef {
  std::string name;
  const Tensor<T>* tensor;
};

enum class PadMode { kReflect, kZero };

struct ConvSpec {
  std::size_t in_ch;
  std::size_t out_ch;
  std::size_t kernel;
  std::size_t stride = 1;
  PadMode pad_mode = PadMode::kReflect;
  int padding = -1;  // -1: kernel / 2
};

struct ConvTransposeSpec {
  std::size_t in_ch;
  std::size_t out_ch;
  std::size_t kernel = 3;
  std::size_t stride = 2;
  std::size_t padding = 1;
  std::size_t output_padding = 1;
};

struct InstanceNormSpec {
  std::size_t ch;
  double eps = 1e-5;
};

enum class ActivationKind { kRelu, kLeakyRelu, kTanh };

struct ActivationSpec {
  ActivationKind kind;
  double negative_slope = 0.2;
};

/// x + [conv3 -> IN -> relu -> conv3 -> IN](x), reflect padded.
struct ResidualBlockSpec {
  std::size_t ch;
};

using LayerSpec =
    std::variant<ConvSpec, ConvTransposeSpec, InstanceNormSpec, ActivationSpec, ResidualBlockSpec>;

using InitRng = std::mt19937_64;

template <typename T>
class Layer {
 public:
  using ParamVisitor = std::function<void(const std::string&, Tensor<T>&)>;

  virtual ~Layer() = default;

  [[nodiscard]] virtual std::string kind() const = 0;
  /// Throws ShapeError when the input shape is not accepted.
  [[nodiscard]] virtual Shape output_shape(const Shape& in) const = 0;
  virtual Tensor<T> forward(const Tensor<T>& x, Tape<T>& tape) const = 0;
  /// Returns dL/dx and accumulates parameter gradients into grads, which is
  /// ordered like the visit order of visit_parameters().
  virtual Tensor<T> backward(const Tensor<T>& dy, const Tape<T>& tape,
                             std::span<Tensor<T>> grads) const = 0;
  virtual void visit_parameters(const std::string& prefix, const ParamVisitor& fn) = 0;
  [[nodiscard]] virtual std::size_t parameter_tensor_count() const = 0;
  [[nodiscard]] virtual std::unique_ptr<Layer> clone() const = 0;
  /// True when two tapes of this layer took the same branch at every
  /// piecewise-linear nonlinearity, i.e. the layer is smooth between them.
  [[nodiscard]] virtual bool same_linear_region(const Tape<T>&, const Tape<T>&) const {
    return true;
  }
};

/// Base for layers that own a flat list of named parameter tensors.
template <typename T>
class ParamLayer : public Layer<T> {
 public:
  using typename Layer<T>::ParamVisitor;
  void visit_parameters(const std::string& prefix, const ParamVisitor& fn) override {
    for (std::size_t i = 0; i < params_.size(); ++i) fn(prefix + names_[i], params_[i]);
  }
  [[nodiscard]] std::size_t parameter_tensor_count() const override { return params_.size(); }

  [[nodiscard]] Tensor<T>& param(std::size_t i) { return params_[i]; }
  [[nodiscard]] const Tensor<T>& param(std::size_t i) const { return params_[i]; }

 protected:
  void add_param(std::string name, Tensor<T> t) {
    names_.push_back(std::move(name));
    params_.push_back(std::move(t));
  }

 private:
  std::vector<std::string> names_;
  std::vector<Tensor<T>> params_;
};

template <typename T>
class Conv2d : public ParamLayer<T> {
 public:
  Conv2d(const ConvSpec& spec, InitRng& rng, double init_std);
  [[nodiscard]] std::string kind() const override { return "conv"; }
  [[nodiscard]] Shape output_shape(const Shape& in) const override;
  Tensor<T> forward(const Tensor<T>& x, Tape<T>& tape) const override;
  Tensor<T> backward(const Tensor<T>& dy, const Tape<T>& tape,
                     std::span<Tensor<T>> grads) const override;
  [[nodiscard]] std::unique_ptr<Layer<T>> clone() const override {
    return std::make_unique<Conv2d>(*this);
  }
  [[nodiscard]] const ConvSpec& spec() const noexcept { return spec_; }
  [[nodiscard]] std::size_t padding() const noexcept { return pad_; }

 private:
  ConvSpec spec_;
  std::size_t pad_;
};

template <typename T>
class ConvTranspose2d : public ParamLayer<T> {
 public:
  ConvTranspose2d(const ConvTransposeSpec& spec, InitRng& rng, double init_std);
  [[nodiscard]] std::string kind() const override { return "conv_transpose"; }
  [[nodiscard]] Shape output_shape(const Shape& in) const override;
  Tensor<T> forward(const Tensor<T>& x, Tape<T>& tape) const override;
  Tensor<T> backward(const Tensor<T>& dy, const Tape<T>& tape,
                     std::span<Tensor<T>> grads) const override;
  [[nodiscard]] std::unique_ptr<Layer<T>> clone() const override {
    return std::make_unique<ConvTranspose2d>(*this);
  }

 private:
  ConvTransposeSpec spec_;
};

template <typename T>
class InstanceNorm : public ParamLayer<T> {
 public:
  InstanceNorm(const InstanceNormSpec& spec, InitRng& rng, double init_std);
  [[nodiscard]] std::string kind() const override { return "instance_norm"; }
  [[nodiscard]] Shape output_shape(const Shape& in) const override;
  Tensor<T> forward(const Tensor<T>& x, Tape<T>& tape) const override;
  Tensor<T> backward(const Tensor<T>& dy, const Tape<T>& tape,
                     std::span<Tensor<T>> grads) const override;
  [[nodiscard]] std::unique_ptr<Layer<T>> clone() const override {
    return std::make_unique<InstanceNorm>(*this);
  }

 private:
  InstanceNormSpec spec_;
};

template <typename T>
class Activation : public Layer<T> {
 public:
  using typename Layer<T>::ParamVisitor;
  explicit Activation(const ActivationSpec& spec) : spec_(spec) {}
  [[nodiscard]] std::string kind() const override;
  [[nodiscard]] Shape output_shape(const Shape& in) const override { return in; }
  Tensor<T> forward(const Tensor<T>& x, Tape<T>& tape) const override;
  Tensor<T> backward(const Tensor<T>& dy, const Tape<T>& tape,
                     std::span<Tensor<T>> grads) const override;
  void visit_parameters(const std::string&, const ParamVisitor&) override {}
  [[nodiscard]] std::size_t parameter_tensor_count() const override { return 0; }
  [[nodiscard]] std::unique_ptr<Layer<T>> clone() const override {
    return std::make_unique<Activation>(*this);
  }
  [[nodiscard]] bool same_linear_region(const Tape<T>& a, const Tape<T>& b) const override;

 private:
  ActivationSpec spec_;
};

template <typename T>
class Sequential : public Layer<T> {
 public:
  using typename Layer<T>::ParamVisitor;

  Sequential() = default;
  Sequential(const Sequential& other);
  Sequential& operator=(const Sequential& other);
  Sequential(Sequential&&) noexcept = default;
  Sequential& operator=(Sequential&&) noexcept = default;

  void add(std::unique_ptr<Layer<T>> layer) { layers_.push_back(std::move(layer)); }
  [[nodiscard]] std::size_t size() const noexcept { return layers_.size(); }
  [[nodiscard]] Layer<T>& layer(std::size_t i) { return *layers_.at(i); }
  [[nodiscard]] const Layer<T>& layer(std::size_t i) const { return *layers_.at(i); }

  [[nodiscard]] std::string kind() const override { return "sequential"; }
  /// ShapeError messages name the index of the rejecting layer.
  [[nodiscard]] Shape output_shape(const Shape& in) const override;
  Tensor<T> forward(const Tensor<T>& x, Tape<T>& tape) const override;
  Tensor<T> backward(const Tensor<T>& dy, const Tape<T>& tape,
                     std::span<Tensor<T>> grads) const override;
  void visit_parameters(const std::string& prefix, const ParamVisitor& fn) override;
  [[nodiscard]] std::size_t parameter_tensor_count() const override;
  [[nodiscard]] std::unique_ptr<Layer<T>> clone() const override {
    return std::make_unique<Sequential>(*this);
  }
  [[nodiscard]] bool same_linear_region(const Tape<T>& a, const Tape<T>& b) const override;

  /// Forward pass without keeping the tape.
  [[nodiscard]] Tensor<T> infer(const Tensor<T>& x) const;

  [[nodiscard]] std::vector<ParamRef<T>> parameters(const std::string& prefix = "");
  [[nodiscard]] std::vector<ConstParamRef<T>> parameters(const std::string& prefix = "") const;
  /// Zero-filled buffers matching parameters().
  [[nodiscard]] std::vector<Tensor<T>> zero_grads() const;
  [[nodiscard]] std::size_t parameter_count() const;

 private:
  std::vector<std::unique_ptr<Layer<T>>> layers_;
};

template <typename T>
class ResidualBlock : public Layer<T> {
 public:
  using typename Layer<T>::ParamVisitor;
  ResidualBlock(const ResidualBlockSpec& spec, InitRng& rng, double init_std);
  [[nodiscard]] std::string kind() const override { return "residual_block"; }
  [[nodiscard]] Shape output_shape(const Shape& in) const override;
  Tensor<T> forward(const Tensor<T>& x, Tape<T>& tape) const override;
  Tensor<T> backward(const Tensor<T>& dy, const Tape<T>& tape,
                     std::span<Tensor<T>> grads) const override;
  void visit_parameters(const std::string& prefix, const ParamVisitor& fn) override {
    body_.visit_parameters(prefix + "body.", fn);
  }
  [[nodiscard]] std::size_t parameter_tensor_count() const override {
    return body_.parameter_tensor_count();
  }
  [[nodiscard]] std::unique_ptr<Layer<T>> clone() const override {
    return std::make_unique<ResidualBlock>(*this);
  }
  [[nodiscard]] bool same_linear_region(const Tape<T>& a, const Tape<T>& b) const override {
    return body_.same_linear_region(a.children.at(0), b.children.at(0));
  }

 private:
  Sequential<T> body_;
};

inline constexpr double kDefaultInitStd = 0.02;

/// Weights ~ N(0, init_std), norm scales ~ N(1, init_std), biases 0.
template <typename T>
[[nodiscard]] std::unique_ptr<Layer<T>> make_layer(const LayerSpec& spec, InitRng& rng,
                                                   double init_std = kDefaultInitStd);

template <typename T>
[[nodiscard]] Sequential<T> build_network(std::span<const LayerSpec> specs, InitRng& rng,
                                          double init_std = kDefaultInitStd);

}  // namespace floodsight::nn

#endif  // FLOODSIGHT_NN_LAYERS_HPP
