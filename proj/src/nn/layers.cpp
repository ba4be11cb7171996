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

#include "floodsight/nn/layers.hpp"

#include <Eigen/Core>

#include <cmath>

namespace floodsight::nn {

namespace {

template <typename T>
using MatR = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using Map = Eigen::Map<MatR<T>>;
template <typename T>
using CMap = Eigen::Map<const MatR<T>>;

std::size_t reflect_index(std::ptrdiff_t i, std::size_t n) {
  if (i < 0) return static_cast<std::size_t>(-i);
  if (i >= static_cast<std::ptrdiff_t>(n)) return 2 * (n - 1) - static_cast<std::size_t>(i);
  return static_cast<std::size_t>(i);
}

void require_rank4(const Shape& in, std::size_t channels, const std::string& what) {
  if (in.size() != 4 || in[1] != channels) {
    throw ShapeError(what + " expects N x " + std::to_string(channels) + " x H x W input, got " +
                     shape_str(in));
  }
}

template <typename T>
Tensor<T> random_normal(Shape shape, double mean, double std, InitRng& rng) {
  Tensor<T> t(std::move(shape));
  std::normal_distribution<double> dist(mean, std);
  for (auto& v : t.data()) v = static_cast<T>(dist(rng));
  return t;
}

// Pads one C x H x W plane stack into C x (H+2p) x (W+2p).
template <typename T>
void pad_sample(const T* x, std::size_t c, std::size_t h, std::size_t w, std::size_t p,
                PadMode mode, T* out) {
  const std::size_t hp = h + 2 * p;
  const std::size_t wp = w + 2 * p;
  for (std::size_t ch = 0; ch < c; ++ch) {
    const T* src = x + ch * h * w;
    T* dst = out + ch * hp * wp;
    for (std::size_t y = 0; y < hp; ++y) {
      const auto sy = static_cast<std::ptrdiff_t>(y) - static_cast<std::ptrdiff_t>(p);
      for (std::size_t xx = 0; xx < wp; ++xx) {
        const auto sx = static_cast<std::ptrdiff_t>(xx) - static_cast<std::ptrdiff_t>(p);
        if (mode == PadMode::kZero) {
          const bool inside = sy >= 0 && sx >= 0 && sy < static_cast<std::ptrdiff_t>(h) &&
                              sx < static_cast<std::ptrdiff_t>(w);
          dst[y * wp + xx] = inside ? src[sy * static_cast<std::ptrdiff_t>(w) + sx] : T(0);
        } else {
          dst[y * wp + xx] = src[reflect_index(sy, h) * w + reflect_index(sx, w)];
        }
      }
    }
  }
}

// Adjoint of pad_sample: folds the padded gradient back onto the source grid.
template <typename T>
void unpad_sample_grad(const T* dpad, std::size_t c, std::size_t h, std::size_t w,
                       std::size_t p, PadMode mode, T* dx) {
  const std::size_t hp = h + 2 * p;
  const std::size_t wp = w + 2 * p;
  std::fill(dx, dx + c * h * w, T(0));
  for (std::size_t ch = 0; ch < c; ++ch) {
    const T* src = dpad + ch * hp * wp;
    T* dst = dx + ch * h * w;
    for (std::size_t y = 0; y < hp; ++y) {
      const auto sy = static_cast<std::ptrdiff_t>(y) - static_cast<std::ptrdiff_t>(p);
      for (std::size_t xx = 0; xx < wp; ++xx) {
        const auto sx = static_cast<std::ptrdiff_t>(xx) - static_cast<std::ptrdiff_t>(p);
        if (mode == PadMode::kZero) {
          if (sy >= 0 && sx >= 0 && sy < static_cast<std::ptrdiff_t>(h) &&
              sx < static_cast<std::ptrdiff_t>(w)) {
            dst[sy * static_cast<std::ptrdiff_t>(w) + sx] += src[y * wp + xx];
          }
        } else {
          dst[reflect_index(sy, h) * w + reflect_index(sx, w)] += src[y * wp + xx];
        }
      }
    }
  }
}

// cols is (C*k*k) x (ho*wo), gathered from a padded C x hp x wp sample.
template <typename T>
void im2col(const T* xp, std::size_t c, std::size_t hp, std::size_t wp, std::size_t k,
            std::size_t s, std::size_t ho, std::size_t wo, T* cols) {
  const std::size_t p = ho * wo;
  for (std::size_t ch = 0; ch < c; ++ch) {
    for (std::size_t ky = 0; ky < k; ++ky) {
      for (std::size_t kx = 0; kx < k; ++kx) {
        T* row = cols + ((ch * k + ky) * k + kx) * p;
        const T* plane = xp + ch * hp * wp;
        for (std::size_t oy = 0; oy < ho; ++oy) {
          const T* src = plane + (oy * s + ky) * wp + kx;
          for (std::size_t ox = 0; ox < wo; ++ox) row[oy * wo + ox] = src[ox * s];
        }
      }
    }
  }
}

template <typename T>
void col2im_add(const T* cols, std::size_t c, std::size_t hp, std::size_t wp, std::size_t k,
                std::size_t s, std::size_t ho, std::size_t wo, T* xp) {
  const std::size_t p = ho * wo;
  for (std::size_t ch = 0; ch < c; ++ch) {
    for (std::size_t ky = 0; ky < k; ++ky) {
      for (std::size_t kx = 0; kx < k; ++kx) {
        const T* row = cols + ((ch * k + ky) * k + kx) * p;
        T* plane = xp + ch * hp * wp;
        for (std::size_t oy = 0; oy < ho; ++oy) {
          T* dst = plane + (oy * s + ky) * wp + kx;
          for (std::size_t ox = 0; ox < wo; ++ox) dst[ox * s] += row[oy * wo + ox];
        }
      }
    }
  }
}

}  // namespace

// ---------------------------------------------------------------- Conv2d

template <typename T>
Conv2d<T>::Conv2d(const ConvSpec& spec, InitRng& rng, double init_std)
    : spec_(spec),
      pad_(spec.padding < 0 ? spec.kernel / 2 : static_cast<std::size_t>(spec.padding)) {
  if (spec.in_ch == 0 || spec.out_ch == 0 || spec.kernel == 0 || spec.stride == 0) {
    throw ArgumentError("conv: channels, kernel and stride must be positive");
  }
  if (spec.pad_mode == PadMode::kReflect && spec.kernel % 2 == 0) {
    throw ArgumentError("conv: reflect padding requires an odd kernel");
  }
  this->add_param("weight", random_normal<T>({spec.out_ch, spec.in_ch, spec.kernel, spec.kernel},
                                             0.0, init_std, rng));
  this->add_param("bias", Tensor<T>({spec.out_ch}));
}

template <typename T>
Shape Conv2d<T>::output_shape(const Shape& in) const {
  require_rank4(in, spec_.in_ch, "conv");
  if (spec_.pad_mode == PadMode::kReflect && (pad_ >= in[2] || pad_ >= in[3])) {
    throw ShapeError("conv: reflect padding " + std::to_string(pad_) +
                     " needs spatial size > padding, got " + shape_str(in));
  }
  const std::size_t hp = in[2] + 2 * pad_;
  const std::size_t wp = in[3] + 2 * pad_;
  if (hp < spec_.kernel || wp < spec_.kernel) {
    throw ShapeError("conv: input " + shape_str(in) + " smaller than kernel");
  }
  return {in[0], spec_.out_ch, (hp - spec_.kernel) / spec_.stride + 1,
          (wp - spec_.kernel) / spec_.stride + 1};
}

template <typename T>
Tensor<T> Conv2d<T>::forward(const Tensor<T>& x, Tape<T>& tape) const {
  const Shape out_shape = output_shape(x.shape());
  const std::size_t n = x.dim(0), c = spec_.in_ch, h = x.dim(2), w = x.dim(3);
  const std::size_t hp = h + 2 * pad_, wp = w + 2 * pad_;
  const std::size_t ho = out_shape[2], wo = out_shape[3];
  const std::size_t kk = c * spec_.kernel * spec_.kernel, pp = ho * wo;

  tape.input_shape = x.shape();
  tape.saved.assign(1, Tensor<T>({n, kk, pp}));
  Tensor<T>& cols = tape.saved[0];
  Tensor<T> out(out_shape);
  std::vector<T> padded(c * hp * wp);
  CMap<T> weight(this->param(0).data().data(), spec_.out_ch, kk);
  Eigen::Map<const Eigen::Matrix<T, Eigen::Dynamic, 1>> bias(this->param(1).data().data(),
                                                             spec_.out_ch);
  for (std::size_t s = 0; s < n; ++s) {
    pad_sample(x.data().data() + s * c * h * w, c, h, w, pad_, spec_.pad_mode, padded.data());
    T* col = cols.data().data() + s * kk * pp;
    im2col(padded.data(), c, hp, wp, spec_.kernel, spec_.stride, ho, wo, col);
    Map<T> y(out.data().data() + s * spec_.out_ch * pp, spec_.out_ch, pp);
    y.noalias() = weight * CMap<T>(col, kk, pp);
    y.colwise() += bias;
  }
  return out;
}

template <typename T>
Tensor<T> Conv2d<T>::backward(const Tensor<T>& dy, const Tape<T>& tape,
                              std::span<Tensor<T>> grads) const {
  const Shape& in = tape.input_shape;
  const std::size_t n = in[0], c = spec_.in_ch, h = in[2], w = in[3];
  const std::size_t hp = h + 2 * pad_, wp = w + 2 * pad_;
  const std::size_t ho = dy.dim(2), wo = dy.dim(3);
  const std::size_t kk = c * spec_.kernel * spec_.kernel, pp = ho * wo;
  const Tensor<T>& cols = tape.saved[0];

  Map<T> dweight(grads[0].data().data(), spec_.out_ch, kk);
  T* dbias = grads[1].data().data();
  CMap<T> weight(this->param(0).data().data(), spec_.out_ch, kk);
  Tensor<T> dx(in);
  MatR<T> dcols(kk, pp);
  std::vector<T> dpadded(c * hp * wp);
  for (std::size_t s = 0; s < n; ++s) {
    CMap<T> g(dy.data().data() + s * spec_.out_ch * pp, spec_.out_ch, pp);
    CMap<T> col(cols.data().data() + s * kk * pp, kk, pp);
    dweight.noalias() += g * col.transpose();
    // Fixed-order sum.
    for (std::size_t o = 0; o < spec_.out_ch; ++o) {
      const T* row = dy.data().data() + (s * spec_.out_ch + o) * pp;
      T acc = 0;
      for (std::size_t i = 0; i < pp; ++i) acc += row[i];
      dbias[o] += acc;
    }
    dcols.noalias() = weight.transpose() * g;
    std::fill(dpadded.begin(), dpadded.end(), T(0));
    col2im_add(dcols.data(), c, hp, wp, spec_.kernel, spec_.stride, ho, wo, dpadded.data());
    unpad_sample_grad(dpadded.data(), c, h, w, pad_, spec_.pad_mode,
                      dx.data().data() + s * c * h * w);
  }
  return dx;
}

// ------------------------------------------------------- ConvTranspose2d

template <typename T>
ConvTranspose2d<T>::ConvTranspose2d(const ConvTransposeSpec& spec, InitRng& rng,
                                    double init_std)
    : spec_(spec) {
  if (spec.in_ch == 0 || spec.out_ch == 0 || spec.kernel == 0 || spec.stride == 0) {
    throw ArgumentError("conv_transpose: channels, kernel and stride must be positive");
  }
  if (spec.output_padding >= spec.stride) {
    throw ArgumentError("conv_transpose: output_padding must be smaller than stride");
  }
  this->add_param("weight", random_normal<T>({spec.in_ch, spec.out_ch, spec.kernel, spec.kernel},
                                             0.0, init_std, rng));
  this->add_param("bias", Tensor<T>({spec.out_ch}));
}

template <typename T>
Shape ConvTranspose2d<T>::output_shape(const Shape& in) const {
  require_rank4(in, spec_.in_ch, "conv_transpose");
  const auto extent = [this](std::size_t n) -> std::size_t {
    const std::size_t full = (n - 1) * spec_.stride + spec_.kernel + spec_.output_padding;
    if (full <= 2 * spec_.padding) throw ShapeError("conv_transpose: empty output");
    return full - 2 * spec_.padding;
  };
  return {in[0], spec_.out_ch, extent(in[2]), extent(in[3])};
}

template <typename T>
Tensor<T> ConvTranspose2d<T>::forward(const Tensor<T>& x, Tape<T>& tape) const {
  const Shape out_shape = output_shape(x.shape());
  const std::size_t n = x.dim(0), c = spec_.in_ch, h = x.dim(2), w = x.dim(3);
  const std::size_t o = spec_.out_ch, k = spec_.kernel, st = spec_.stride;
  const auto pad = static_cast<std::ptrdiff_t>(spec_.padding);
  const std::size_t ho = out_shape[2], wo = out_shape[3];
  const std::size_t okk = o * k * k, hw = h * w;

  tape.input_shape = x.shape();
  tape.saved.assign(1, x);
  Tensor<T> out(out_shape);
  CMap<T> weight(this->param(0).data().data(), c, okk);
  const T* bias = this->param(1).data().data();
  MatR<T> cols(okk, hw);
  for (std::size_t s = 0; s < n; ++s) {
    cols.noalias() = weight.transpose() * CMap<T>(x.data().data() + s * c * hw, c, hw);
    T* y = out.data().data() + s * o * ho * wo;
    for (std::size_t oc = 0; oc < o; ++oc) {
      std::fill(y + oc * ho * wo, y + (oc + 1) * ho * wo, bias[oc]);
      for (std::size_t ky = 0; ky < k; ++ky) {
        for (std::size_t kx = 0; kx < k; ++kx) {
          const T* row = cols.data() + ((oc * k + ky) * k + kx) * hw;
          for (std::size_t iy = 0; iy < h; ++iy) {
            const auto oy = static_cast<std::ptrdiff_t>(iy * st + ky) - pad;
            if (oy < 0 || oy >= static_cast<std::ptrdiff_t>(ho)) continue;
            for (std::size_t ix = 0; ix < w; ++ix) {
              const auto ox = static_cast<std::ptrdiff_t>(ix * st + kx) - pad;
              if (ox < 0 || ox >= static_cast<std::ptrdiff_t>(wo)) continue;
              y[(oc * ho + oy) * wo + ox] += row[iy * w + ix];
            }
          }
        }
      }
    }
  }
  return out;
}

template <typename T>
Tensor<T> ConvTranspose2d<T>::backward(const Tensor<T>& dy, const Tape<T>& tape,
                                       std::span<Tensor<T>> grads) const {
  const Tensor<T>& x = tape.saved[0];
  const std::size_t n = x.dim(0), c = spec_.in_ch, h = x.dim(2), w = x.dim(3);
  const std::size_t o = spec_.out_ch, k = spec_.kernel, st = spec_.stride;
  const auto pad = static_cast<std::ptrdiff_t>(spec_.padding);
  const std::size_t ho = dy.dim(2), wo = dy.dim(3);
  const std::size_t okk = o * k * k, hw = h * w;

  Map<T> dweight(grads[0].data().data(), c, okk);
  T* dbias = grads[1].data().data();
  CMap<T> weight(this->param(0).data().data(), c, okk);
  Tensor<T> dx(x.shape());
  MatR<T> dcols(okk, hw);
  for (std::size_t s = 0; s < n; ++s) {
    const T* g = dy.data().data() + s * o * ho * wo;
    dcols.setZero();
    for (std::size_t oc = 0; oc < o; ++oc) {
      T bsum = 0;
      for (std::size_t i = 0; i < ho * wo; ++i) bsum += g[oc * ho * wo + i];
      dbias[oc] += bsum;
      for (std::size_t ky = 0; ky < k; ++ky) {
        for (std::size_t kx = 0; kx < k; ++kx) {
          T* row = dcols.data() + ((oc * k + ky) * k + kx) * hw;
          for (std::size_t iy = 0; iy < h; ++iy) {
            const auto oy = static_cast<std::ptrdiff_t>(iy * st + ky) - pad;
            if (oy < 0 || oy >= static_cast<std::ptrdiff_t>(ho)) continue;
            for (std::size_t ix = 0; ix < w; ++ix) {
              const auto ox = static_cast<std::ptrdiff_t>(ix * st + kx) - pad;
              if (ox < 0 || ox >= static_cast<std::ptrdiff_t>(wo)) continue;
              row[iy * w + ix] = g[(oc * ho + oy) * wo + ox];
            }
          }
        }
      }
    }
    CMap<T> xs(x.data().data() + s * c * hw, c, hw);
    dweight.noalias() += xs * dcols.transpose();
    Map<T>(dx.data().data() + s * c * hw, c, hw).noalias() = weight * dcols;
  }
  return dx;
}

// ----------------------------------------------------------- InstanceNorm

template <typename T>
InstanceNorm<T>::InstanceNorm(const InstanceNormSpec& spec, InitRng& rng, double init_std)
    : spec_(spec) {
  if (spec.ch == 0 || !(spec.eps > 0.0)) {
    throw ArgumentError("instance_norm: channels and eps must be positive");
  }
  this->add_param("weight", random_normal<T>({spec.ch}, 1.0, init_std, rng));
  this->add_param("bias", Tensor<T>({spec.ch}));
}

template <typename T>
Shape InstanceNorm<T>::output_shape(const Shape& in) const {
  require_rank4(in, spec_.ch, "instance_norm");
  return in;
}

template <typename T>
Tensor<T> InstanceNorm<T>::forward(const Tensor<T>& x, Tape<T>& tape) const {
  output_shape(x.shape());
  const std::size_t n = x.dim(0), c = spec_.ch, m = x.dim(2) * x.dim(3);
  tape.input_shape = x.shape();
  tape.saved.assign(2, Tensor<T>());
  Tensor<T> xhat(x.shape());
  Tensor<T> inv_std({n, c});
  Tensor<T> out(x.shape());
  const T* gamma = this->param(0).data().data();
  const T* beta = this->param(1).data().data();
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t ch = 0; ch < c; ++ch) {
      const std::size_t base = (s * c + ch) * m;
      const T* src = x.data().data() + base;
      double mean = 0.0;
      for (std::size_t i = 0; i < m; ++i) mean += src[i];
      mean /= static_cast<double>(m);
      double var = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        const double d = src[i] - mean;
        var += d * d;
      }
      var /= static_cast<double>(m);
      const double inv = 1.0 / std::sqrt(var + spec_.eps);
      inv_std[s * c + ch] = static_cast<T>(inv);
      for (std::size_t i = 0; i < m; ++i) {
        const T xh = static_cast<T>((src[i] - mean) * inv);
        xhat[base + i] = xh;
        out[base + i] = gamma[ch] * xh + beta[ch];
      }
    }
  }
  tape.saved[0] = std::move(xhat);
  tape.saved[1] = std::move(inv_std);
  return out;
}

template <typename T>
Tensor<T> InstanceNorm<T>::backward(const Tensor<T>& dy, const Tape<T>& tape,
                                    std::span<Tensor<T>> grads) const {
  const Tensor<T>& xhat = tape.saved[0];
  const Tensor<T>& inv_std = tape.saved[1];
  const std::size_t n = xhat.dim(0), c = spec_.ch, m = xhat.dim(2) * xhat.dim(3);
  const T* gamma = this->param(0).data().data();
  T* dgamma = grads[0].data().data();
  T* dbeta = grads[1].data().data();
  Tensor<T> dx(xhat.shape());
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t ch = 0; ch < c; ++ch) {
      const std::size_t base = (s * c + ch) * m;
      double sum_dy = 0.0, sum_dy_xhat = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        sum_dy += dy[base + i];
        sum_dy_xhat += static_cast<double>(dy[base + i]) * xhat[base + i];
      }
      dgamma[ch] += static_cast<T>(sum_dy_xhat);
      dbeta[ch] += static_cast<T>(sum_dy);
      // dxhat = gamma * dy, so its sums are gamma times the sums above.
      const double g = gamma[ch];
      const double scale = inv_std[s * c + ch] / static_cast<double>(m);
      for (std::size_t i = 0; i < m; ++i) {
        const double dxhat = g * dy[base + i];
        dx[base + i] = static_cast<T>(
            scale * (m * dxhat - g * sum_dy - xhat[base + i] * g * sum_dy_xhat));
      }
    }
  }
  return dx;
}

// ------------------------------------------------------------- Activation

template <typename T>
std::string Activation<T>::kind() const {
  switch (spec_.kind) {
    case ActivationKind::kRelu: return "relu";
    case ActivationKind::kLeakyRelu: return "leaky_relu";
    case ActivationKind::kTanh: return "tanh";
  }
  return "activation";
}

template <typename T>
Tensor<T> Activation<T>::forward(const Tensor<T>& x, Tape<T>& tape) const {
  tape.input_shape = x.shape();
  Tensor<T> out(x.shape());
  const auto slope = static_cast<T>(spec_.negative_slope);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const T v = x[i];
    switch (spec_.kind) {
      case ActivationKind::kRelu: out[i] = v > T(0) ? v : T(0); break;
      case ActivationKind::kLeakyRelu: out[i] = v > T(0) ? v : slope * v; break;
      case ActivationKind::kTanh: out[i] = std::tanh(v); break;
    }
  }
  tape.saved.assign(1, spec_.kind == ActivationKind::kTanh ? out : x);
  return out;
}

template <typename T>
bool Activation<T>::same_linear_region(const Tape<T>& a, const Tape<T>& b) const {
  if (spec_.kind == ActivationKind::kTanh) return true;
  const Tensor<T>& xa = a.saved.at(0);
  const Tensor<T>& xb = b.saved.at(0);
  if (xa.shape() != xb.shape()) return false;
  for (std::size_t i = 0; i < xa.size(); ++i) {
    if ((xa[i] > T(0)) != (xb[i] > T(0))) return false;
  }
  return true;
}

template <typename T>
Tensor<T> Activation<T>::backward(const Tensor<T>& dy, const Tape<T>& tape,
                                  std::span<Tensor<T>>) const {
  const Tensor<T>& saved = tape.saved[0];
  if (dy.shape() != saved.shape()) {
    throw ShapeError("activation: gradient shape " + shape_str(dy.shape()) +
                     " does not match " + shape_str(saved.shape()));
  }
  Tensor<T> dx(dy.shape());
  const auto slope = static_cast<T>(spec_.negative_slope);
  for (std::size_t i = 0; i < dy.size(); ++i) {
    const T v = saved[i];
    switch (spec_.kind) {
      case ActivationKind::kRelu: dx[i] = v > T(0) ? dy[i] : T(0); break;
      case ActivationKind::kLeakyRelu: dx[i] = v > T(0) ? dy[i] : slope * dy[i]; break;
      case ActivationKind::kTanh: dx[i] = dy[i] * (T(1) - v * v); break;
    }
  }
  return dx;
}

// ------------------------------------------------------------- Sequential

template <typename T>
Sequential<T>::Sequential(const Sequential& other) {
  for (const auto& l : other.layers_) layers_.push_back(l->clone());
}

template <typename T>
Sequential<T>& Sequential<T>::operator=(const Sequential& other) {
  if (this != &other) {
    Sequential copy(other);
    *this = std::move(copy);
  }
  return *this;
}

template <typename T>
Shape Sequential<T>::output_shape(const Shape& in) const {
  Shape cur = in;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    try {
      cur = layers_[i]->output_shape(cur);
    } catch (const ShapeError& e) {
      throw ShapeError("layer " + std::to_string(i) + " (" + layers_[i]->kind() +
                       "): " + e.what());
    }
  }
  return cur;
}

template <typename T>
Tensor<T> Sequential<T>::forward(const Tensor<T>& x, Tape<T>& tape) const {
  output_shape(x.shape());
  tape.input_shape = x.shape();
  tape.saved.clear();
  tape.children.assign(layers_.size(), Tape<T>{});
  Tensor<T> cur = x;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    cur = layers_[i]->forward(cur, tape.children[i]);
  }
  return cur;
}

template <typename T>
bool Sequential<T>::same_linear_region(const Tape<T>& a, const Tape<T>& b) const {
  if (a.children.size() != layers_.size() || b.children.size() != layers_.size()) return false;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    if (!layers_[i]->same_linear_region(a.children[i], b.children[i])) return false;
  }
  return true;
}

template <typename T>
Tensor<T> Sequential<T>::backward(const Tensor<T>& dy, const Tape<T>& tape,
                                  std::span<Tensor<T>> grads) const {
  if (tape.children.size() != layers_.size()) {
    throw ShapeError("backward: tape was not recorded by this network");
  }
  if (grads.size() != parameter_tensor_count()) {
    throw ShapeError("backward: expected " + std::to_string(parameter_tensor_count()) +
                     " gradient buffers, got " + std::to_string(grads.size()));
  }
  if (!layers_.empty() && dy.shape() != output_shape(tape.input_shape)) {
    throw ShapeError("backward: output gradient shape " + shape_str(dy.shape()) +
                     " does not match the recorded output " +
                     shape_str(output_shape(tape.input_shape)));
  }
  std::vector<std::size_t> offsets(layers_.size() + 1, 0);
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    offsets[i + 1] = offsets[i] + layers_[i]->parameter_tensor_count();
  }
  Tensor<T> cur = dy;
  for (std::size_t i = layers_.size(); i-- > 0;) {
    cur = layers_[i]->backward(cur, tape.children[i],
                               grads.subspan(offsets[i], offsets[i + 1] - offsets[i]));
  }
  return cur;
}

template <typename T>
void Sequential<T>::visit_parameters(const std::string& prefix, const ParamVisitor& fn) {
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    layers_[i]->visit_parameters(prefix + std::to_string(i) + ".", fn);
  }
}

template <typename T>
std::size_t Sequential<T>::parameter_tensor_count() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += l->parameter_tensor_count();
  return n;
}

template <typename T>
Tensor<T> Sequential<T>::infer(const Tensor<T>& x) const {
  Tape<T> tape;
  return forward(x, tape);
}

template <typename T>
std::vector<ParamRef<T>> Sequential<T>::parameters(const std::string& prefix) {
  std::vector<ParamRef<T>> out;
  visit_parameters(prefix, [&out](const std::string& name, Tensor<T>& t) {
    out.push_back({name, &t});
  });
  return out;
}

template <typename T>
std::vector<ConstParamRef<T>> Sequential<T>::parameters(const std::string& prefix) const {
  std::vector<ConstParamRef<T>> out;
  // Visiting does not mutate; the visitor only records addresses.
  const_cast<Sequential*>(this)->visit_parameters(
      prefix, [&out](const std::string& name, Tensor<T>& t) { out.push_back({name, &t}); });
  return out;
}

template <typename T>
std::vector<Tensor<T>> Sequential<T>::zero_grads() const {
  std::vector<Tensor<T>> out;
  for (const auto& p : parameters()) out.emplace_back(p.tensor->shape());
  return out;
}

template <typename T>
std::size_t Sequential<T>::parameter_count() const {
  std::size_t n = 0;
  for (const auto& p : parameters()) n += p.tensor->size();
  return n;
}

// ---------------------------------------------------------- ResidualBlock

template <typename T>
ResidualBlock<T>::ResidualBlock(const ResidualBlockSpec& spec, InitRng& rng, double init_std) {
  if (spec.ch == 0) throw ArgumentError("residual_block: channels must be positive");
  const ConvSpec conv{spec.ch, spec.ch, 3, 1, PadMode::kReflect, 1};
  body_.add(std::make_unique<Conv2d<T>>(conv, rng, init_std));
  body_.add(std::make_unique<InstanceNorm<T>>(InstanceNormSpec{spec.ch}, rng, init_std));
  body_.add(std::make_unique<Activation<T>>(ActivationSpec{ActivationKind::kRelu}));
  body_.add(std::make_unique<Conv2d<T>>(conv, rng, init_std));
  body_.add(std::make_unique<InstanceNorm<T>>(InstanceNormSpec{spec.ch}, rng, init_std));
}

template <typename T>
Shape ResidualBlock<T>::output_shape(const Shape& in) const {
  Shape out = body_.output_shape(in);
  if (out != in) throw ShapeError("residual_block: body changes shape " + shape_str(in));
  return out;
}

template <typename T>
Tensor<T> ResidualBlock<T>::forward(const Tensor<T>& x, Tape<T>& tape) const {
  tape.input_shape = x.shape();
  tape.children.assign(1, Tape<T>{});
  Tensor<T> out = body_.forward(x, tape.children[0]);
  out += x;
  return out;
}

template <typename T>
Tensor<T> ResidualBlock<T>::backward(const Tensor<T>& dy, const Tape<T>& tape,
                                     std::span<Tensor<T>> grads) const {
  Tensor<T> dx = body_.backward(dy, tape.children[0], grads);
  dx += dy;
  return dx;
}

// -------------------------------------------------------------- factories

template <typename T>
std::unique_ptr<Layer<T>> make_layer(const LayerSpec& spec, InitRng& rng, double init_std) {
  return std::visit(
      [&](const auto& s) -> std::unique_ptr<Layer<T>> {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, ConvSpec>) {
          return std::make_unique<Conv2d<T>>(s, rng, init_std);
        } else if constexpr (std::is_same_v<S, ConvTransposeSpec>) {
          return std::make_unique<ConvTranspose2d<T>>(s, rng, init_std);
        } else if constexpr (std::is_same_v<S, InstanceNormSpec>) {
          return std::make_unique<InstanceNorm<T>>(s, rng, init_std);
        } else if constexpr (std::is_same_v<S, ActivationSpec>) {
          return std::make_unique<Activation<T>>(s);
        } else {
          return std::make_unique<ResidualBlock<T>>(s, rng, init_std);
        }
      },
      spec);
}

template <typename T>
Sequential<T> build_network(std::span<const LayerSpec> specs, InitRng& rng, double init_std) {
  Sequential<T> net;
  for (const auto& s : specs) net.add(make_layer<T>(s, rng, init_std));
  return net;
}

#define FLOODSIGHT_INSTANTIATE(T)                                                       \
  template class Conv2d<T>;                                                             \
  template class ConvTranspose2d<T>;                                                    \
  template class InstanceNorm<T>;                                                       \
  template class Activation<T>;                                                         \
  template class Sequential<T>;                                                         \
  template class ResidualBlock<T>;                                                      \
  template std::unique_ptr<Layer<T>> make_layer<T>(const LayerSpec&, InitRng&, double); \
  template Sequential<T> build_network<T>(std::span<const LayerSpec>, InitRng&, double);

FLOODSIGHT_INSTANTIATE(float)
FLOODSIGHT_INSTANTIATE(double)

#undef FLOODSIGHT_INSTANTIATE

}  // namespace floodsight::nn
