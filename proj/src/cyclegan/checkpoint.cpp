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

#include <bit>
#include <cmath>
#include <map>
#include <string>

#include "common/byte_io.hpp"
#include "floodsight/cyclegan.hpp"
#include "floodsight/error.hpp"

namespace floodsight::cyclegan {

namespace {

constexpr char kMagic[4] = {'C', 'G', 'K', '1'};
constexpr std::size_t kMaxRank = 8;

// f32 payloads cannot hold u64 values exactly, so they are split into four
// 16-bit chunks, each an exactly representable float.
void put_u64(std::vector<float>& out, std::uint64_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<float>((v >> (16 * i)) & 0xffff));
}

std::uint64_t get_u64(const Tensor<float>& t, std::size_t slot) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < 4; ++i) {
    const float chunk = t[slot * 4 + i];
    if (!(chunk >= 0.0f && chunk <= 65535.0f) || chunk != std::floor(chunk)) {
      throw DecodeError(DecodeFailure::kMalformed, "checkpoint: corrupt integer chunk");
    }
    v |= static_cast<std::uint64_t>(chunk) << (16 * i);
  }
  return v;
}

Tensor<float> packed(std::initializer_list<std::uint64_t> values) {
  std::vector<float> data;
  for (auto v : values) put_u64(data, v);
  return Tensor<float>({values.size(), 4}, std::move(data));
}

Tensor<float> encode_config(const CycleGanConfig& c) {
  return packed({c.image_size, c.base_width, c.n_res_blocks,
                 std::bit_cast<std::uint64_t>(c.lambda_cycle), c.use_identity_loss ? 1u : 0u,
                 c.epochs_total, c.epochs_constant, std::bit_cast<std::uint64_t>(c.lr0),
                 c.batch_size, c.pool_size, c.seed, std::bit_cast<std::uint64_t>(c.beta1),
                 std::bit_cast<std::uint64_t>(c.beta2), std::bit_cast<std::uint64_t>(c.adam_eps),
                 std::bit_cast<std::uint64_t>(c.init_std)});
}

constexpr std::size_t kConfigSlots = 15;

CycleGanConfig decode_config(const Tensor<float>& t) {
  if (t.shape() != nn::Shape{kConfigSlots, 4}) {
    throw DecodeError(DecodeFailure::kShapeMismatch, "checkpoint: bad meta.config shape");
  }
  auto u32 = [&](std::size_t slot) {
    const auto v = get_u64(t, slot);
    if (v > 0xffffffffu) throw DecodeError(DecodeFailure::kMalformed, "checkpoint: bad config");
    return static_cast<std::uint32_t>(v);
  };
  auto f64 = [&](std::size_t slot) { return std::bit_cast<double>(get_u64(t, slot)); };
  CycleGanConfig c;
  c.image_size = u32(0);
  c.base_width = u32(1);
  c.n_res_blocks = u32(2);
  c.lambda_cycle = f64(3);
  c.use_identity_loss = u32(4) != 0;
  c.epochs_total = u32(5);
  c.epochs_constant = u32(6);
  c.lr0 = f64(7);
  c.batch_size = u32(8);
  c.pool_size = u32(9);
  c.seed = get_u64(t, 10);
  c.beta1 = f64(11);
  c.beta2 = f64(12);
  c.adam_eps = f64(13);
  c.init_std = f64(14);
  try {
    c.validate();
  } catch (const ArgumentError& e) {
    throw DecodeError(DecodeFailure::kMalformed, std::string("checkpoint: ") + e.what());
  }
  return c;
}

template <typename State>
auto nets_of(State& s) {
  using Net = decltype(&s.g);
  using Opt = decltype(&s.opt_g);
  struct Slot {
    const char* name;
    Net net;
    Opt opt;
  };
  return std::vector<Slot>{{"G", &s.g, &s.opt_g}, {"F", &s.f, &s.opt_f},
                           {"D_X", &s.d_x, &s.opt_d_x}, {"D_Y", &s.d_y, &s.opt_d_y}};
}

/// Every fixed-name tensor of a state, in file order.
template <typename State>
auto fixed_tensors(State& s) {
  using Ptr = decltype(&s.opt_g.m[0]);
  std::vector<std::pair<std::string, Ptr>> out;
  for (const auto& slot : nets_of(s)) {
    const std::string prefix = std::string(slot.name) + ".";
    const auto params = slot.net->parameters();
    for (const auto& p : params) out.emplace_back(prefix + p.name, p.tensor);
    for (std::size_t i = 0; i < params.size(); ++i) {
      out.emplace_back("adam." + prefix + "m." + params[i].name, &slot.opt->m.at(i));
      out.emplace_back("adam." + prefix + "v." + params[i].name, &slot.opt->v.at(i));
    }
  }
  return out;
}

std::string pool_name(const char* domain, std::size_t i) {
  return std::string("pool.") + domain + "." + std::to_string(i);
}

void put_tensor(detail::ByteWriter& w, const std::string& name, const Tensor<float>& t) {
  w.put<std::uint16_t>(static_cast<std::uint16_t>(name.size()));
  w.put_bytes(name);
  w.put<std::uint8_t>(static_cast<std::uint8_t>(t.rank()));
  for (auto d : t.shape()) w.put<std::uint32_t>(static_cast<std::uint32_t>(d));
  for (float v : t.data()) w.put<float>(v);
}

}  // namespace

std::vector<std::uint8_t> save_checkpoint(const ModelState& s) {
  std::vector<std::pair<std::string, Tensor<float>>> extra;
  extra.emplace_back("meta.config", encode_config(s.config));
  for (const auto& slot : nets_of(s)) {
    extra.emplace_back("adam." + std::string(slot.name) + ".t", packed({slot.opt->t}));
  }
  for (std::size_t i = 0; i < s.pool_x.size(); ++i) {
    extra.emplace_back(pool_name("X", i), s.pool_x.images()[i]);
  }
  for (std::size_t i = 0; i < s.pool_y.size(); ++i) {
    extra.emplace_back(pool_name("Y", i), s.pool_y.images()[i]);
  }
  const auto fixed = fixed_tensors(s);

  detail::ByteWriter w;
  w.put_bytes(std::string_view(kMagic, 4));
  w.put<std::uint16_t>(kCheckpointVersion);
  w.put<std::uint32_t>(s.epoch);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(extra.size() + fixed.size()));
  for (const auto& [name, t] : extra) put_tensor(w, name, t);
  for (const auto& [name, t] : fixed) put_tensor(w, name, *t);
  return std::move(w).take();
}

ModelState load_checkpoint(std::span<const std::uint8_t> bytes) {
  detail::ByteReader r(bytes);
  if (r.remaining() < 4 || r.get_string(4) != std::string_view(kMagic, 4)) {
    throw DecodeError(DecodeFailure::kBadMagic, "checkpoint: bad magic");
  }
  if (const auto version = r.get<std::uint16_t>(); version != kCheckpointVersion) {
    throw DecodeError(DecodeFailure::kVersionMismatch,
                      "checkpoint: unsupported version " + std::to_string(version));
  }
  const auto epoch = r.get<std::uint32_t>();
  const auto count = r.get<std::uint32_t>();

  std::map<std::string, Tensor<float>> table;
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto name = r.get_string(r.get<std::uint16_t>());
    const auto rank = r.get<std::uint8_t>();
    if (rank > kMaxRank) {
      throw DecodeError(DecodeFailure::kMalformed, "checkpoint: tensor '" + name + "' rank");
    }
    nn::Shape shape(rank);
    std::size_t elems = 1;
    for (auto& d : shape) {
      d = r.get<std::uint32_t>();
      if (d != 0 && elems > r.remaining() / d) {
        throw DecodeError(DecodeFailure::kTruncated, "checkpoint: tensor '" + name + "' payload");
      }
      elems *= d;
    }
    if (elems * sizeof(float) > r.remaining()) {
      throw DecodeError(DecodeFailure::kTruncated, "checkpoint: tensor '" + name + "' payload");
    }
    Tensor<float> t(shape);
    r.get_array(t.data());
    if (!table.emplace(name, std::move(t)).second) {
      throw DecodeError(DecodeFailure::kMalformed, "checkpoint: duplicate tensor '" + name + "'");
    }
  }
  if (r.remaining() != 0) {
    throw DecodeError(DecodeFailure::kMalformed, "checkpoint: trailing bytes");
  }

  auto take = [&](const std::string& name) {
    auto it = table.find(name);
    if (it == table.end()) {
      throw DecodeError(DecodeFailure::kShapeMismatch, "checkpoint: missing tensor '" + name + "'");
    }
    Tensor<float> t = std::move(it->second);
    table.erase(it);
    return t;
  };

  const CycleGanConfig config = decode_config(take("meta.config"));
  ModelState s = init_state(config);
  s.epoch = epoch;
  if (epoch > config.epochs_total) {
    throw DecodeError(DecodeFailure::kMalformed, "checkpoint: epoch beyond epochs_total");
  }
  for (const auto& slot : nets_of(s)) {
    const auto t = take("adam." + std::string(slot.name) + ".t");
    if (t.shape() != nn::Shape{1, 4}) {
      throw DecodeError(DecodeFailure::kShapeMismatch, "checkpoint: bad Adam step counter");
    }
    slot.opt->t = get_u64(t, 0);
  }
  for (const auto& [name, target] : fixed_tensors(s)) {
    auto t = take(name);
    if (t.shape() != target->shape()) {
      throw DecodeError(DecodeFailure::kShapeMismatch,
                        "checkpoint: tensor '" + name + "' has shape " +
                            nn::shape_str(t.shape()) + ", expected " +
                            nn::shape_str(target->shape()));
    }
    *target = std::move(t);
  }
  const nn::Shape image_shape{1, 3, config.image_size, config.image_size};
  for (const auto& [domain, pool] : {std::pair{"X", &s.pool_x}, std::pair{"Y", &s.pool_y}}) {
    std::vector<Tensor<float>> images;
    while (table.count(pool_name(domain, images.size())) != 0) {
      auto t = take(pool_name(domain, images.size()));
      if (t.shape() != image_shape) {
        throw DecodeError(DecodeFailure::kShapeMismatch, "checkpoint: bad pool image shape");
      }
      images.push_back(std::move(t));
    }
    if (images.size() > pool->capacity()) {
      throw DecodeError(DecodeFailure::kShapeMismatch, "checkpoint: pool exceeds pool_size");
    }
    pool->restore(std::move(images));
  }
  if (!table.empty()) {
    throw DecodeError(DecodeFailure::kShapeMismatch,
                      "checkpoint: unexpected tensor '" + table.begin()->first + "'");
  }
  return s;
}

void save_checkpoint_file(const ModelState& state, const std::string& path) {
  detail::write_file(path, save_checkpoint(state));
}

ModelState load_checkpoint_file(const std::string& path) {
  const auto bytes = detail::read_file(path);
  return load_checkpoint(bytes);
}

}  // namespace floodsight::cyclegan
