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
#include <cstdio>
#include <limits>

#include "common/kv_config.hpp"
#include "floodsight/cyclegan.hpp"
#include "floodsight/error.hpp"

namespace floodsight::cyclegan {

namespace {

const char* const kKeys[] = {"image_size", "base_width",      "n_res_blocks", "lambda_cycle",
                             "use_identity_loss", "epochs_total", "epochs_constant", "lr0",
                             "batch_size", "pool_size",       "seed",         "beta1",
                             "beta2",      "adam_eps",        "init_std"};

std::uint32_t as_u32(const detail::KeyValues& kv, const std::string& key, std::uint32_t fallback) {
  const auto v = kv.get_uint(key, fallback);
  if (v > std::numeric_limits<std::uint32_t>::max()) {
    throw ParseError(kv.line_of(key), "'" + key + "' is out of range");
  }
  return static_cast<std::uint32_t>(v);
}

}  // namespace

CycleGanConfig parse_cyclegan_config(std::string_view text) {
  const auto kv = detail::KeyValues::parse(text);
  for (const auto& [key, value] : kv.entries()) {
    if (std::find(std::begin(kKeys), std::end(kKeys), key) == std::end(kKeys)) {
      throw ParseError(kv.line_of(key), "unknown key '" + key + "'");
    }
  }
  const CycleGanConfig d;
  CycleGanConfig c;
  c.image_size = as_u32(kv, "image_size", d.image_size);
  c.base_width = as_u32(kv, "base_width", d.base_width);
  c.n_res_blocks = as_u32(kv, "n_res_blocks", d.n_res_blocks);
  c.lambda_cycle = kv.get_double("lambda_cycle", d.lambda_cycle);
  c.use_identity_loss = kv.get_bool("use_identity_loss", d.use_identity_loss);
  c.epochs_total = as_u32(kv, "epochs_total", d.epochs_total);
  c.epochs_constant = as_u32(kv, "epochs_constant", d.epochs_constant);
  c.lr0 = kv.get_double("lr0", d.lr0);
  c.batch_size = as_u32(kv, "batch_size", d.batch_size);
  c.pool_size = as_u32(kv, "pool_size", d.pool_size);
  c.seed = kv.get_uint("seed", d.seed);
  c.beta1 = kv.get_double("beta1", d.beta1);
  c.beta2 = kv.get_double("beta2", d.beta2);
  c.adam_eps = kv.get_double("adam_eps", d.adam_eps);
  c.init_std = kv.get_double("init_std", d.init_std);
  c.validate();
  return c;
}

std::string format_cyclegan_config(const CycleGanConfig& c) {
  char buf[1024];
  std::snprintf(buf, sizeof buf,
                "image_size = %u\nbase_width = %u\nn_res_blocks = %u\nlambda_cycle = %.17g\n"
                "use_identity_loss = %s\nepochs_total = %u\nepochs_constant = %u\nlr0 = %.17g\n"
                "batch_size = %u\npool_size = %u\nseed = %llu\nbeta1 = %.17g\nbeta2 = %.17g\n"
                "adam_eps = %.17g\ninit_std = %.17g\n",
                c.image_size, c.base_width, c.n_res_blocks, c.lambda_cycle,
                c.use_identity_loss ? "true" : "false", c.epochs_total, c.epochs_constant, c.lr0,
                c.batch_size, c.pool_size, static_cast<unsigned long long>(c.seed), c.beta1,
                c.beta2, c.adam_eps, c.init_std);
  return buf;
}

}  // namespace floodsight::cyclegan
