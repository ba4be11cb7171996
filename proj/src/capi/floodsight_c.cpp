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

#include "floodsight/floodsight.h"

#include <exception>
#include <memory>
#include <string>

#include "common/byte_io.hpp"
#include "floodsight/cyclegan.hpp"
#include "floodsight/error.hpp"
#include "floodsight/hazard_raster.hpp"
#include "floodsight/image.hpp"
#include "floodsight/service.hpp"

struct fs_flood_map {
  floodsight::BinaryFloodMap map;
};

struct fs_region {
  floodsight::RegionGrid grid;
};

struct fs_model {
  floodsight::cyclegan::ModelState state;
};

struct fs_server {
  floodsight::service::ServiceConfig config;
  std::unique_ptr<floodsight::service::Service> service;
  std::unique_ptr<floodsight::service::HttpServer> http;
};

namespace {

using namespace floodsight;

thread_local std::string g_last_error;

fs_status fail(fs_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

/// Runs fn and converts any exception into a status code.
template <typename Fn>
fs_status guarded(Fn&& fn) noexcept {
  try {
    fn();
    return FS_OK;
  } catch (const ArgumentError& e) {
    return fail(FS_E_ARGUMENT, e.what());
  } catch (const IoError& e) {
    return fail(FS_E_IO, e.what());
  } catch (const ParseError& e) {
    return fail(FS_E_PARSE, e.what());
  } catch (const ExtentError& e) {
    return fail(FS_E_EXTENT, e.what());
  } catch (const DecodeError& e) {
    return fail(FS_E_DECODE, e.what());
  } catch (const ShapeError& e) {
    return fail(FS_E_SHAPE, e.what());
  } catch (const TrainingError& e) {
    return fail(FS_E_TRAINING, e.what());
  } catch (const NotFoundError& e) {
    return fail(FS_E_NOT_FOUND, e.what());
  } catch (const UpstreamError& e) {
    return fail(FS_E_UPSTREAM, e.what());
  } catch (const ImageryError& e) {
    return fail(FS_E_IMAGERY, e.what());
  } catch (const std::exception& e) {
    return fail(FS_E_INTERNAL, e.what());
  } catch (...) {
    return fail(FS_E_INTERNAL, "unknown exception");
  }
}

void require(const void* p, const char* name) {
  if (!p) throw ArgumentError(std::string(name) + " must not be NULL");
}

const BinaryFloodMap* map_of(const fs_flood_map* m) { return m ? &m->map : nullptr; }

std::string join(const char* dir, const char* sub) { return std::string(dir) + "/" + sub; }

cyclegan::Direction direction_of(fs_direction d) {
  switch (d) {
    case FS_X_TO_Y: return cyclegan::Direction::kXtoY;
    case FS_Y_TO_X: return cyclegan::Direction::kYtoX;
  }
  throw ArgumentError("unknown translation direction");
}

}  // namespace

extern "C" {

const char* fs_version(void) { return "0.1.0"; }

const char* fs_status_name(fs_status status) {
  switch (status) {
    case FS_OK: return "ok";
    case FS_E_ARGUMENT: return "invalid argument";
    case FS_E_IO: return "i/o error";
    case FS_E_PARSE: return "parse error";
    case FS_E_EXTENT: return "outside extent";
    case FS_E_DECODE: return "decode error";
    case FS_E_SHAPE: return "shape mismatch";
    case FS_E_TRAINING: return "training diverged";
    case FS_E_NOT_FOUND: return "not found";
    case FS_E_UPSTREAM: return "upstream error";
    case FS_E_IMAGERY: return "imagery error";
    case FS_E_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* fs_last_error(void) { return g_last_error.c_str(); }

const char* fs_flood_status_name(fs_flood_status status) {
  switch (status) {
    case FS_FLOOD_NONE: return "None";
    case FS_FLOOD_INLAND: return "Inland";
    case FS_FLOOD_COASTAL: return "Coastal";
    case FS_FLOOD_BOTH: return "Both";
  }
  return "Unknown";
}

// Flood maps

fs_status fs_ingest_inland(const char* asc_path, double threshold_m, int return_period_years,
                           fs_flood_map** out) {
  return guarded([&] {
    require(asc_path, "asc_path");
    require(out, "out");
    auto m = std::make_unique<fs_flood_map>(fs_flood_map{
        binarize_inland(load_ascii_grid(asc_path), threshold_m, return_period_years)});
    *out = m.release();
  });
}

fs_status fs_ingest_coastal(const char* asc_path, double threshold_m, fs_flood_map** out) {
  return guarded([&] {
    require(asc_path, "asc_path");
    require(out, "out");
    auto m = std::make_unique<fs_flood_map>(
        fs_flood_map{binarize_coastal(load_ascii_grid(asc_path), threshold_m, CoastalSource{})});
    *out = m.release();
  });
}

fs_status fs_flood_map_load(const char* bfm_path, fs_flood_map** out) {
  return guarded([&] {
    require(bfm_path, "bfm_path");
    require(out, "out");
    *out = std::make_unique<fs_flood_map>(fs_flood_map{load_bfm(bfm_path)}).release();
  });
}

fs_status fs_flood_map_save(const fs_flood_map* map, const char* bfm_path) {
  return guarded([&] {
    require(map, "map");
    require(bfm_path, "bfm_path");
    save_bfm(map->map, bfm_path);
  });
}

fs_status fs_flood_map_get_info(const fs_flood_map* map, fs_flood_map_info* out) {
  return guarded([&] {
    require(map, "map");
    require(out, "out");
    const auto& g = map->map.georef();
    fs_flood_map_info info{};
    info.origin_lon = g.origin_lon;
    info.origin_lat = g.origin_lat;
    info.cell_size_deg = g.cell_size_deg;
    info.width = g.width;
    info.height = g.height;
    info.is_coastal = map->map.is_coastal() ? 1 : 0;
    if (const auto* in = std::get_if<InlandSource>(&map->map.source())) {
      info.return_period_years = in->return_period_years;
    }
    info.threshold_m = map->map.threshold_m();
    for (std::uint32_t r = 0; r < g.height; ++r)
      for (std::uint32_t c = 0; c < g.width; ++c) info.flooded_cells += map->map.bit(r, c);
    *out = info;
  });
}

void fs_flood_map_free(fs_flood_map* map) { delete map; }

fs_status fs_query(const fs_flood_map* inland, const fs_flood_map* coastal, double lat,
                   double lon, fs_flood_status* out) {
  return guarded([&] {
    require(out, "out");
    if (!inland && !coastal) throw ArgumentError("query needs at least one map");
    *out = static_cast<fs_flood_status>(query_combined(map_of(inland), map_of(coastal), lat, lon));
  });
}

fs_status fs_region_compute(const fs_flood_map* inland, const fs_flood_map* coastal,
                            double lat_min, double lat_max, double lon_min, double lon_max,
                            uint32_t max_cells_per_axis, fs_region** out) {
  return guarded([&] {
    require(out, "out");
    auto r = std::make_unique<fs_region>(fs_region{region_grid(
        map_of(inland), map_of(coastal), {lat_min, lat_max, lon_min, lon_max},
        max_cells_per_axis)});
    *out = r.release();
  });
}

uint32_t fs_region_rows(const fs_region* region) { return region ? region->grid.rows : 0; }
uint32_t fs_region_cols(const fs_region* region) { return region ? region->grid.cols : 0; }

fs_flood_status fs_region_cell(const fs_region* region, uint32_t row, uint32_t col) {
  if (!region || row >= region->grid.rows || col >= region->grid.cols) return FS_FLOOD_NONE;
  return static_cast<fs_flood_status>(region->grid.at(row, col));
}

double fs_region_lat(const fs_region* region, uint32_t row) {
  return region && row < region->grid.rows ? region->grid.lat_centers[row] : 0.0;
}

double fs_region_lon(const fs_region* region, uint32_t col) {
  return region && col < region->grid.cols ? region->grid.lon_centers[col] : 0.0;
}

void fs_region_free(fs_region* region) { delete region; }

// Datasets

fs_status fs_make_synthetic(const char* out_dir, uint32_t n_train, uint32_t n_test,
                            uint32_t size, uint64_t seed) {
  return guarded([&] {
    require(out_dir, "out_dir");
    write_synthetic_dataset(out_dir, n_train, n_test, size, seed);
  });
}

// Models

fs_status fs_train(const fs_train_options* o) {
  return guarded([&] {
    require(o, "options");
    require(o->data_dir, "data_dir");
    require(o->checkpoint_path, "checkpoint_path");
    if (!o->config_path && !o->resume_path) {
      throw ArgumentError("either config_path or resume_path is required");
    }

    std::optional<cyclegan::CycleGanConfig> config;
    if (o->config_path) {
      const auto bytes = detail::read_file(o->config_path);
      config = cyclegan::parse_cyclegan_config(
          std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
    }
    cyclegan::ModelState state;
    if (o->resume_path) {
      state = cyclegan::load_checkpoint_file(o->resume_path);
      if (config && !(*config == state.config)) {
        throw ArgumentError("config does not match the configuration stored in " +
                            std::string(o->resume_path));
      }
    } else {
      state = cyclegan::init_state(*config);
    }

    const auto size = state.config.image_size;
    const auto train_x = load_image_dir(join(o->data_dir, "trainX"), size);
    const auto train_y = load_image_dir(join(o->data_dir, "trainY"), size);
    cyclegan::EpochCallback cb;
    if (o->on_epoch) {
      cb = [o](const cyclegan::EpochMetrics& m) {
        const fs_epoch_metrics c{m.epoch,    m.lr,      m.adv_g,   m.adv_f,  m.loss_d_x,
                                 m.loss_d_y, m.cycle_x, m.cycle_y, m.seconds};
        o->on_epoch(&c, o->user);
      };
    }
    const auto metrics =
        cyclegan::train_epochs(state, train_x, train_y, state.config.epochs_total, cb);
    cyclegan::save_checkpoint_file(state, o->checkpoint_path);
    if (o->metrics_path) {
      const std::string csv = cyclegan::metrics_csv(metrics);
      detail::write_file(o->metrics_path,
                         std::span(reinterpret_cast<const std::uint8_t*>(csv.data()), csv.size()));
    }
  });
}

fs_status fs_model_load(const char* checkpoint_path, fs_model** out) {
  return guarded([&] {
    require(checkpoint_path, "checkpoint_path");
    require(out, "out");
    *out = std::make_unique<fs_model>(fs_model{cyclegan::load_checkpoint_file(checkpoint_path)})
               .release();
  });
}

fs_status fs_model_get_info(const fs_model* model, fs_model_info* out) {
  return guarded([&] {
    require(model, "model");
    require(out, "out");
    const auto& c = model->state.config;
    *out = fs_model_info{c.image_size, model->state.epoch, c.epochs_total, c.seed};
  });
}

void fs_model_free(fs_model* model) { delete model; }

fs_status fs_translate_file(const fs_model* model, const char* in_png, const char* out_png,
                            fs_direction direction) {
  return guarded([&] {
    require(model, "model");
    require(in_png, "in_png");
    require(out_png, "out_png");
    const auto size = model->state.config.image_size;
    const Image in = resize(load_png_file(in_png), size, size);
    save_png_file(cyclegan::translate(model->state, in, direction_of(direction)), out_png);
  });
}

fs_status fs_evaluate(const fs_model* model, const char* data_dir, fs_eval_result* out) {
  return guarded([&] {
    require(model, "model");
    require(data_dir, "data_dir");
    require(out, "out");
    const auto size = model->state.config.image_size;
    const auto test_x = load_image_dir(join(data_dir, "testX"), size);
    const auto test_y = load_image_dir(join(data_dir, "testY"), size);
    if (test_x.empty() || test_y.empty()) {
      throw ArgumentError(std::string(data_dir) + ": testX and testY must hold PNG images");
    }
    fs_eval_result r{};
    r.success_rate = cyclegan::evaluate(model->state, test_x, looks_flooded);
    r.cycle_loss = cyclegan::held_out_cycle_loss(model->state, test_x, test_y);
    r.n_test_x = static_cast<uint32_t>(test_x.size());
    r.n_test_y = static_cast<uint32_t>(test_y.size());
    *out = r;
  });
}

// Service

fs_status fs_server_create(const char* config_path, fs_server** out) {
  return guarded([&] {
    require(out, "out");
    const std::string path = service::effective_config_path(config_path ? config_path : "");
    if (path.empty()) throw ArgumentError("no config path given and FLOODSIGHT_CONFIG unset");
    auto s = std::make_unique<fs_server>();
    s->config = service::load_service_config(path);
    s->service = std::make_unique<service::Service>(service::load_resources(s->config));
    s->http = std::make_unique<service::HttpServer>(*s->service);
    *out = s.release();
  });
}

fs_status fs_server_bind(fs_server* server, const char* host, int port, int* bound_port) {
  return guarded([&] {
    require(server, "server");
    const int p = server->http->bind(host ? host : server->config.host,
                                     port < 0 ? server->config.port : port);
    if (bound_port) *bound_port = p;
  });
}

fs_status fs_server_run(fs_server* server) {
  return guarded([&] {
    require(server, "server");
    server->http->listen();
  });
}

void fs_server_stop(fs_server* server) {
  if (server) server->http->stop();
}

void fs_server_free(fs_server* server) { delete server; }

}  // extern "C"
