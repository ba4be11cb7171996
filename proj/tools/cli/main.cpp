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

// floodsight: command-line entry point. Links only the C API.

#include <atomic>
#include <csignal>
#include <cstdio>
#include <ctime>
#include <string>
#include <thread>

#include <pthread.h>

#include <CLI11.hpp>

#include "floodsight/floodsight.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;

/// Prints the library error and returns the runtime exit code.
int report(fs_status status, const std::string& context) {
  std::fprintf(stderr, "floodsight: %s: %s: %s\n", context.c_str(), fs_status_name(status),
               fs_last_error());
  return kExitRuntime;
}

struct MapHandle {
  fs_flood_map* p = nullptr;
  ~MapHandle() { fs_flood_map_free(p); }
};

struct ModelHandle {
  fs_model* p = nullptr;
  ~ModelHandle() { fs_model_free(p); }
};

struct RegionHandle {
  fs_region* p = nullptr;
  ~RegionHandle() { fs_region_free(p); }
};

struct ServerHandle {
  fs_server* p = nullptr;
  ~ServerHandle() { fs_server_free(p); }
};

// Subcommand bodies

struct IngestArgs {
  std::string asc;
  std::string out;
  double threshold = 0.0;
  int return_period = 0;
};

int run_ingest(const IngestArgs& a, bool coastal) {
  MapHandle map;
  const fs_status st = coastal ? fs_ingest_coastal(a.asc.c_str(), a.threshold, &map.p)
                               : fs_ingest_inland(a.asc.c_str(), a.threshold, a.return_period,
                                                  &map.p);
  if (st != FS_OK) return report(st, a.asc);
  if (const fs_status s = fs_flood_map_save(map.p, a.out.c_str()); s != FS_OK) {
    return report(s, a.out);
  }
  fs_flood_map_info info{};
  fs_flood_map_get_info(map.p, &info);
  std::fprintf(stderr, "wrote %s: %ux%u cells, %llu flooded\n", a.out.c_str(), info.width,
               info.height, static_cast<unsigned long long>(info.flooded_cells));
  return kExitOk;
}

struct MapArgs {
  std::string map;
  std::string coastal;
};

int load_maps(const MapArgs& a, MapHandle& inland, MapHandle& coastal) {
  if (const fs_status s = fs_flood_map_load(a.map.c_str(), &inland.p); s != FS_OK) {
    return report(s, a.map);
  }
  if (!a.coastal.empty()) {
    if (const fs_status s = fs_flood_map_load(a.coastal.c_str(), &coastal.p); s != FS_OK) {
      return report(s, a.coastal);
    }
  }
  return kExitOk;
}

struct QueryArgs {
  MapArgs maps;
  double lat = 0.0;
  double lon = 0.0;
};

int run_query(const QueryArgs& a) {
  MapHandle inland, coastal;
  if (const int rc = load_maps(a.maps, inland, coastal); rc != kExitOk) return rc;
  fs_flood_status status{};
  if (const fs_status s = fs_query(inland.p, coastal.p, a.lat, a.lon, &status); s != FS_OK) {
    return report(s, "query");
  }
  std::printf("%s\n", fs_flood_status_name(status));
  return kExitOk;
}

struct RegionArgs {
  MapArgs maps;
  double lat_min = 0.0, lat_max = 0.0, lon_min = 0.0, lon_max = 0.0;
  std::uint32_t max_cells = 64;
};

int run_region(const RegionArgs& a) {
  MapHandle inland, coastal;
  if (const int rc = load_maps(a.maps, inland, coastal); rc != kExitOk) return rc;
  RegionHandle region;
  if (const fs_status s = fs_region_compute(inland.p, coastal.p, a.lat_min, a.lat_max,
                                            a.lon_min, a.lon_max, a.max_cells, &region.p);
      s != FS_OK) {
    return report(s, "region");
  }
  const std::uint32_t rows = fs_region_rows(region.p);
  const std::uint32_t cols = fs_region_cols(region.p);
  std::printf("# rows %u cols %u, north to south; 0=None 1=Inland 2=Coastal 3=Both\n", rows,
              cols);
  for (std::uint32_t r = 0; r < rows; ++r) {
    for (std::uint32_t c = 0; c < cols; ++c) {
      std::printf(c ? " %d" : "%d", static_cast<int>(fs_region_cell(region.p, r, c)));
    }
    std::printf("\n");
  }
  return kExitOk;
}

struct SyntheticArgs {
  std::string out;
  std::uint32_t n = 100;
  std::uint32_t n_test = 80;
  std::uint32_t size = 32;
  std::uint64_t seed = 0;
};

int run_make_synthetic(const SyntheticArgs& a) {
  if (const fs_status s = fs_make_synthetic(a.out.c_str(), a.n, a.n_test, a.size, a.seed);
      s != FS_OK) {
    return report(s, a.out);
  }
  return kExitOk;
}

struct TrainArgs {
  std::string data;
  std::string config;
  std::string out;
  std::string metrics;
  std::string resume;
  bool quiet = false;
};

void print_epoch(const fs_epoch_metrics* m, void*) {
  std::fprintf(stderr,
               "epoch %3u  lr %.3g  adv_g %.4f  adv_f %.4f  d_x %.4f  d_y %.4f  "
               "cyc_x %.4f  cyc_y %.4f  %.1fs\n",
               m->epoch, m->lr, m->adv_g, m->adv_f, m->loss_d_x, m->loss_d_y, m->cycle_x,
               m->cycle_y, m->seconds);
}

int run_train(const TrainArgs& a) {
  const std::string metrics = a.metrics.empty() ? a.out + ".metrics.csv" : a.metrics;
  fs_train_options o{};
  o.data_dir = a.data.c_str();
  o.config_path = a.config.empty() ? nullptr : a.config.c_str();
  o.resume_path = a.resume.empty() ? nullptr : a.resume.c_str();
  o.checkpoint_path = a.out.c_str();
  o.metrics_path = metrics.c_str();
  o.on_epoch = a.quiet ? nullptr : print_epoch;
  if (const fs_status s = fs_train(&o); s != FS_OK) return report(s, "train");
  std::fprintf(stderr, "wrote %s and %s\n", a.out.c_str(), metrics.c_str());
  return kExitOk;
}

struct TranslateArgs {
  std::string ckpt;
  std::string in;
  std::string out;
  std::string direction = "x2y";
};

int run_translate(const TranslateArgs& a) {
  ModelHandle model;
  if (const fs_status s = fs_model_load(a.ckpt.c_str(), &model.p); s != FS_OK) {
    return report(s, a.ckpt);
  }
  const fs_direction dir = a.direction == "y2x" ? FS_Y_TO_X : FS_X_TO_Y;
  if (const fs_status s = fs_translate_file(model.p, a.in.c_str(), a.out.c_str(), dir);
      s != FS_OK) {
    return report(s, a.in);
  }
  return kExitOk;
}

struct EvaluateArgs {
  std::string ckpt;
  std::string data;
};

int run_evaluate(const EvaluateArgs& a) {
  ModelHandle model;
  if (const fs_status s = fs_model_load(a.ckpt.c_str(), &model.p); s != FS_OK) {
    return report(s, a.ckpt);
  }
  fs_eval_result r{};
  if (const fs_status s = fs_evaluate(model.p, a.data.c_str(), &r); s != FS_OK) {
    return report(s, a.data);
  }
  std::printf("success_rate %.6f\ncycle_loss %.6f\nn_test_x %u\nn_test_y %u\n", r.success_rate,
              r.cycle_loss, r.n_test_x, r.n_test_y);
  return kExitOk;
}

struct ServeArgs {
  std::string config;
  std::string host;
  int port = -1;
};

int run_serve(const ServeArgs& a) {
  // Signals are collected by a watcher thread, so block them before the
  // server spawns its workers.
  sigset_t stop_signals;
  sigemptyset(&stop_signals);
  sigaddset(&stop_signals, SIGINT);
  sigaddset(&stop_signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &stop_signals, nullptr);

  ServerHandle server;
  if (const fs_status s =
          fs_server_create(a.config.empty() ? nullptr : a.config.c_str(), &server.p);
      s != FS_OK) {
    return report(s, "serve");
  }
  int port = 0;
  if (const fs_status s = fs_server_bind(server.p, a.host.empty() ? nullptr : a.host.c_str(),
                                         a.port, &port);
      s != FS_OK) {
    return report(s, "serve");
  }
  std::printf("listening on port %d\n", port);
  std::fflush(stdout);

  std::atomic<bool> done{false};
  std::thread watcher([&] {
    const timespec tick{0, 200'000'000};
    while (!done.load()) {
      if (sigtimedwait(&stop_signals, nullptr, &tick) > 0) {
        fs_server_stop(server.p);
        return;
      }
    }
  });
  const fs_status st = fs_server_run(server.p);
  done = true;
  watcher.join();
  return st == FS_OK ? kExitOk : report(st, "serve");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"FloodSight: flood-hazard maps and flooded-scene rendering"};
  app.set_version_flag("--version", std::string(fs_version()));
  app.require_subcommand(1, 1);
  int rc = kExitOk;

  IngestArgs inland;
  auto* ingest_inland =
      app.add_subcommand("ingest-inland", "Binarize an inland depth grid into a BFM flood map");
  ingest_inland->add_option("--asc", inland.asc, "ESRI ASCII depth grid (metres)")
      ->required()
      ->check(CLI::ExistingFile);
  ingest_inland->add_option("--threshold", inland.threshold,
                            "Depth in metres a cell must exceed to count as flooded")
      ->capture_default_str();
  ingest_inland->add_option("--return-period", inland.return_period, "10, 20, 50 or 100 years")
      ->required()
      ->check(CLI::IsMember({10, 20, 50, 100}));
  ingest_inland->add_option("--out", inland.out, "Output BFM file")->required();
  ingest_inland->callback([&] { rc = run_ingest(inland, false); });

  IngestArgs coastal;
  coastal.threshold = 0.20;
  auto* ingest_coastal = app.add_subcommand(
      "ingest-coastal", "Binarize a coastal exceedance grid into a BFM flood map");
  ingest_coastal->add_option("--asc", coastal.asc, "ESRI ASCII exceedance grid (metres)")
      ->required()
      ->check(CLI::ExistingFile);
  ingest_coastal->add_option("--threshold", coastal.threshold,
                             "Exceedance in metres a cell must exceed to count as flooded")
      ->capture_default_str();
  ingest_coastal->add_option("--out", coastal.out, "Output BFM file")->required();
  ingest_coastal->callback([&] { rc = run_ingest(coastal, true); });

  QueryArgs query;
  auto* query_cmd = app.add_subcommand("query", "Print the flood status at a point");
  query_cmd->add_option("--map", query.maps.map, "Inland BFM file")
      ->required()
      ->check(CLI::ExistingFile);
  query_cmd->add_option("--coastal", query.maps.coastal, "Coastal BFM file")
      ->check(CLI::ExistingFile);
  query_cmd->add_option("--lat", query.lat, "Latitude in degrees")->required();
  query_cmd->add_option("--lon", query.lon, "Longitude in degrees")->required();
  query_cmd->callback([&] { rc = run_query(query); });

  RegionArgs region;
  auto* region_cmd =
      app.add_subcommand("region", "Print the flood-status grid over a bounding box");
  region_cmd->add_option("--map", region.maps.map, "Inland BFM file")
      ->required()
      ->check(CLI::ExistingFile);
  region_cmd->add_option("--coastal", region.maps.coastal, "Coastal BFM file")
      ->check(CLI::ExistingFile);
  region_cmd->add_option("--lat-min", region.lat_min, "South edge")->required();
  region_cmd->add_option("--lat-max", region.lat_max, "North edge")->required();
  region_cmd->add_option("--lon-min", region.lon_min, "West edge")->required();
  region_cmd->add_option("--lon-max", region.lon_max, "East edge")->required();
  region_cmd->add_option("--max-cells", region.max_cells, "Samples per axis at most")
      ->capture_default_str()
      ->check(CLI::Range(1, 512));
  region_cmd->callback([&] { rc = run_region(region); });

  SyntheticArgs synth;
  auto* synth_cmd = app.add_subcommand(
      "make-synthetic", "Write synthetic grass (X) and water (Y) PNG datasets");
  synth_cmd->add_option("--out", synth.out, "Output directory")->required();
  synth_cmd->add_option("--n", synth.n, "Training images per domain")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  synth_cmd->add_option("--n-test", synth.n_test, "Held-out images per domain")
      ->capture_default_str();
  synth_cmd->add_option("--size", synth.size, "Image side in pixels (>= 16)")
      ->capture_default_str()
      ->check(CLI::Range(16u, 4096u));
  synth_cmd->add_option("--seed", synth.seed, "Generator seed")->capture_default_str();
  synth_cmd->callback([&] { rc = run_make_synthetic(synth); });

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "Train the image-translation model");
  train_cmd->add_option("--data", train.data, "Dataset directory with trainX/ and trainY/")
      ->required()
      ->check(CLI::ExistingDirectory);
  auto* config_opt =
      train_cmd->add_option("--config", train.config, "Training config (key = value)")
          ->check(CLI::ExistingFile);
  train_cmd->add_option("--out", train.out, "Output checkpoint")->required();
  train_cmd->add_option("--metrics", train.metrics, "Metrics CSV (default <out>.metrics.csv)");
  auto* resume_opt = train_cmd->add_option("--resume", train.resume,
                                           "Continue from this checkpoint")
                         ->check(CLI::ExistingFile);
  train_cmd->add_flag("--quiet", train.quiet, "Do not print per-epoch metrics");
  train_cmd->callback([&] {
    if (config_opt->count() == 0 && resume_opt->count() == 0) {
      throw CLI::RequiredError("--config or --resume");
    }
    rc = run_train(train);
  });

  TranslateArgs tr;
  auto* tr_cmd = app.add_subcommand("translate", "Translate one PNG with a trained checkpoint");
  tr_cmd->add_option("--ckpt", tr.ckpt, "Checkpoint file")->required()->check(CLI::ExistingFile);
  tr_cmd->add_option("--in", tr.in, "Input PNG")->required()->check(CLI::ExistingFile);
  tr_cmd->add_option("--out", tr.out, "Output PNG")->required();
  tr_cmd->add_option("--direction", tr.direction, "x2y (dry to flooded) or y2x")
      ->capture_default_str()
      ->check(CLI::IsMember({"x2y", "y2x"}));
  tr_cmd->callback([&] { rc = run_translate(tr); });

  EvaluateArgs ev;
  auto* ev_cmd = app.add_subcommand(
      "evaluate", "Print held-out success rate and cycle loss for a checkpoint");
  ev_cmd->add_option("--ckpt", ev.ckpt, "Checkpoint file")->required()->check(CLI::ExistingFile);
  ev_cmd->add_option("--data", ev.data, "Dataset directory with testX/ and testY/")
      ->required()
      ->check(CLI::ExistingDirectory);
  ev_cmd->callback([&] { rc = run_evaluate(ev); });

  ServeArgs serve;
  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP service");
  serve_cmd->add_option("--config", serve.config,
                        "Service config; FLOODSIGHT_CONFIG overrides it when set");
  serve_cmd->add_option("--host", serve.host, "Override the configured bind host");
  serve_cmd->add_option("--port", serve.port, "Override the configured port (0 picks one)")
      ->check(CLI::Range(0, 65535));
  serve_cmd->callback([&] { rc = run_serve(serve); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }
  return rc;
}
