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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails. Tolerances are fixed below.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "floodsight/cyclegan.hpp"
#include "floodsight/error.hpp"
#include "floodsight/hazard_raster.hpp"
#include "floodsight/image.hpp"
#include "floodsight/nn/gradcheck.hpp"
#include "floodsight/service.hpp"

using namespace floodsight;
using namespace floodsight::cyclegan;

namespace {

// Learning-rate schedule
constexpr double kLrTolerance = 1e-12;
// Gradient check
constexpr double kGradStep = 1e-3;
constexpr double kGradTolerance = 1e-3;
constexpr std::size_t kGradMaxParams = 5000;
constexpr std::uint32_t kGradImageSize = 32;
constexpr std::uint64_t kGradInitSeed = 2024;
constexpr std::uint64_t kGradInputSeed = 7;
// Binarization
constexpr int kRasterCount = 100;
constexpr std::uint32_t kRasterSide = 50;
constexpr double kCoastalThreshold = 0.20;
// Codec
constexpr int kCodecMaps = 500;
// Dataset
constexpr std::size_t kExpandInputs = 1000;
constexpr std::uint32_t kExpandFactor = 5;
constexpr std::size_t kExpandExpected = 5000;
constexpr std::uint32_t kExpandSize = 64;
// Desk training
constexpr std::uint32_t kDeskSize = 32;
constexpr int kDeskTrainPerDomain = 100;
constexpr int kDeskTestPerDomain = 80;
constexpr std::uint32_t kDeskEpochs = 30;
constexpr double kDeskMaxCycleLoss = 0.08;
constexpr double kDeskMinSuccess = 0.70;
// Resume
constexpr std::uint32_t kResumeEpochs = 4;
constexpr std::uint32_t kResumeSplit = 2;

int g_failures = 0;

void report(bool ok, const char* name, const std::string& detail) {
  std::printf("%s %s: %s\n", ok ? "PASS" : "FAIL", name, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

/// Runs a criterion; an escaping exception counts as a failure.
void criterion(const char* name, const std::function<void()>& body) {
  try {
    body();
  } catch (const std::exception& e) {
    report(false, name, std::string("exception: ") + e.what());
  }
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------------------

void lr_schedule() {
  const CycleGanConfig c;  // 200 epochs, constant for 100, lr0 2e-4
  double worst = 0.0;
  for (std::uint32_t e = 0; e < 100; ++e) worst = std::max(worst, std::abs(lr_at(c, e) - 2e-4));
  worst = std::max(worst, std::abs(lr_at(c, 150) - 1e-4));
  worst = std::max(worst, std::abs(lr_at(c, 199) - 2e-6));
  report(worst <= kLrTolerance, "lr_schedule",
         fmt("max |lr - expected| = %.3g over epochs 0-99, 150, 199 (tol %.0e)", worst,
             kLrTolerance));
}

void gradient_check() {
  CycleGanConfig c;
  c.image_size = kGradImageSize;
  c.base_width = 2;
  c.n_res_blocks = 1;
  nn::InitRng rng(kGradInitSeed);
  auto net = nn::build_network<double>(generator_specs(c), rng, c.init_std);
  net.add(std::make_unique<nn::Sequential<double>>(
      nn::build_network<double>(discriminator_specs(c), rng, c.init_std)));
  Tensor<double> x({1, 3, kGradImageSize, kGradImageSize});
  std::mt19937_64 xr(kGradInputSeed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (auto& v : x.data()) v = u(xr);

  const auto t0 = std::chrono::steady_clock::now();
  nn::GradCheckOptions o;
  o.h = kGradStep;
  o.tolerance = kGradTolerance;
  const auto rep = nn::finite_diff_check(net, x, o);
  const double secs = seconds_since(t0);

  nn::GradCheckOptions fine;
  fine.h = 1e-5;
  fine.tolerance = kGradTolerance;
  fine.skip_kinks = false;
  const auto ref = nn::finite_diff_check(net, x, fine);

  const bool ok = net.parameter_count() <= kGradMaxParams && rep.passed() &&
                  rep.max_rel_error < kGradTolerance;
  report(ok, "gradient_check",
         fmt("G+D pair %zu params, h=%.0e: max rel err %.3g (tol %.0e), %zu/%zu coords over, "
             "%zu kink probes skipped, worst %s[%zu], %.1fs; at h=1e-5 all %zu coords: max %.3g",
             net.parameter_count(), kGradStep, rep.max_rel_error, kGradTolerance,
             rep.failures.size(), rep.checked, rep.skipped_kinks, rep.worst.name.c_str(),
             rep.worst.index, secs, ref.checked, ref.max_rel_error));
}

void binarization() {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> depth(-0.5, 2.0);
  std::uniform_real_distribution<double> thr(0.0, 1.0);
  int mismatched = 0;
  for (int k = 0; k < kRasterCount; ++k) {
    HazardRaster r;
    r.georef = {-10.0 + k * 0.1, 50.0, 0.01, kRasterSide, kRasterSide};
    r.values.resize(kRasterSide * kRasterSide);
    for (auto& v : r.values) v = (rng() % 10 == 0) ? r.nodata : depth(rng);
    const double t_in = k % 4 == 0 ? 0.0 : thr(rng);
    const double t_co = k % 4 == 1 ? kCoastalThreshold : thr(rng);
    const auto in = binarize_inland(r, t_in, 50);
    const auto co = binarize_coastal(r, t_co, CoastalSource{});
    for (std::uint32_t row = 0; row < kRasterSide; ++row) {
      for (std::uint32_t col = 0; col < kRasterSide; ++col) {
        const double v = r.values[row * kRasterSide + col];
        const bool valid = v != r.nodata;
        mismatched += in.bit(row, col) != (valid && v > t_in);
        mismatched += co.bit(row, col) != (valid && v > t_co);
      }
    }
  }
  HazardRaster edge;
  edge.georef = {0.0, 1.0, 1.0, 3, 1};
  edge.values = {0.25, 0.20, 0.15};
  const auto e = binarize_coastal(edge, kCoastalThreshold, CoastalSource{});
  const bool boundary = e.bit(0, 0) && !e.bit(0, 1) && !e.bit(0, 2);
  report(mismatched == 0 && boundary, "binarization",
         fmt("%d rasters %ux%u, %d cell mismatches vs brute-force loop; "
             "0.25/0.20/0.15 m at 0.20 m -> %d/%d/%d (want 1/0/0)",
             kRasterCount, kRasterSide, kRasterSide, mismatched, int(e.bit(0, 0)),
             int(e.bit(0, 1)), int(e.bit(0, 2))));
}

BinaryFloodMap random_map(std::mt19937_64& rng) {
  const auto w = static_cast<std::uint32_t>(1 + rng() % 120);
  const auto h = static_cast<std::uint32_t>(1 + rng() % 120);
  std::uniform_real_distribution<double> lon(-180.0, 170.0), lat(-80.0, 90.0);
  const GeoRef g{lon(rng), lat(rng), 0.001 * (1 + rng() % 50), w, h};
  std::vector<bool> bits(static_cast<std::size_t>(w) * h);
  const double density = (rng() % 100) / 100.0;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = u(rng) < density;
  const float t = static_cast<float>(u(rng));
  if (rng() % 2) return {g, bits, InlandSource{kReturnPeriods[rng() % 4]}, t};
  return {g, bits, CoastalSource{}, t};
}

void codec() {
  std::mt19937_64 rng(500);
  int round_trip_failures = 0;
  int accepted_mutations = 0;
  int mutations = 0;
  auto poke = [](std::vector<std::uint8_t> b, std::size_t off, auto value) {
    std::memcpy(b.data() + off, &value, sizeof value);
    return b;
  };
  for (int k = 0; k < kCodecMaps; ++k) {
    const BinaryFloodMap m = random_map(rng);
    const auto bytes = encode_bfm(m);
    const auto back = decode_bfm(bytes);
    if (!(back.georef() == m.georef()) || back.bits() != m.bits() ||
        !(back.source() == m.source()) || back.threshold_m() != m.threshold_m() ||
        encode_bfm(back) != bytes) {
      ++round_trip_failures;
    }
    // Header: magic 0..3, version 4, kind 6, rp 7, threshold 9, width 13,
    // height 17, lon 21, lat 29, cell 37, run count 45.
    std::vector<std::vector<std::uint8_t>> bad;
    for (std::size_t i = 0; i < 4; ++i) {
      auto b = bytes;
      b[i] ^= static_cast<std::uint8_t>(1 + rng() % 255);
      bad.push_back(b);
    }
    bad.push_back(poke(bytes, 4, std::uint16_t{2}));
    bad.push_back(poke(bytes, 4, std::uint16_t{0}));
    bad.push_back(poke(bytes, 6, std::uint8_t{7}));
    bad.push_back(poke(bytes, 7, static_cast<std::uint16_t>(m.is_coastal() ? 50 : 25)));
    bad.push_back(poke(bytes, 9, -1.0f));
    bad.push_back(poke(bytes, 9, std::nanf("")));
    bad.push_back(poke(bytes, 13, std::uint32_t{0}));
    bad.push_back(poke(bytes, 13, m.georef().width + 1));
    bad.push_back(poke(bytes, 17, std::uint32_t{0}));
    bad.push_back(poke(bytes, 17, m.georef().height + 1));
    bad.push_back(poke(bytes, 21, 200.0));
    bad.push_back(poke(bytes, 29, 95.0));
    bad.push_back(poke(bytes, 37, 0.0));
    bad.push_back(poke(bytes, 37, -0.5));
    bad.push_back(poke(bytes, 37, std::nan("")));
    std::uint32_t runs = 0;
    std::memcpy(&runs, bytes.data() + 45, 4);
    bad.push_back(poke(bytes, 45, runs + 1));
    bad.push_back(poke(bytes, 45, runs - 1));
    bad.emplace_back(bytes.begin(), bytes.begin() + 1 + rng() % 48);
    for (const auto& b : bad) {
      ++mutations;
      try {
        (void)decode_bfm(b);
        ++accepted_mutations;
      } catch (const DecodeError&) {
      }
    }
  }
  report(round_trip_failures == 0 && accepted_mutations == 0, "bfm_codec",
         fmt("%d random maps: %d round-trip failures; %d header mutations, %d accepted",
             kCodecMaps, round_trip_failures, mutations, accepted_mutations));
}

void dataset_law() {
  std::vector<Image> imgs;
  imgs.reserve(kExpandInputs);
  for (std::size_t i = 0; i < kExpandInputs; ++i) {
    imgs.push_back(synth_image(i % 2 ? SyntheticDomain::kWater : SyntheticDomain::kGrass,
                               kExpandSize, 100 + i));
  }
  AugmentSpec spec;
  spec.seed = 1;
  Rng rng(spec.seed);
  const auto t0 = std::chrono::steady_clock::now();
  const auto out = expand_dataset(imgs, kExpandFactor, spec, rng);
  const double secs = seconds_since(t0);
  bool originals_first = out.size() == kExpandExpected;
  for (std::size_t i = 0; originals_first && i < kExpandInputs; ++i) {
    originals_first = out[i * kExpandFactor] == imgs[i];
  }

  Rng rng2(2);
  const std::vector<Image> few(imgs.begin(), imgs.begin() + 50);
  const auto same = expand_dataset(few, kExpandFactor, AugmentSpec::identity(), rng2);
  std::size_t identical = 0;
  for (std::size_t i = 0; i < same.size(); ++i) identical += same[i] == few[i / kExpandFactor];

  report(out.size() == kExpandExpected && originals_first && identical == same.size(),
         "dataset_expansion",
         fmt("%zu images x %u -> %zu (want %zu) in %.1fs, originals kept: %s; identity augmentation: "
             "%zu/%zu outputs equal their source",
             kExpandInputs, kExpandFactor, out.size(), kExpandExpected, secs,
             originals_first ? "yes" : "no", identical, same.size()));
}

CycleGanConfig desk_config() {
  CycleGanConfig c;
  c.image_size = kDeskSize;
  c.epochs_total = kDeskEpochs;
  c.epochs_constant = kDeskEpochs / 2;
  c.seed = 7;
  return c;
}

std::vector<Image> domain(SyntheticDomain d, int n, std::uint64_t seed0) {
  std::vector<Image> v;
  for (int i = 0; i < n; ++i) v.push_back(synth_image(d, kDeskSize, seed0 + i));
  return v;
}

void desk_training(const std::string& checkpoint_out) {
  const auto train_x = domain(SyntheticDomain::kGrass, kDeskTrainPerDomain, 1000);
  const auto train_y = domain(SyntheticDomain::kWater, kDeskTrainPerDomain, 5000);
  const auto test_x = domain(SyntheticDomain::kGrass, kDeskTestPerDomain, 9000);
  const auto test_y = domain(SyntheticDomain::kWater, kDeskTestPerDomain, 19000);
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = train(desk_config(), train_x, train_y, [](const EpochMetrics& m) {
    std::fprintf(stderr, "  desk epoch %2u  cycle %.4f/%.4f  %.1fs\n", m.epoch, m.cycle_x,
                 m.cycle_y, m.seconds);
  });
  const double secs = seconds_since(t0);
  save_checkpoint_file(r.state, checkpoint_out);
  const double cycle = held_out_cycle_loss(r.state, test_x, test_y);
  const double success = evaluate(r.state, test_x, looks_flooded);
  report(cycle < kDeskMaxCycleLoss && success >= kDeskMinSuccess, "desk_training",
         fmt("%ux%u, %d/domain, %u epochs in %.0fs: held-out cycle loss %.4f (< %.2f), "
             "oracle success %.3f on %d held-out images (>= %.2f)",
             kDeskSize, kDeskSize, kDeskTrainPerDomain, kDeskEpochs, secs, cycle,
             kDeskMaxCycleLoss, success, kDeskTestPerDomain, kDeskMinSuccess));
}

void resume_equivalence() {
  CycleGanConfig c;
  c.image_size = kDeskSize;
  c.base_width = 8;
  c.n_res_blocks = 2;
  c.epochs_total = kResumeEpochs;
  c.epochs_constant = kResumeEpochs / 2;
  c.pool_size = 8;
  c.seed = 41;
  const auto x = domain(SyntheticDomain::kGrass, 12, 300);
  const auto y = domain(SyntheticDomain::kWater, 12, 700);

  auto full = init_state(c);
  (void)train_epochs(full, x, y, kResumeEpochs);

  auto first = init_state(c);
  (void)train_epochs(first, x, y, kResumeSplit);
  auto resumed = load_checkpoint(save_checkpoint(first));
  (void)train_epochs(resumed, x, y, kResumeEpochs);

  std::size_t differing = 0, total = 0;
  auto compare = [&](const nn::Sequential<float>& a, const nn::Sequential<float>& b) {
    const auto pa = a.parameters();
    const auto pb = b.parameters();
    for (std::size_t i = 0; i < pa.size(); ++i) {
      for (std::size_t j = 0; j < pa[i].tensor->size(); ++j) {
        ++total;
        differing += (*pa[i].tensor)[j] != (*pb[i].tensor)[j];
      }
    }
  };
  compare(full.g, resumed.g);
  compare(full.f, resumed.f);
  compare(full.d_x, resumed.d_x);
  compare(full.d_y, resumed.d_y);
  const bool bytes_equal = save_checkpoint(full) == save_checkpoint(resumed);
  report(differing == 0 && bytes_equal && resumed.epoch == kResumeEpochs, "resume_equivalence",
         fmt("checkpoint at epoch %u of %u, restored, finished: %zu of %zu parameters differ; "
             "final checkpoints byte-identical: %s",
             kResumeSplit, kResumeEpochs, differing, total, bytes_equal ? "yes" : "no"));
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream(path, std::ios::binary) << text;
}

void service_e2e(const std::filesystem::path& dir, const std::string& checkpoint) {
  using nlohmann::json;
  // 4x4 grid over lat (10, 14], lon [20, 24): the west column floods.
  std::vector<bool> bits(16);
  for (int r = 0; r < 4; ++r) bits[r * 4] = true;
  save_bfm(BinaryFloodMap({20.0, 14.0, 1.0, 4, 4}, bits, InlandSource{50}, 0.0f),
           (dir / "inland50.bfm").string());
  write_text((dir / "geo.json").string(),
             R"({"1 Riverside Dr": [12.5, 20.5], "7 Upland Ave": [12.5, 22.5]})");
  std::filesystem::create_directories(dir / "imagery");
  const service::FixtureImagery fixtures((dir / "imagery").string());
  save_png_file(synth_image(SyntheticDomain::kGrass, 48, 123), fixtures.path_for({12.5, 20.5}));
  save_png_file(synth_image(SyntheticDomain::kGrass, 48, 456), fixtures.path_for({12.5, 22.5}));
  write_text((dir / "service.conf").string(),
             "inland_map.50 = inland50.bfm\ncheckpoint = " + checkpoint +
                 "\ngeocoder = fixture\ngeocoder.fixture = geo.json\n"
                 "imagery = fixture\nimagery.fixture_dir = imagery\n");

  const service::Service svc(
      service::load_resources(service::load_service_config((dir / "service.conf").string())));
  service::HttpServer server(svc);
  const int port = server.bind("127.0.0.1", 0);
  std::thread listener([&] { server.listen(); });
  server.wait_until_ready();

  httplib::Client cli("127.0.0.1", port);
  const auto wet = cli.Post("/api/v1/visualize", R"({"address": "1 Riverside Dr"})",
                            "application/json");
  const auto dry = cli.Post("/api/v1/visualize", R"({"address": "7 Upland Ave"})",
                            "application/json");
  const auto bad = cli.Post("/api/v1/visualize", R"({"address": "1 Riverside Dr",)",
                            "application/json");
  server.stop();
  listener.join();

  bool a = false, b = false, c = false;
  std::string detail;
  if (wet && wet->status == 200) {
    const auto j = json::parse(wet->body);
    a = j["flood_status"] == "Inland" && j["original_image"] != j["transformed_image"];
    detail += "flooded: " + j["flood_status"].get<std::string>() +
              (j["original_image"] != j["transformed_image"] ? ", images differ" : ", SAME images");
  } else {
    detail += "flooded: HTTP " + std::to_string(wet ? wet->status : -1);
  }
  if (dry && dry->status == 200) {
    const auto j = json::parse(dry->body);
    const auto o = service::base64_decode(j["original_image"].get<std::string>());
    const auto t = service::base64_decode(j["transformed_image"].get<std::string>());
    b = j["flood_status"] == "None" && o == t;
    detail += "; dry: " + j["flood_status"].get<std::string>() +
              (o == t ? ", byte-identical" : ", images DIFFER");
  } else {
    detail += "; dry: HTTP " + std::to_string(dry ? dry->status : -1);
  }
  if (bad) {
    const auto j = json::parse(bad->body, nullptr, false);
    c = bad->status == 400 && j.is_object() && j.contains("error") && j.contains("message");
    detail += "; malformed: HTTP " + std::to_string(bad->status) + " " + bad->body;
  } else {
    detail += "; malformed: no response";
  }
  report(a && b && c, "service_e2e", detail);
}

}  // namespace

int main() {
  const auto dir = std::filesystem::temp_directory_path() /
                   ("floodsight_acceptance_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  const std::string checkpoint = (dir / "desk.cgk").string();

  criterion("lr_schedule", lr_schedule);
  criterion("gradient_check", gradient_check);
  criterion("binarization", binarization);
  criterion("bfm_codec", codec);
  criterion("dataset_expansion", dataset_law);
  criterion("resume_equivalence", resume_equivalence);
  criterion("desk_training", [&] { desk_training(checkpoint); });
  criterion("service_e2e", [&] { service_e2e(dir, checkpoint); });

  std::filesystem::remove_all(dir);
  std::printf("%d criteria failed\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}
