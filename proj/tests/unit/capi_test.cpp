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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <thread>

#include <gtest/gtest.h>

namespace {

namespace fs = std::filesystem;

class CApi : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("floodsight_capi_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& text) {
    const auto p = (dir_ / name).string();
    std::ofstream(p) << text;
    return p;
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

const char* kInlandAsc =
    "ncols 3\nnrows 2\nxllcorner 10\nyllcorner 20\ncellsize 0.5\n"
    "0.4 0 0\n0 0 2\n";

TEST_F(CApi, IngestSaveLoadQuery) {
  fs_flood_map* map = nullptr;
  ASSERT_EQ(fs_ingest_inland(write("a.asc", kInlandAsc).c_str(), 0.0, 20, &map), FS_OK)
      << fs_last_error();
  fs_flood_map_info info{};
  ASSERT_EQ(fs_flood_map_get_info(map, &info), FS_OK);
  EXPECT_EQ(info.width, 3u);
  EXPECT_EQ(info.height, 2u);
  EXPECT_EQ(info.return_period_years, 20);
  EXPECT_EQ(info.is_coastal, 0);
  EXPECT_EQ(info.flooded_cells, 2u);
  ASSERT_EQ(fs_flood_map_save(map, path("a.bfm").c_str()), FS_OK);
  fs_flood_map_free(map);

  fs_flood_map* loaded = nullptr;
  ASSERT_EQ(fs_flood_map_load(path("a.bfm").c_str(), &loaded), FS_OK);
  fs_flood_status st{};
  ASSERT_EQ(fs_query(loaded, nullptr, 20.75, 10.25, &st), FS_OK);
  EXPECT_EQ(st, FS_FLOOD_INLAND);
  EXPECT_STREQ(fs_flood_status_name(st), "Inland");
  ASSERT_EQ(fs_query(loaded, nullptr, 20.75, 10.75, &st), FS_OK);
  EXPECT_EQ(st, FS_FLOOD_NONE);

  st = FS_FLOOD_BOTH;
  EXPECT_EQ(fs_query(loaded, nullptr, 0.0, 0.0, &st), FS_E_EXTENT);
  EXPECT_EQ(st, FS_FLOOD_BOTH);  // untouched on failure
  EXPECT_NE(std::string(fs_last_error()).find("outside"), std::string::npos);

  fs_region* region = nullptr;
  ASSERT_EQ(fs_region_compute(loaded, nullptr, 20.0, 21.0, 10.0, 11.5, 16, &region), FS_OK);
  EXPECT_EQ(fs_region_rows(region), 2u);
  EXPECT_EQ(fs_region_cols(region), 3u);
  EXPECT_EQ(fs_region_cell(region, 0, 0), FS_FLOOD_INLAND);
  EXPECT_EQ(fs_region_cell(region, 1, 2), FS_FLOOD_INLAND);
  EXPECT_EQ(fs_region_cell(region, 1, 1), FS_FLOOD_NONE);
  EXPECT_EQ(fs_region_cell(region, 9, 9), FS_FLOOD_NONE);
  EXPECT_DOUBLE_EQ(fs_region_lat(region, 0), 20.75);
  EXPECT_DOUBLE_EQ(fs_region_lon(region, 2), 11.25);
  fs_region_free(region);
  fs_flood_map_free(loaded);
}

TEST_F(CApi, CoastalThresholdIsStrict) {
  fs_flood_map* map = nullptr;
  ASSERT_EQ(fs_ingest_coastal(write("c.asc",
                                    "ncols 3\nnrows 1\nxllcorner 0\nyllcorner 0\ncellsize 1\n"
                                    "0.25 0.20 0.15\n")
                                  .c_str(),
                              0.20, &map),
            FS_OK);
  fs_flood_map_info info{};
  ASSERT_EQ(fs_flood_map_get_info(map, &info), FS_OK);
  EXPECT_EQ(info.is_coastal, 1);
  EXPECT_EQ(info.return_period_years, 0);
  EXPECT_EQ(info.flooded_cells, 1u);
  fs_flood_status st{};
  ASSERT_EQ(fs_query(nullptr, map, 0.5, 0.5, &st), FS_OK);
  EXPECT_EQ(st, FS_FLOOD_COASTAL);
  fs_flood_map_free(map);
}

TEST_F(CApi, ErrorsMapToStatusCodes) {
  fs_flood_map* map = nullptr;
  EXPECT_EQ(fs_flood_map_load(path("missing.bfm").c_str(), &map), FS_E_IO);
  EXPECT_EQ(map, nullptr);
  EXPECT_EQ(fs_flood_map_load(write("junk.bfm", "not a map").c_str(), &map), FS_E_DECODE);
  EXPECT_EQ(fs_ingest_inland(write("bad.asc", "ncols x\n").c_str(), 0.0, 50, &map), FS_E_PARSE);
  EXPECT_EQ(fs_ingest_inland(write("ok.asc", kInlandAsc).c_str(), 0.0, 25, &map),
            FS_E_ARGUMENT);
  EXPECT_EQ(fs_flood_map_load(nullptr, &map), FS_E_ARGUMENT);
  EXPECT_NE(std::string(fs_last_error()).find("bfm_path"), std::string::npos);
  EXPECT_EQ(fs_query(nullptr, nullptr, 0, 0, nullptr), FS_E_ARGUMENT);
  fs_model* model = nullptr;
  EXPECT_EQ(fs_model_load(write("junk.cgk", "CGK2").c_str(), &model), FS_E_DECODE);
  EXPECT_EQ(model, nullptr);
  EXPECT_STREQ(fs_status_name(FS_E_EXTENT), "outside extent");
  fs_flood_map_free(nullptr);
  fs_region_free(nullptr);
  fs_model_free(nullptr);
  fs_server_free(nullptr);
}

TEST_F(CApi, LastErrorIsPerThread) {
  fs_flood_map* map = nullptr;
  ASSERT_EQ(fs_flood_map_load(path("missing.bfm").c_str(), &map), FS_E_IO);
  const std::string mine = fs_last_error();
  std::string theirs = "unset";
  std::thread([&] { theirs = fs_last_error(); }).join();
  EXPECT_EQ(theirs, "");
  EXPECT_EQ(fs_last_error(), mine);
}

TEST_F(CApi, TrainTranslateEvaluateAndResume) {
  const auto data = path("data");
  ASSERT_EQ(fs_make_synthetic(data.c_str(), 3, 2, 16, 4), FS_OK) << fs_last_error();
  const auto cfg = write("t.conf",
                         "image_size = 16\nbase_width = 2\nn_res_blocks = 1\n"
                         "epochs_total = 2\nepochs_constant = 1\n");
  int epochs_seen = 0;
  fs_train_options o{};
  o.data_dir = data.c_str();
  o.config_path = cfg.c_str();
  const auto ckpt = path("m.cgk");
  const auto csv = path("m.csv");
  o.checkpoint_path = ckpt.c_str();
  o.metrics_path = csv.c_str();
  o.on_epoch = [](const fs_epoch_metrics* m, void* user) {
    EXPECT_EQ(m->epoch, static_cast<uint32_t>(*static_cast<int*>(user)));
    ++*static_cast<int*>(user);
  };
  o.user = &epochs_seen;
  ASSERT_EQ(fs_train(&o), FS_OK) << fs_last_error();
  EXPECT_EQ(epochs_seen, 2);
  EXPECT_TRUE(fs::exists(csv));

  fs_model* model = nullptr;
  ASSERT_EQ(fs_model_load(ckpt.c_str(), &model), FS_OK);
  fs_model_info info{};
  ASSERT_EQ(fs_model_get_info(model, &info), FS_OK);
  EXPECT_EQ(info.image_size, 16u);
  EXPECT_EQ(info.epoch, 2u);
  EXPECT_EQ(info.epochs_total, 2u);

  const auto in = (fs::path(data) / "testX").string();
  const auto first = fs::directory_iterator(in)->path().string();
  EXPECT_EQ(fs_translate_file(model, first.c_str(), path("o.png").c_str(), FS_X_TO_Y), FS_OK);
  EXPECT_TRUE(fs::exists(path("o.png")));
  EXPECT_EQ(fs_translate_file(model, first.c_str(), path("o.png").c_str(),
                              static_cast<fs_direction>(7)),
            FS_E_ARGUMENT);

  fs_eval_result r{};
  ASSERT_EQ(fs_evaluate(model, data.c_str(), &r), FS_OK) << fs_last_error();
  EXPECT_EQ(r.n_test_x, 2u);
  EXPECT_EQ(r.n_test_y, 2u);
  EXPECT_GE(r.success_rate, 0.0);
  EXPECT_LE(r.success_rate, 1.0);
  EXPECT_GT(r.cycle_loss, 0.0);
  fs_model_free(model);

  // Resuming a finished run is a no-op that rewrites the same checkpoint.
  fs_train_options again{};
  again.data_dir = data.c_str();
  again.resume_path = ckpt.c_str();
  const auto ckpt2 = path("m2.cgk");
  again.checkpoint_path = ckpt2.c_str();
  ASSERT_EQ(fs_train(&again), FS_OK) << fs_last_error();
  std::ifstream a(ckpt, std::ios::binary), b(ckpt2, std::ios::binary);
  EXPECT_EQ(std::string(std::istreambuf_iterator<char>(a), {}),
            std::string(std::istreambuf_iterator<char>(b), {}));

  const auto other = write("o.conf", "image_size = 16\nbase_width = 4\nepochs_total = 2\n"
                                     "epochs_constant = 1\n");
  again.config_path = other.c_str();
  EXPECT_EQ(fs_train(&again), FS_E_ARGUMENT);
  fs_train_options none{};
  none.data_dir = data.c_str();
  none.checkpoint_path = ckpt2.c_str();
  EXPECT_EQ(fs_train(&none), FS_E_ARGUMENT);
}

TEST_F(CApi, ServerCreateFailsCleanly) {
  fs_server* server = nullptr;
  EXPECT_EQ(fs_server_create(path("nope.conf").c_str(), &server), FS_E_IO);
  EXPECT_EQ(server, nullptr);
  EXPECT_EQ(fs_server_create(write("s.conf", "colour = red\n").c_str(), &server), FS_E_PARSE);
  EXPECT_EQ(fs_server_create(write("s2.conf", "geocoder = fixture\n").c_str(), &server),
            FS_E_ARGUMENT);
}

}  // namespace
