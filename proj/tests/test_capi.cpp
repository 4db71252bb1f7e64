// Copyright 2026 The mlal Authors
// SPDX-License-Identifier: Apache-2.0

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "mlal/mlal.h"

namespace fs = std::filesystem;

namespace {

const char* kSmall = R"(
[experiment]
seeds = [3, 4]
initial_labeled = 6
max_iterations = 2
[query]
budget = 4
[train]
epochs = 3
[model]
hidden = [8]
[data]
pool_size = 40
val_size = 5
test_size = 20
)";

std::string take(char* s) {
  std::string out = s ? s : "";
  mlal_string_free(s);
  return out;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("mlal_test_capi_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("status names and errors") {
  CHECK(std::strlen(mlal_version()) > 0);
  CHECK(std::string(mlal_status_name(MLAL_OK)) == "ok");
  mlal_config* cfg = nullptr;
  CHECK(mlal_config_parse("[query]\nbudget = 0\n", &cfg) == MLAL_OK);
  CHECK(mlal_config_validate(cfg) == MLAL_ERR_CONFIG);
  CHECK(std::string(mlal_last_error()).find("budget") != std::string::npos);
  CHECK(mlal_config_override(cfg, "query.budget=3") == MLAL_OK);
  CHECK(mlal_config_validate(cfg) == MLAL_OK);
  CHECK(mlal_config_override(cfg, "query.unknown=3") == MLAL_ERR_CONFIG);
  mlal_config_free(cfg);
  CHECK(mlal_config_parse(nullptr, &cfg) == MLAL_ERR_INVALID_ARGUMENT);
  CHECK(mlal_config_load("/nonexistent/mlal.toml", &cfg) == MLAL_ERR_IO);
}

TEST_CASE("oracle engine through the C API") {
  mlal_config* cfg = nullptr;
  REQUIRE(mlal_config_parse(kSmall, &cfg) == MLAL_OK);
  uint64_t seeds[4];
  size_t count = 0;
  REQUIRE(mlal_config_seeds(cfg, seeds, 4, &count) == MLAL_OK);
  CHECK(count == 2);
  CHECK(seeds[1] == 4);

  mlal_dataset* data = nullptr;
  REQUIRE(mlal_dataset_from_config(cfg, &data) == MLAL_OK);
  CHECK(mlal_dataset_size(data) == 65);
  CHECK(mlal_dataset_num_classes(data) == 5);
  CHECK(mlal_dataset_feature_dim(data) == 16);

  mlal_engine* engine = nullptr;
  REQUIRE(mlal_engine_create(cfg, data, 3, &engine) == MLAL_OK);
  CHECK(mlal_engine_iteration(engine) == 1);
  CHECK(mlal_engine_labeled_count(engine) == 6);
  CHECK(mlal_engine_step(engine) == MLAL_OK);
  CHECK(mlal_engine_labeled_count(engine) == 10);

  const fs::path dir = scratch("ckpt");
  const std::string ckpt = (dir / "state.json").string();
  REQUIRE(mlal_engine_save_checkpoint(engine, ckpt.c_str()) == MLAL_OK);

  CHECK(mlal_engine_step(engine) == MLAL_OK);
  CHECK(mlal_engine_step(engine) == MLAL_EXHAUSTED);
  CHECK(mlal_engine_finished(engine) == 1);
  char* csv = nullptr;
  REQUIRE(mlal_engine_history_csv(engine, &csv) == MLAL_OK);
  const std::string history = take(csv);

  mlal_engine* resumed = nullptr;
  REQUIRE(mlal_engine_load_checkpoint(ckpt.c_str(), &resumed) == MLAL_OK);
  CHECK(mlal_engine_run(resumed) == MLAL_OK);
  REQUIRE(mlal_engine_history_csv(resumed, &csv) == MLAL_OK);
  CHECK(take(csv) == history);

  REQUIRE(mlal_engine_selection_csv(resumed, &csv) == MLAL_OK);
  CHECK(take(csv).rfind("iteration,sample_id,strategy,score\n", 0) == 0);

  mlal_engine_free(resumed);
  mlal_engine_free(engine);
  mlal_dataset_free(data);
  mlal_config_free(cfg);
}

TEST_CASE("human labeling through the C API") {
  mlal_config* cfg = nullptr;
  REQUIRE(mlal_config_parse(kSmall, &cfg) == MLAL_OK);
  REQUIRE(mlal_config_override(cfg, "experiment.oracle=false") == MLAL_OK);
  mlal_dataset* data = nullptr;
  REQUIRE(mlal_dataset_from_config(cfg, &data) == MLAL_OK);

  // ground truth comes from the saved dataset
  const fs::path dir = scratch("human");
  REQUIRE(mlal_dataset_save_csv(data, dir.string().c_str()) == MLAL_OK);
  mlal_dataset* reloaded = nullptr;
  REQUIRE(mlal_dataset_load_csv((dir / "features.csv").string().c_str(), (dir / "labels.csv").string().c_str(),
                                (dir / "splits.csv").string().c_str(), 0, &reloaded) == MLAL_OK);
  CHECK(mlal_dataset_size(reloaded) == mlal_dataset_size(data));
  mlal_dataset_free(reloaded);

  mlal_engine* engine = nullptr;
  REQUIRE(mlal_engine_create(cfg, data, 3, &engine) == MLAL_OK);
  char* json = nullptr;
  REQUIRE(mlal_engine_pending_json(engine, &json) == MLAL_OK);
  CHECK(nlohmann::json::parse(take(json))["status"] == "idle");

  CHECK(mlal_engine_step(engine) == MLAL_OK);
  REQUIRE(mlal_engine_pending_json(engine, &json) == MLAL_OK);
  const auto pending = nlohmann::json::parse(take(json));
  CHECK(pending["status"] == "pending");
  REQUIRE(pending["ids"].size() == 4);
  CHECK(mlal_engine_step(engine) == MLAL_ERR_STATE);

  const std::string first = pending["ids"][0];
  const std::string zero = "{\"" + first + "\": [0,0,0,0,0]}";
  CHECK(mlal_engine_submit_labels_json(engine, zero.c_str(), nullptr) == MLAL_ERR_INVALID_ARGUMENT);
  CHECK(std::string(mlal_last_error()).find(first) != std::string::npos);
  CHECK(mlal_engine_submit_labels_json(engine, "{broken", nullptr) == MLAL_ERR_INVALID_ARGUMENT);

  nlohmann::json labels = nlohmann::json::object();
  for (const auto& id : pending["ids"]) labels[id.get<std::string>()] = {1, 0, 0, 0, 0};
  REQUIRE(mlal_engine_submit_labels_json(engine, labels.dump().c_str(), &json) == MLAL_OK);
  const auto ack = nlohmann::json::parse(take(json));
  CHECK(ack["resolved"] == true);
  CHECK(ack["remaining"] == 0);
  CHECK(mlal_engine_iteration(engine) == 2);

  mlal_engine_free(engine);
  mlal_dataset_free(data);
  mlal_config_free(cfg);
}

TEST_CASE("batch run and report through the C API") {
  mlal_config* cfg = nullptr;
  REQUIRE(mlal_config_parse(kSmall, &cfg) == MLAL_OK);
  mlal_dataset* data = nullptr;
  REQUIRE(mlal_dataset_from_config(cfg, &data) == MLAL_OK);
  const fs::path dir = scratch("run");
  REQUIRE(mlal_run(cfg, data, dir.string().c_str()) == MLAL_OK);
  CHECK(fs::exists(dir / "summary.csv"));
  CHECK(fs::exists(dir / "history_seed3.csv"));
  CHECK(fs::exists(dir / "history_seed4.csv"));
  char* table = nullptr;
  REQUIRE(mlal_report(dir.string().c_str(), &table) == MLAL_OK);
  CHECK(take(table).rfind("num_labeled,MGE+Clustering\n", 0) == 0);
  CHECK(mlal_report((dir / "missing").string().c_str(), &table) != MLAL_OK);
  mlal_dataset_free(data);
  mlal_config_free(cfg);
}

TEST_CASE("server handle") {
  mlal_config* cfg = nullptr;
  REQUIRE(mlal_config_parse(kSmall, &cfg) == MLAL_OK);
  mlal_dataset* data = nullptr;
  REQUIRE(mlal_dataset_from_config(cfg, &data) == MLAL_OK);
  mlal_engine* engine = nullptr;
  REQUIRE(mlal_engine_create(cfg, data, 3, &engine) == MLAL_OK);
  mlal_server* server = nullptr;
  REQUIRE(mlal_server_create(engine, 0, &server) == MLAL_OK);
  CHECK(mlal_server_listen(server, "256.1.1.1", 1) != MLAL_OK);
  mlal_server_free(server);
  mlal_dataset_free(data);
  mlal_config_free(cfg);
}
