// Copyright 2026 The mlal Authors
// SPDX-License-Identifier: Apache-2.0

#include "mlal/mlal.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <new>
#include <sstream>
#include <string>

#include <json.hpp>

#include "core/error.hpp"
#include "data/data.hpp"
#include "engine/config.hpp"
#include "engine/engine.hpp"
#include "report/report.hpp"
#include "service/annotation_service.hpp"

struct mlal_config {
  mlal::ConfigDocument doc;
};

struct mlal_dataset {
  mlal::DatasetPool pool;
};

struct mlal_engine {
  mlal::ALState state;
};

struct mlal_server {
  mlal::service::AnnotationService service;
};

namespace {

thread_local std::string g_last_error;

mlal_status to_status(mlal::ErrorCode code) {
  switch (code) {
    case mlal::ErrorCode::kInvalidArgument: return MLAL_ERR_INVALID_ARGUMENT;
    case mlal::ErrorCode::kConfig: return MLAL_ERR_CONFIG;
    case mlal::ErrorCode::kData: return MLAL_ERR_DATA;
    case mlal::ErrorCode::kState: return MLAL_ERR_STATE;
    case mlal::ErrorCode::kIo: return MLAL_ERR_IO;
    case mlal::ErrorCode::kRuntime: return MLAL_ERR_RUNTIME;
  }
  return MLAL_ERR_RUNTIME;
}

template <class Fn>
mlal_status guarded(Fn&& fn) {
  try {
    g_last_error.clear();
    return fn();
  } catch (const mlal::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return MLAL_ERR_RUNTIME;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return MLAL_ERR_RUNTIME;
  }
}

mlal_status null_argument(const char* what) {
  g_last_error = std::string(what) + " must not be NULL";
  return MLAL_ERR_INVALID_ARGUMENT;
}

char* duplicate(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

mlal::LabelMap parse_labels(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    mlal::fail(mlal::ErrorCode::kInvalidArgument, std::string("labels are not valid JSON: ") + e.what());
  }
  if (j.is_object() && j.contains("labels")) j = j["labels"];
  mlal::require(j.is_object(), mlal::ErrorCode::kInvalidArgument, "labels must be a JSON object");
  mlal::LabelMap labels;
  for (auto& [id, v] : j.items()) {
    mlal::require(v.is_array(), mlal::ErrorCode::kInvalidArgument, id + ": label must be an array");
    mlal::LabelVector y;
    for (const auto& e : v) {
      mlal::require(e.is_number_integer() && (e.get<int>() == 0 || e.get<int>() == 1),
                    mlal::ErrorCode::kInvalidArgument, id + ": label entries must be 0 or 1");
      y.push_back(static_cast<std::uint8_t>(e.get<int>()));
    }
    labels.emplace(id, std::move(y));
  }
  return labels;
}

}  // namespace

extern "C" {

const char* mlal_version(void) { return "1.0.0"; }

const char* mlal_last_error(void) { return g_last_error.c_str(); }

const char* mlal_status_name(mlal_status status) {
  switch (status) {
    case MLAL_OK: return "ok";
    case MLAL_ERR_INVALID_ARGUMENT: return "invalid argument";
    case MLAL_ERR_CONFIG: return "config error";
    case MLAL_ERR_DATA: return "data error";
    case MLAL_ERR_STATE: return "state error";
    case MLAL_ERR_IO: return "i/o error";
    case MLAL_ERR_RUNTIME: return "runtime error";
    case MLAL_EXHAUSTED: return "exhausted";
  }
  return "unknown";
}

void mlal_string_free(char* str) { std::free(str); }

mlal_status mlal_config_parse(const char* text, mlal_config** out) {
  if (!text || !out) return null_argument("text and out");
  return guarded([&] {
    *out = new mlal_config{mlal::ConfigDocument::parse(text)};
    return MLAL_OK;
  });
}

mlal_status mlal_config_load(const char* path, mlal_config** out) {
  if (!path || !out) return null_argument("path and out");
  return guarded([&] {
    *out = new mlal_config{mlal::ConfigDocument::load(path)};
    return MLAL_OK;
  });
}

mlal_status mlal_config_override(mlal_config* config, const char* assignment) {
  if (!config || !assignment) return null_argument("config and assignment");
  return guarded([&] {
    config->doc.apply_override(assignment);
    return MLAL_OK;
  });
}

mlal_status mlal_config_validate(const mlal_config* config) {
  if (!config) return null_argument("config");
  return guarded([&] {
    (void)config->doc.to_config();
    return MLAL_OK;
  });
}

mlal_status mlal_config_seeds(const mlal_config* config, uint64_t* seeds, size_t capacity, size_t* count) {
  if (!config || !count) return null_argument("config and count");
  return guarded([&] {
    const auto cfg = config->doc.to_config();
    *count = cfg.seeds.size();
    for (size_t i = 0; i < cfg.seeds.size() && i < capacity && seeds; ++i) seeds[i] = cfg.seeds[i];
    return MLAL_OK;
  });
}

void mlal_config_free(mlal_config* config) { delete config; }

mlal_status mlal_dataset_from_config(const mlal_config* config, mlal_dataset** out) {
  if (!config || !out) return null_argument("config and out");
  return guarded([&] {
    *out = new mlal_dataset{mlal::load_dataset(config->doc.to_config())};
    return MLAL_OK;
  });
}

mlal_status mlal_dataset_load_csv(const char* features_path, const char* labels_path, const char* splits_path,
                                  uint64_t seed, mlal_dataset** out) {
  if (!features_path || !labels_path || !out) return null_argument("paths and out");
  return guarded([&] {
    std::optional<std::filesystem::path> splits;
    if (splits_path) splits = splits_path;
    *out = new mlal_dataset{mlal::data::load_csv(features_path, labels_path, splits, seed)};
    return MLAL_OK;
  });
}

mlal_status mlal_dataset_save_csv(const mlal_dataset* dataset, const char* dir) {
  if (!dataset || !dir) return null_argument("dataset and dir");
  return guarded([&] {
    mlal::data::save_csv(dataset->pool, dir);
    return MLAL_OK;
  });
}

size_t mlal_dataset_size(const mlal_dataset* dataset) { return dataset ? dataset->pool.samples.size() : 0; }
size_t mlal_dataset_num_classes(const mlal_dataset* dataset) { return dataset ? dataset->pool.num_classes : 0; }
size_t mlal_dataset_feature_dim(const mlal_dataset* dataset) { return dataset ? dataset->pool.feature_dim : 0; }
void mlal_dataset_free(mlal_dataset* dataset) { delete dataset; }

mlal_status mlal_engine_create(const mlal_config* config, const mlal_dataset* dataset, uint64_t seed,
                               mlal_engine** out) {
  if (!config || !dataset || !out) return null_argument("config, dataset and out");
  return guarded([&] {
    *out = new mlal_engine{mlal::make_initial_state(config->doc.to_config(), dataset->pool, seed)};
    return MLAL_OK;
  });
}

mlal_status mlal_engine_step(mlal_engine* engine) {
  if (!engine) return null_argument("engine");
  return guarded([&] {
    if (mlal::is_finished(engine->state)) return MLAL_EXHAUSTED;
    return mlal::run_iteration(engine->state) == mlal::IterationOutcome::kExhausted ? MLAL_EXHAUSTED : MLAL_OK;
  });
}

mlal_status mlal_engine_run(mlal_engine* engine) {
  if (!engine) return null_argument("engine");
  return guarded([&] {
    mlal::run_to_completion(engine->state);
    return MLAL_OK;
  });
}

int mlal_engine_finished(const mlal_engine* engine) { return engine && mlal::is_finished(engine->state) ? 1 : 0; }
uint64_t mlal_engine_iteration(const mlal_engine* engine) { return engine ? engine->state.tau : 0; }
size_t mlal_engine_labeled_count(const mlal_engine* engine) { return engine ? engine->state.pool.labeled.size() : 0; }
size_t mlal_engine_unlabeled_count(const mlal_engine* engine) {
  return engine ? engine->state.pool.unlabeled.size() : 0;
}

mlal_status mlal_engine_pending_json(const mlal_engine* engine, char** out_json) {
  if (!engine || !out_json) return null_argument("engine and out_json");
  return guarded([&] {
    nlohmann::ordered_json j;
    const auto& pending = engine->state.pending;
    if (!pending) {
      j = {{"status", mlal::is_finished(engine->state) ? "complete" : "idle"}};
    } else {
      std::vector<std::string> received;
      for (const auto& [id, y] : pending->received) received.push_back(id);
      j = {{"status", "pending"}, {"iteration", pending->iteration}, {"ids", pending->ids}, {"received", received}};
    }
    *out_json = duplicate(j.dump());
    return MLAL_OK;
  });
}

mlal_status mlal_engine_submit_labels_json(mlal_engine* engine, const char* labels_json, char** out_json) {
  if (!engine || !labels_json) return null_argument("engine and labels_json");
  return guarded([&] {
    const auto result = mlal::submit_labels(engine->state, parse_labels(labels_json));
    if (out_json) {
      nlohmann::ordered_json j{{"status", "ok"},
                               {"accepted", result.accepted},
                               {"remaining", result.remaining},
                               {"resolved", result.resolved},
                               {"iteration", engine->state.tau}};
      *out_json = duplicate(j.dump());
    }
    return MLAL_OK;
  });
}

mlal_status mlal_engine_history_csv(const mlal_engine* engine, char** out_csv) {
  if (!engine || !out_csv) return null_argument("engine and out_csv");
  return guarded([&] {
    std::ostringstream out;
    mlal::write_history_csv(out, engine->state.history);
    *out_csv = duplicate(out.str());
    return MLAL_OK;
  });
}

mlal_status mlal_engine_selection_csv(const mlal_engine* engine, char** out_csv) {
  if (!engine || !out_csv) return null_argument("engine and out_csv");
  return guarded([&] {
    std::ostringstream out;
    mlal::write_selection_csv(out, engine->state.selections);
    *out_csv = duplicate(out.str());
    return MLAL_OK;
  });
}

mlal_status mlal_engine_save_checkpoint(const mlal_engine* engine, const char* path) {
  if (!engine || !path) return null_argument("engine and path");
  return guarded([&] {
    std::ofstream out(path, std::ios::binary);
    if (!out) mlal::fail(mlal::ErrorCode::kIo, std::string("cannot write ") + path);
    out << mlal::save_checkpoint(engine->state);
    return MLAL_OK;
  });
}

mlal_status mlal_engine_load_checkpoint(const char* path, mlal_engine** out) {
  if (!path || !out) return null_argument("path and out");
  return guarded([&] {
    std::ifstream in(path, std::ios::binary);
    if (!in) mlal::fail(mlal::ErrorCode::kIo, std::string("cannot open ") + path);
    std::stringstream ss;
    ss << in.rdbuf();
    *out = new mlal_engine{mlal::load_checkpoint(ss.str())};
    return MLAL_OK;
  });
}

void mlal_engine_free(mlal_engine* engine) { delete engine; }

mlal_status mlal_run(const mlal_config* config, const mlal_dataset* dataset, const char* out_dir) {
  if (!config || !dataset || !out_dir) return null_argument("config, dataset and out_dir");
  return guarded([&] {
    mlal::report::run_and_write(config->doc.to_config(), dataset->pool, out_dir);
    return MLAL_OK;
  });
}

mlal_status mlal_report(const char* dir, char** out_table_csv) {
  if (!dir) return null_argument("dir");
  return guarded([&] {
    const std::string table = mlal::report::write_report(dir);
    if (out_table_csv) *out_table_csv = duplicate(table);
    return MLAL_OK;
  });
}

mlal_status mlal_server_create(mlal_engine* engine, int thumbnails, mlal_server** out) {
  if (!engine || !out) return null_argument("engine and out");
  return guarded([&] {
    auto* server = new mlal_server{};
    server->service.load(std::move(engine->state), thumbnails != 0);
    delete engine;
    *out = server;
    return MLAL_OK;
  });
}

mlal_status mlal_server_set_ui_dir(mlal_server* server, const char* dir) {
  if (!server || !dir) return null_argument("server and dir");
  return guarded([&] {
    mlal::require(std::filesystem::is_directory(dir), mlal::ErrorCode::kIo, std::string(dir) + " is not a directory");
    server->service.set_ui_dir(dir);
    return MLAL_OK;
  });
}

mlal_status mlal_server_listen(mlal_server* server, const char* bind, int port) {
  if (!server || !bind) return null_argument("server and bind");
  return guarded([&] {
    if (!server->service.listen(bind, port)) {
      mlal::fail(mlal::ErrorCode::kIo, std::string("cannot listen on ") + bind + ":" + std::to_string(port));
    }
    return MLAL_OK;
  });
}

void mlal_server_stop(mlal_server* server) {
  if (server) server->service.stop();
}

void mlal_server_free(mlal_server* server) { delete server; }

}  // extern "C"
