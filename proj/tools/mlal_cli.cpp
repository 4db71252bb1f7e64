// Copyright 2026 The mlal Authors
// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end over the C API: dataset generation, oracle
// benchmark runs, the interactive annotation server, and reports.

#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mlal/mlal.h"

namespace {

enum Exit { kOk = 0, kUsage = 1, kDataError = 2, kRuntimeError = 3 };

int exit_code_for(mlal_status status) {
  switch (status) {
    case MLAL_OK:
    case MLAL_EXHAUSTED:
      return kOk;
    case MLAL_ERR_INVALID_ARGUMENT:
    case MLAL_ERR_CONFIG:
      return kUsage;
    case MLAL_ERR_DATA:
    case MLAL_ERR_IO:
      return kDataError;
    default:
      return kRuntimeError;
  }
}

struct Failure {
  int code;
};

void check(mlal_status status, const char* what) {
  if (status == MLAL_OK) return;
  std::cerr << "mlal: " << what << ": " << mlal_last_error() << " (" << mlal_status_name(status) << ")\n";
  throw Failure{exit_code_for(status)};
}

struct ConfigDeleter {
  void operator()(mlal_config* c) const { mlal_config_free(c); }
};
struct DatasetDeleter {
  void operator()(mlal_dataset* d) const { mlal_dataset_free(d); }
};
struct ServerDeleter {
  void operator()(mlal_server* s) const { mlal_server_free(s); }
};
using ConfigPtr = std::unique_ptr<mlal_config, ConfigDeleter>;
using DatasetPtr = std::unique_ptr<mlal_dataset, DatasetDeleter>;
using ServerPtr = std::unique_ptr<mlal_server, ServerDeleter>;

struct CommonOptions {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir;
};

ConfigPtr load_config(const CommonOptions& opts) {
  mlal_config* raw = nullptr;
  if (opts.config_path.empty()) {
    check(mlal_config_parse("", &raw), "default config");
  } else {
    check(mlal_config_load(opts.config_path.c_str(), &raw), "loading config");
  }
  ConfigPtr config(raw);
  for (const auto& o : opts.overrides) check(mlal_config_override(config.get(), o.c_str()), "override");
  check(mlal_config_validate(config.get()), "config");
  return config;
}

DatasetPtr load_dataset(const mlal_config* config) {
  mlal_dataset* raw = nullptr;
  check(mlal_dataset_from_config(config, &raw), "dataset");
  return DatasetPtr(raw);
}

void add_common(CLI::App* cmd, CommonOptions& opts, bool needs_out) {
  cmd->add_option("--config", opts.config_path, "Experiment config (TOML-style)")->check(CLI::ExistingFile);
  cmd->add_option("--override", opts.overrides, "section.key=value, repeatable")->take_all();
  auto* out = cmd->add_option("--out", opts.out_dir, "Output directory");
  if (needs_out) out->required();
}

mlal_server* g_server = nullptr;

extern "C" void handle_signal(int) {
  if (g_server) mlal_server_stop(g_server);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-label active learning engine"};
  app.require_subcommand(1);

  CommonOptions gen_opts, run_opts, serve_opts;
  auto* gen = app.add_subcommand("generate-data", "Write the configured dataset as CSV files");
  add_common(gen, gen_opts, true);

  auto* run = app.add_subcommand("run", "Run the oracle-mode experiment for every configured seed");
  add_common(run, run_opts, true);

  auto* serve = app.add_subcommand("serve", "Serve an interactive labeling session over HTTP");
  add_common(serve, serve_opts, false);
  std::string bind = "127.0.0.1";
  int port = 8080;
  std::string ui_dir;
  bool thumbnails = false;
  serve->add_option("--bind", bind, "Bind address");
  serve->add_option("--port", port, "Port")->check(CLI::Range(0, 65535));
  serve->add_option("--ui", ui_dir, "Directory of static UI assets")->check(CLI::ExistingDirectory);
  serve->add_flag("--thumbnails", thumbnails, "Send feature heatmap PNGs instead of raw features");

  std::string report_dir;
  auto* report = app.add_subcommand("report", "Merge run summaries into comparison tables and plots");
  report->add_option("--out,dir", report_dir, "Directory holding one or more runs")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*gen) {
      auto config = load_config(gen_opts);
      auto dataset = load_dataset(config.get());
      check(mlal_dataset_save_csv(dataset.get(), gen_opts.out_dir.c_str()), "writing dataset");
      std::cout << gen_opts.out_dir << "/features.csv\n"
                << gen_opts.out_dir << "/labels.csv\n"
                << gen_opts.out_dir << "/splits.csv\n";
    } else if (*run) {
      auto config = load_config(run_opts);
      auto dataset = load_dataset(config.get());
      check(mlal_run(config.get(), dataset.get(), run_opts.out_dir.c_str()), "run");
      std::ifstream summary(run_opts.out_dir + "/summary.csv");
      std::cout << summary.rdbuf();
    } else if (*serve) {
      auto config = load_config(serve_opts);
      check(mlal_config_override(config.get(), "experiment.oracle=false"), "config");
      auto dataset = load_dataset(config.get());
      std::uint64_t seed = 0;
      std::size_t count = 0;
      check(mlal_config_seeds(config.get(), &seed, 1, &count), "config");
      mlal_engine* engine = nullptr;
      check(mlal_engine_create(config.get(), dataset.get(), seed, &engine), "engine");
      mlal_server* raw = nullptr;
      check(mlal_server_create(engine, thumbnails ? 1 : 0, &raw), "server");
      ServerPtr server(raw);
      if (!ui_dir.empty()) check(mlal_server_set_ui_dir(server.get(), ui_dir.c_str()), "ui");
      g_server = server.get();
      std::signal(SIGINT, handle_signal);
      std::signal(SIGTERM, handle_signal);
      std::cerr << "mlal: serving on http://" << bind << ":" << port << "\n";
      check(mlal_server_listen(server.get(), bind.c_str(), port), "serve");
      g_server = nullptr;
    } else if (*report) {
      char* table = nullptr;
      check(mlal_report(report_dir.c_str(), &table), "report");
      std::cout << table;
      mlal_string_free(table);
    }
  } catch (const Failure& f) {
    return f.code;
  }
  return kOk;
}
