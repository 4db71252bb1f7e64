// Copyright 2026 The mlal Authors
// SPDX-License-Identifier: Apache-2.0

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"

namespace fs = std::filesystem;

namespace {

struct Result {
  int exit_code = -1;
  std::string out;
};

Result run(const std::string& args) {
  const std::string cmd = std::string(MLAL_CLI_PATH) + " " + args + " 2>/dev/null";
  Result r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("mlal_test_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

const char* kQuick =
    " --override experiment.seeds=[1,2] --override experiment.max_iterations=2"
    " --override train.epochs=3 --override data.pool_size=60 --override data.test_size=40";

}  // namespace

TEST_CASE("run writes artifacts and prints the summary") {
  const fs::path dir = scratch("run");
  const auto r = run("run --config " MLAL_SOURCE_DIR "/configs/reference.toml --override query.uncertainty=TPD" +
                     std::string(kQuick) + " --out " + dir.string());
  CHECK(r.exit_code == 0);
  CHECK(r.out.rfind("iteration,num_labeled,micro_f1,macro_f1\n", 0) == 0);
  CHECK(fs::exists(dir / "history_seed1.csv"));
  CHECK(fs::exists(dir / "history_seed2.csv"));
  CHECK(fs::exists(dir / "summary.csv"));
  std::ifstream manifest(dir / "run.json");
  std::stringstream text;
  text << manifest.rdbuf();
  CHECK(text.str().find("\"TPD+Clustering\"") != std::string::npos);
}

TEST_CASE("generate-data then run on the CSV export") {
  const fs::path dir = scratch("csv");
  CHECK(run("generate-data --override data.pool_size=40 --out " + (dir / "data").string()).exit_code == 0);
  CHECK(fs::exists(dir / "data" / "features.csv"));
  const auto r = run("run --override data.source=csv --override data.features=" + (dir / "data" / "features.csv").string() +
                     " --override data.labels=" + (dir / "data" / "labels.csv").string() +
                     " --override data.splits=" + (dir / "data" / "splits.csv").string() + kQuick +
                     " --out " + (dir / "out").string());
  CHECK(r.exit_code == 0);
}

TEST_CASE("report merges runs") {
  const fs::path dir = scratch("report");
  for (const char* s : {"MGE", "RANDOM"}) {
    REQUIRE(run(std::string("run --override query.uncertainty=") + s + kQuick + " --out " + (dir / s).string())
                .exit_code == 0);
  }
  const auto r = run("report " + dir.string());
  CHECK(r.exit_code == 0);
  CHECK(r.out.rfind("num_labeled,MGE+Clustering,Random\n", 0) == 0);
  CHECK(fs::exists(dir / "report_micro_f1.svg"));
  CHECK(fs::exists(dir / "report_macro_f1.csv"));
}

TEST_CASE("exit codes") {
  CHECK(run("").exit_code == 1);
  CHECK(run("frobnicate").exit_code == 1);
  CHECK(run("run --override query.nonsense=1").exit_code == 1);
  CHECK(run("run --override query.budget=0").exit_code == 1);
  CHECK(run("run --config /nonexistent.toml").exit_code == 1);
  const fs::path dir = scratch("codes");
  std::ofstream(dir / "f.csv") << "id,x\na,1\n";
  std::ofstream(dir / "l.csv") << "id,c\na,7\n";
  CHECK(run("run --override data.source=csv --override data.features=" + (dir / "f.csv").string() +
            " --override data.labels=" + (dir / "l.csv").string() + " --out " + (dir / "o").string())
            .exit_code == 2);
  CHECK(run("report " + (dir / "nothing").string()).exit_code == 2);
  CHECK(run("--help").exit_code == 0);
}
