// Copyright 2026 The mlal Authors
// SPDX-License-Identifier: Apache-2.0

#include <sstream>
#include <thread>

#include "doctest.h"
#include "engine/config.hpp"
#include "engine/engine.hpp"
#include "httplib.h"
#include "json.hpp"
#include "service/annotation_service.hpp"

using namespace mlal;
using Json = nlohmann::json;

namespace {

struct Fixture {
  DatasetPool original;
  ALState state;
};

Fixture interactive(int budget = 5, int iterations = 3) {
  auto doc = ConfigDocument::parse(R"(
[experiment]
seeds = [2]
initial_labeled = 8
oracle = false
[train]
epochs = 4
[model]
hidden = [8]
[data]
pool_size = 60
val_size = 5
test_size = 30
)");
  doc.set("query.budget", std::to_string(budget));
  doc.set("experiment.max_iterations", std::to_string(iterations));
  const auto cfg = doc.to_config();
  Fixture f;
  f.original = load_dataset(cfg);
  f.state = make_initial_state(cfg, f.original, 2);
  return f;
}

Json body(const service::Response& r) { return Json::parse(r.body); }

std::string labels_json(const DatasetPool& original, const std::vector<std::string>& ids) {
  Json j = Json::object();
  for (const auto& id : ids) j[id] = *original.at(id).true_labels;
  return j.dump();
}

std::vector<std::string> batch_ids(const Json& batch) {
  std::vector<std::string> ids;
  for (const auto& item : batch["batch"]) ids.push_back(item["id"]);
  return ids;
}

}  // namespace

TEST_CASE("no experiment loaded") {
  service::AnnotationService svc;
  const auto s = svc.session();
  CHECK(s.http_status == 404);
  CHECK(body(s)["status"] == "error");
  CHECK(svc.batch().http_status == 404);
  CHECK(body(svc.progress())["history"].empty());
  CHECK(svc.submit("{\"a\":[1]}").http_status == 404);
}

TEST_CASE("labeling a batch through the handlers") {
  auto f = interactive();
  service::AnnotationService svc(f.state);

  auto session = body(svc.session());
  CHECK(session["status"] == "ok");
  CHECK(session["iteration"] == 1);
  CHECK(session["budget"] == 5);
  CHECK(session["num_classes"] == 5);
  CHECK(session["labeled_count"] == 8);
  CHECK(body(svc.progress())["history"].empty());

  auto batch = body(svc.batch());
  CHECK(batch["status"] == "ok");
  CHECK(batch["iteration"] == 1);
  CHECK(batch["remaining"] == 5);
  REQUIRE(batch["batch"].size() == 5);
  CHECK(batch["batch"][0]["features"].size() == 16);
  const auto ids = batch_ids(batch);

  // asking again returns the same parked batch
  CHECK(batch_ids(body(svc.batch())) == ids);

  auto ack = svc.submit(labels_json(f.original, {ids[0], ids[1]}));
  CHECK(ack.http_status == 200);
  CHECK(body(ack)["remaining"] == 3);
  auto again = body(svc.batch());
  for (const auto& item : again["batch"]) {
    const bool done = item["id"] == ids[0] || item["id"] == ids[1];
    CHECK(item["already_received"] == done);
  }

  // first label wins
  auto dup = svc.submit(labels_json(f.original, {ids[0]}));
  CHECK(dup.http_status == 422);
  CHECK(body(dup)["reasons"].contains(ids[0]));

  // all-zero vector is rejected and nothing changes
  auto zero = svc.submit(Json{{ids[2], {0, 0, 0, 0, 0}}}.dump());
  CHECK(zero.http_status == 422);
  CHECK(body(zero)["remaining"] == 3);
  CHECK(body(svc.batch())["remaining"] == 3);

  CHECK(svc.submit("not json").http_status == 400);
  CHECK(svc.submit("{\"x\": \"y\"}").http_status == 422);

  ack = svc.submit(labels_json(f.original, {ids[2], ids[3], ids[4]}));
  CHECK(body(ack)["remaining"] == 0);
  CHECK(body(ack)["resolved"] == true);
  CHECK(body(ack)["iteration"] == 2);
  CHECK(body(svc.session())["iteration"] == 2);
  CHECK(body(svc.progress())["history"].size() == 1);
  CHECK(svc.submit(labels_json(f.original, {ids[0]})).http_status == 409);
}

TEST_CASE("progress matches the history CSV and the run completes") {
  auto f = interactive(5, 3);
  service::AnnotationService svc(f.state);
  for (int round = 0; round < 3; ++round) {
    const auto ids = batch_ids(body(svc.batch()));
    CHECK(body(svc.submit(labels_json(f.original, ids)))["resolved"] == true);
  }
  CHECK(body(svc.batch())["status"] == "complete");
  CHECK(body(svc.session())["finished"] == true);

  const auto history = body(svc.progress())["history"];
  REQUIRE(history.size() == 3);
  for (std::size_t i = 1; i < history.size(); ++i) {
    CHECK(history[i]["num_labeled"] > history[i - 1]["num_labeled"]);
  }

  std::ostringstream csv;
  write_history_csv(csv, svc.snapshot()->history);
  std::ostringstream rebuilt;
  rebuilt << "iteration,num_labeled,micro_f1,macro_f1\n";
  for (const auto& row : history) {
    char line[128];
    std::snprintf(line, sizeof line, "%d,%d,%.6f,%.6f\n", row["iteration"].get<int>(),
                  row["num_labeled"].get<int>(), row["micro_f1"].get<double>(), row["macro_f1"].get<double>());
    rebuilt << line;
  }
  CHECK(rebuilt.str() == csv.str());
}

TEST_CASE("thumbnails replace raw features") {
  auto f = interactive();
  service::AnnotationService svc(f.state, true);
  const auto batch = body(svc.batch());
  const auto& item = batch["batch"][0];
  CHECK_FALSE(item.contains("features"));
  CHECK(item["thumbnail"].get<std::string>().rfind("data:image/png;base64,", 0) == 0);
}

TEST_CASE("HTTP endpoints") {
  auto f = interactive(4, 2);
  service::AnnotationService svc(f.state);
  const int port = svc.bind_any_port("127.0.0.1");
  REQUIRE(port > 0);
  std::thread server([&] { svc.listen_after_bind(); });

  httplib::Client client("127.0.0.1", port);
  client.set_read_timeout(60, 0);
  for (int i = 0; i < 100 && !svc.is_running(); ++i) std::this_thread::sleep_for(std::chrono::milliseconds(10));

  auto root = client.Get("/");
  REQUIRE(root);
  CHECK(Json::parse(root->body)["endpoints"].size() == 4);

  auto session = client.Get("/api/session");
  REQUIRE(session);
  CHECK(session->status == 200);
  CHECK(Json::parse(session->body)["iteration"] == 1);

  auto batch = client.Get("/api/batch");
  REQUIRE(batch);
  const auto ids = batch_ids(Json::parse(batch->body));
  REQUIRE(ids.size() == 4);

  auto bad = client.Post("/api/labels", Json{{ids[0], {0, 0, 0, 0, 0}}}.dump(), "application/json");
  REQUIRE(bad);
  CHECK(bad->status == 422);
  CHECK(Json::parse(bad->body)["status"] == "error");

  auto ok = client.Post("/api/labels", labels_json(f.original, ids), "application/json");
  REQUIRE(ok);
  CHECK(ok->status == 200);
  CHECK(Json::parse(ok->body)["iteration"] == 2);

  auto progress = client.Get("/api/progress");
  REQUIRE(progress);
  CHECK(Json::parse(progress->body)["history"].size() == 1);

  svc.stop();
  server.join();
}
