// Copyright 2026 The mlal Authors
// SPDX-License-Identifier: Apache-2.0

#include "service/annotation_service.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include <httplib.h>
#include <json.hpp>

#include "core/error.hpp"
#include "core/rng.hpp"
#include "data/data.hpp"

namespace mlal::service {
namespace {

using Json = nlohmann::ordered_json;

Response reply(int http_status, Json body) { return {http_status, body.dump()}; }

Response error_reply(int http_status, const std::string& message, Json extra = Json::object()) {
  Json body{{"status", "error"}, {"error", message}};
  for (auto& [k, v] : extra.items()) body[k] = v;
  return reply(http_status, std::move(body));
}

// Same six-decimal rendering as the history CSV.
double as_printed(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return std::stod(buf);
}

std::string session_id_for(const ALState& state) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(derive_seed(state.seed, {0x5e55'10f1ULL})));
  return buf;
}

}  // namespace

AnnotationService::AnnotationService() { refresh_views(); }

AnnotationService::AnnotationService(ALState state, bool thumbnails) { load(std::move(state), thumbnails); }

AnnotationService::~AnnotationService() { stop(); }

void AnnotationService::load(ALState state, bool thumbnails) {
  std::lock_guard lock(state_mutex_);
  state_ = std::move(state);
  thumbnails_ = thumbnails;
  refresh_views();
}

void AnnotationService::refresh_views() {
  std::string session, progress;
  if (state_) {
    const ALState& s = *state_;
    const std::uint64_t iteration = s.pending ? s.pending->iteration : s.tau;
    session = Json{{"status", "ok"},
                   {"session_id", session_id_for(s)},
                   {"num_classes", s.pool.num_classes},
                   {"class_names", s.pool.class_names},
                   {"budget", s.config.query.budget},
                   {"iteration", iteration},
                   {"labeled_count", s.pool.labeled.size()},
                   {"unlabeled_count", s.pool.unlabeled.size()},
                   {"strategy", s.config.query.label()},
                   {"finished", is_finished(s)}}
                  .dump();
    Json history = Json::array();
    for (std::size_t i = 0; i < s.history.size(); ++i) {
      history.push_back(Json{{"iteration", i + 1},
                             {"num_labeled", s.history[i].num_labeled},
                             {"micro_f1", as_printed(s.history[i].micro_f1)},
                             {"macro_f1", as_printed(s.history[i].macro_f1)}});
    }
    progress = Json{{"status", "ok"}, {"history", history}}.dump();
  } else {
    progress = Json{{"status", "ok"}, {"history", Json::array()}}.dump();
  }
  std::lock_guard lock(view_mutex_);
  session_view_ = std::move(session);
  progress_view_ = std::move(progress);
}

Response AnnotationService::session() const {
  std::lock_guard lock(view_mutex_);
  if (session_view_.empty()) return error_reply(404, "no active experiment");
  Json body = Json::parse(session_view_);
  body["busy"] = busy_.load();
  return reply(200, std::move(body));
}

Response AnnotationService::progress() const {
  std::lock_guard lock(view_mutex_);
  return {200, progress_view_};
}

Response AnnotationService::batch() {
  std::unique_lock lock(state_mutex_, std::try_to_lock);
  if (!lock.owns_lock()) return reply(202, Json{{"status", "busy"}});
  if (!state_) return error_reply(404, "no active experiment");
  ALState& s = *state_;

  if (!s.pending) {
    if (is_finished(s)) return reply(200, Json{{"status", "complete"}, {"iteration", s.tau}});
    busy_ = true;
    try {
      const auto outcome = run_iteration(s);
      busy_ = false;
      refresh_views();
      if (outcome != IterationOutcome::kAwaitingLabels) {
        return reply(200, Json{{"status", "complete"}, {"iteration", s.tau}});
      }
    } catch (const std::exception& e) {
      busy_ = false;
      return error_reply(500, e.what());
    }
  }

  const PendingBatch& pending = *s.pending;
  Json items = Json::array();
  for (const auto& id : pending.ids) {
    const Sample& sample = s.pool.at(id);
    Json item{{"id", id}};
    if (thumbnails_) {
      item["thumbnail"] = "data:image/png;base64," +
                          httplib::detail::base64_encode(data::render_feature_strip_png(sample.features));
    } else {
      item["features"] = sample.features;
    }
    item["already_received"] = pending.received.count(id) > 0;
    items.push_back(std::move(item));
  }
  return reply(200, Json{{"status", "ok"},
                         {"iteration", pending.iteration},
                         {"remaining", pending.remaining()},
                         {"batch", std::move(items)}});
}

Response AnnotationService::submit(const std::string& body) {
  Json payload;
  try {
    payload = Json::parse(body);
  } catch (const Json::parse_error& e) {
    return error_reply(400, std::string("request body is not valid JSON: ") + e.what());
  }
  if (payload.is_object() && payload.contains("labels")) payload = payload["labels"];
  if (!payload.is_object() || payload.empty()) {
    return error_reply(400, "expected a JSON object mapping sample id to a binary label array");
  }

  LabelMap labels;
  Json reasons = Json::object();
  for (auto& [id, value] : payload.items()) {
    LabelVector y;
    bool ok = value.is_array();
    if (ok) {
      for (const auto& v : value) {
        if (!v.is_number_integer() || v.get<long long>() < 0 || v.get<long long>() > 1) {
          ok = false;
          break;
        }
        y.push_back(static_cast<std::uint8_t>(v.get<int>()));
      }
    }
    if (!ok) {
      reasons[id] = "label must be an array of 0/1 integers";
      continue;
    }
    labels.emplace(id, std::move(y));
  }

  std::lock_guard lock(state_mutex_);
  if (!state_) return error_reply(404, "no active experiment");
  ALState& s = *state_;
  if (!s.pending) return error_reply(409, "no batch is awaiting labels");
  for (const auto& [id, reason] : label_problems(s, labels)) reasons[id] = reason;
  if (!reasons.empty()) {
    return error_reply(422, "label submission rejected", Json{{"reasons", reasons},
                                                            {"remaining", s.pending->remaining()}});
  }
  const std::uint64_t iteration = s.pending->iteration;
  const SubmitResult result = submit_labels(s, labels);
  refresh_views();
  return reply(200, Json{{"status", "ok"},
                         {"accepted", result.accepted},
                         {"remaining", result.remaining},
                         {"resolved", result.resolved},
                         {"iteration", result.resolved ? s.tau : iteration}});
}

std::optional<ALState> AnnotationService::snapshot() const {
  std::lock_guard lock(state_mutex_);
  return state_;
}

void AnnotationService::install_routes() {
  server_ = std::make_unique<httplib::Server>();
  auto send = [](httplib::Response& res, const Response& r) {
    res.status = r.http_status;
    res.set_content(r.body, "application/json");
  };
  server_->Get("/api/session", [this, send](const httplib::Request&, httplib::Response& res) { send(res, session()); });
  server_->Get("/api/batch", [this, send](const httplib::Request&, httplib::Response& res) { send(res, batch()); });
  server_->Get("/api/progress", [this, send](const httplib::Request&, httplib::Response& res) { send(res, progress()); });
  server_->Post("/api/labels", [this, send](const httplib::Request& req, httplib::Response& res) {
    send(res, submit(req.body));
  });
  if (!ui_dir_.empty()) {
    server_->set_mount_point("/", ui_dir_.string());
  } else {
    server_->Get("/", [send](const httplib::Request&, httplib::Response& res) {
      send(res, reply(200, Json{{"status", "ok"},
                                {"endpoints", {"GET /api/session", "GET /api/batch", "POST /api/labels",
                                               "GET /api/progress"}}}));
    });
  }
}

bool AnnotationService::listen(const std::string& host, int port) {
  install_routes();
  return server_->listen(host, port);
}

int AnnotationService::bind_any_port(const std::string& host) {
  install_routes();
  return server_->bind_to_any_port(host);
}

bool AnnotationService::listen_after_bind() { return server_ && server_->listen_after_bind(); }

void AnnotationService::stop() {
  if (server_) server_->stop();
}

bool AnnotationService::is_running() const { return server_ && server_->is_running(); }

}  // namespace mlal::service
