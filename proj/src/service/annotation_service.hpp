// Copyright 2026 The mlal Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "engine/engine.hpp"

namespace httplib {
class Server;
}

namespace mlal::service {

struct Response {
  int http_status = 200;
  std::string body;  // JSON object, always with a "status" field
};

/// HTTP facade over one interactive AL session. All state mutations go
/// through a single writer lock; session and progress are served from a
/// cached snapshot so they never wait on training.
class AnnotationService {
 public:
  AnnotationService();
  explicit AnnotationService(ALState state, bool thumbnails = false);
  ~AnnotationService();

  AnnotationService(const AnnotationService&) = delete;
  AnnotationService& operator=(const AnnotationService&) = delete;

  void load(ALState state, bool thumbnails = false);

  Response session() const;
  /// Returns the pending batch, running the next iteration first when none
  /// is parked. Reports "busy" while another request is training.
  Response batch();
  Response submit(const std::string& body);
  Response progress() const;

  /// Copy of the engine state; blocks while training runs.
  std::optional<ALState> snapshot() const;

  void set_ui_dir(const std::filesystem::path& dir) { ui_dir_ = dir; }

  /// Binds and serves until stop(). Returns false if the bind fails.
  bool listen(const std::string& host, int port);
  /// Binds to an ephemeral port; serve with listen_after_bind().
  int bind_any_port(const std::string& host);
  bool listen_after_bind();
  void stop();
  bool is_running() const;

 private:
  void refresh_views();  // caller holds state_mutex_
  void install_routes();

  mutable std::mutex state_mutex_;
  std::optional<ALState> state_;
  bool thumbnails_ = false;

  mutable std::mutex view_mutex_;
  std::string session_view_;
  std::string progress_view_;
  std::atomic<bool> busy_{false};

  std::filesystem::path ui_dir_;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace mlal::service
