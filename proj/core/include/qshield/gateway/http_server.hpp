// Copyright 2026 The QShield Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "qshield/gateway/service.hpp"

namespace qshield::gateway {

// JSON-over-HTTP front end for a GatewayService.
//
//   POST /v1/classify              {"text": ...}
//   GET  /v1/review/pending        ?limit=&cursor=
//   POST /v1/review/{id}/label     {"label": <class>|"discard"}
//   POST /v1/admin/retrain
//   GET  /v1/admin/status
//   GET  /v1/metrics
//
// Errors are returned as {"error": <code>, "message": ...} with a matching
// HTTP status.
class HttpServer {
 public:
  // `ui_dir`, when set, is served as static files under "/".
  explicit HttpServer(GatewayService& service,
                      std::optional<std::filesystem::path> ui_dir = std::nullopt);
  ~HttpServer();

  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Binds the listening socket. Port 0 picks a free port. Returns the bound
  // port; throws Error(kIo) on failure.
  int bind(const std::string& host, int port);

  // Serves until stop(). Requires a successful bind().
  void serve();

  // serve() on a background thread.
  void start();

  void stop();

  int port() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace qshield::gateway
