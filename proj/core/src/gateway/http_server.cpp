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

#include "qshield/gateway/http_server.hpp"

#include <charconv>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "json_codec.hpp"
#include "qshield/error.hpp"

namespace qshield::gateway {

namespace {

using nlohmann::json;

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::kRejected: return 413;
    case ErrorCode::kUnavailable: return 503;
    case ErrorCode::kNotFound: return 404;
    case ErrorCode::kConflict: return 409;
    case ErrorCode::kUnknownLabel:
    case ErrorCode::kBadCursor:
    case ErrorCode::kMalformedRecord: return 400;
    default: return 500;
  }
}

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, std::string_view code, const std::string& msg) {
  send_json(res, status, {{"error", code}, {"message", msg}});
}

json counters_json(const Counters& c) {
  return {
      {"requests", c.requests},
      {"blocks", c.blocks},
      {"truncations", c.truncations},
      {"low_confidence", c.low_confidence},
      {"captures", c.captures},
      {"labels", c.labels},
      {"discards", c.discards},
      {"retrains_succeeded", c.retrains_succeeded},
      {"retrains_failed", c.retrains_failed},
  };
}

json status_json(const StatusReport& s) {
  json counts = json::object();
  for (const Label l : kAllLabels) counts[std::string(label_name(l))] = s.labeled_counts.count(l);
  json retrain = {{"state", retrain_state_name(s.retrain_state)}, {"reason", nullptr}};
  if (s.retrain_state == RetrainState::kFailed) retrain["reason"] = s.retrain_error;
  return {
      {"model_version", s.model_version ? json(*s.model_version) : json(nullptr)},
      {"queue_depth", s.queue_depth},
      {"labeled_db_size", s.labeled_db_size},
      {"labeled_counts", counts},
      {"retrain", retrain},
      {"new_labels_since_retrain", s.new_labels_since_retrain},
      {"counters", counters_json(s.counters)},
  };
}

// Parses a JSON object body and returns the string member `key`.
std::optional<std::string> string_member(const httplib::Request& req, httplib::Response& res,
                                         const char* key) {
  json body = json::parse(req.body, nullptr, /*allow_exceptions=*/false);
  if (!body.is_object()) {
    send_error(res, 400, "malformed_request", "request body must be a JSON object");
    return std::nullopt;
  }
  const auto it = body.find(key);
  if (it == body.end() || !it->is_string()) {
    send_error(res, 400, "malformed_request", std::string("missing string field \"") + key + "\"");
    return std::nullopt;
  }
  return it->get<std::string>();
}

// Runs `fn`, translating library errors into HTTP error responses.
template <typename Fn>
void guarded(httplib::Response& res, Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    send_error(res, http_status(e.code()), error_code_name(e.code()), e.what());
  } catch (const std::exception& e) {
    send_error(res, 500, "internal", e.what());
  }
}

}  // namespace

struct HttpServer::Impl {
  GatewayService& service;
  httplib::Server server;
  int port = -1;
  std::thread thread;

  explicit Impl(GatewayService& s) : service(s) {}
};

HttpServer::HttpServer(GatewayService& service, std::optional<std::filesystem::path> ui_dir)
    : impl_(std::make_unique<Impl>(service)) {
  auto& srv = impl_->server;
  // Leave room for JSON escaping; the text cap itself is enforced by classify().
  srv.set_payload_max_length(service.config().max_body_bytes * 6 + 4096);
  // Without SO_REUSEPORT, so a second gateway on a busy port fails to bind.
  srv.set_socket_options([](socket_t sock) {
    int yes = 1;
    ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const char*>(&yes), sizeof yes);
  });

  srv.Post("/v1/classify", [&service](const httplib::Request& req, httplib::Response& res) {
    const auto text = string_member(req, res, "text");
    if (!text) return;
    guarded(res, [&] {
      const auto r = service.classify(*text);
      json body = {
          {"verdict", r.decision == Decision::kBlock ? "block" : "allow"},
          {"class", label_name(r.verdict.predicted)},
          {"probs", r.verdict.probs},
          {"confidence", r.verdict.confidence},
          {"model_version", r.verdict.model_version},
          {"captured", r.captured},
      };
      if (r.review_id) body["review_id"] = *r.review_id;
      send_json(res, 200, body);
    });
  });

  srv.Get("/v1/review/pending", [&service](const httplib::Request& req, httplib::Response& res) {
    std::size_t limit = 50;
    if (req.has_param("limit")) {
      const std::string raw = req.get_param_value("limit");
      const auto [end, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), limit);
      if (ec != std::errc() || end != raw.data() + raw.size()) {
        send_error(res, 400, "malformed_request", "limit must be a non-negative integer");
        return;
      }
    }
    std::optional<std::string> cursor;
    if (req.has_param("cursor")) cursor = req.get_param_value("cursor");
    guarded(res, [&] {
      const auto page = service.list_pending(limit, cursor);
      json items = json::array();
      for (const auto& item : page.items) items.push_back(review_item_json(item));
      send_json(res, 200,
                {{"items", items},
                 {"next_cursor", page.next_cursor ? json(*page.next_cursor) : json(nullptr)}});
    });
  });

  srv.Post(R"(/v1/review/([^/]+)/label)",
           [&service](const httplib::Request& req, httplib::Response& res) {
             const auto label = string_member(req, res, "label");
             if (!label) return;
             const std::string id = req.matches[1];
             guarded(res, [&] {
               send_json(res, 200, review_item_json(service.submit_label(id, *label)));
             });
           });

  srv.Post("/v1/admin/retrain", [&service](const httplib::Request&, httplib::Response& res) {
    guarded(res, [&] {
      service.trigger_retrain(RetrainTrigger::kManual);
      send_json(res, 200, {{"status", "started"}});
    });
  });

  srv.Get("/v1/admin/status", [&service](const httplib::Request&, httplib::Response& res) {
    send_json(res, 200, status_json(service.status()));
  });

  srv.Get("/v1/metrics", [&service](const httplib::Request&, httplib::Response& res) {
    send_json(res, 200, counters_json(service.counters()));
  });

  if (ui_dir && !srv.set_mount_point("/", ui_dir->string())) {
    throw Error(ErrorCode::kConfig, "ui directory " + ui_dir->string() + " does not exist");
  }
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  auto& srv = impl_->server;
  const int bound = port == 0 ? srv.bind_to_any_port(host) : (srv.bind_to_port(host, port) ? port : -1);
  if (bound < 0) {
    throw Error(ErrorCode::kIo, "cannot listen on " + host + ":" + std::to_string(port));
  }
  impl_->port = bound;
  return bound;
}

void HttpServer::serve() {
  if (impl_->port < 0) throw Error(ErrorCode::kContractViolation, "serve() before bind()");
  impl_->server.listen_after_bind();
}

void HttpServer::start() {
  if (impl_->port < 0) throw Error(ErrorCode::kContractViolation, "start() before bind()");
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
}

void HttpServer::stop() {
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

int HttpServer::port() const { return impl_->port; }

}  // namespace qshield::gateway
