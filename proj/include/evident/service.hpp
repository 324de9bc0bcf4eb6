#pragma once

// evident/service.hpp: HTTP/JSON facade over one workspace.
//
// Service::handle() is transport-free so it can be driven directly; serve()
// binds it to cpp-httplib. Read endpoints return the same canonical bytes
// as `evident <verb> --format canonical`.
//
// Errors come back as {"code", "message", "ids"} with status 400 for domain
// errors, 404 for unknown ids, 409 for SingleObservationViolation and
// WinnerConflict.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>

#include "evident/workspace.hpp"

namespace evident {

struct Response {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

int http_status(ErrorCode root);
Response error_response(const Error& error);

class Service {
 public:
  explicit Service(const std::filesystem::path& workspace,
                   std::function<std::int64_t()> clock = {});

  // `target` is the request path, optionally with a query string.
  Response handle(std::string_view method, std::string_view target, std::string_view body);

  std::size_t event_count();

 private:
  std::shared_ptr<const Snapshot> current();
  Response mutate(EventKind kind, Json payload, int status, Json reply);
  Response route(std::string_view method, std::string_view path, std::string_view query,
                 std::string_view body);
  std::int64_t now() const { return clock_ ? clock_() : now_seconds(); }

  std::mutex mutex_;  // guards workspace_ and snapshot_
  Workspace workspace_;
  std::shared_ptr<const Snapshot> snapshot_;
  std::function<std::int64_t()> clock_;
};

struct ServerOptions {
  std::string host = "127.0.0.1";
  int port = 8787;
  std::string cors_origin = "*";
};

// cpp-httplib binding with CORS headers and OPTIONS preflight.
class HttpServer {
 public:
  HttpServer(Service& service, ServerOptions options);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Binds options.port (0 picks a free port). Returns the bound port or -1.
  int bind();
  // Serves until stop(); call bind() first.
  bool listen();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// bind() + listen(). Returns false if the socket could not be bound.
bool serve(Service& service, const ServerOptions& options);

}  // namespace evident
