#include "evident/service.hpp"

#include <vector>

#include "evident/algebra.hpp"
#include "evident/frontend.hpp"
#include "httplib.h"

namespace evident {

int http_status(ErrorCode root) {
  switch (root) {
    case ErrorCode::SingleObservationViolation:
    case ErrorCode::WinnerConflict:
      return 409;
    case ErrorCode::DanglingReference:
    case ErrorCode::UnknownId:
    case ErrorCode::UnknownHypothesis:
    case ErrorCode::UnknownObservation:
      return 404;
    case ErrorCode::WorkspaceLocked:
      return 503;
    case ErrorCode::IoError:
    case ErrorCode::NoWorkspace:
    case ErrorCode::ChainCorrupt:
      return 500;
    default:
      return 400;
  }
}

Response error_response(const Error& error) {
  Json doc = {{"code", std::string(to_string(error.root()))},
              {"message", error.message()},
              {"ids", error.ids()}};
  if (error.cause()) doc["wrapped_by"] = std::string(to_string(error.code()));
  return Response{http_status(error.root()), canonical_dump(doc)};
}

Service::Service(const std::filesystem::path& workspace, std::function<std::int64_t()> clock)
    : workspace_(Workspace::open(workspace)),
      snapshot_(std::make_shared<const Snapshot>(workspace_.snapshot())),
      clock_(std::move(clock)) {}

std::size_t Service::event_count() {
  std::lock_guard lock(mutex_);
  if (workspace_.refresh()) snapshot_ = std::make_shared<const Snapshot>(workspace_.snapshot());
  return workspace_.log().size();
}

std::shared_ptr<const Snapshot> Service::current() {
  std::lock_guard lock(mutex_);
  if (workspace_.refresh()) snapshot_ = std::make_shared<const Snapshot>(workspace_.snapshot());
  return snapshot_;
}

Response Service::mutate(EventKind kind, Json payload, int status, Json reply) {
  std::lock_guard lock(mutex_);
  workspace_.append(kind, std::move(payload), now());
  snapshot_ = std::make_shared<const Snapshot>(workspace_.snapshot());
  return Response{status, canonical_dump(reply)};
}

namespace {

Json parse_body(std::string_view body) {
  if (body.empty()) return Json::object();
  try {
    Json doc = Json::parse(body);
    if (!doc.is_object()) throw Error(ErrorCode::MalformedInput, "request body must be a JSON map");
    return doc;
  } catch (const Json::exception& ex) {
    throw Error(ErrorCode::MalformedInput, std::string("request body is not JSON: ") + ex.what());
  }
}

const Json& require(const Json& body, const char* key) {
  auto it = body.find(key);
  if (it == body.end())
    throw Error(ErrorCode::MalformedInput, std::string("request needs '") + key + "'");
  return *it;
}

std::string require_string(const Json& body, const char* key) {
  const Json& v = require(body, key);
  if (!v.is_string())
    throw Error(ErrorCode::MalformedInput, std::string("'") + key + "' must be a string");
  return v.get<std::string>();
}

std::vector<std::string> split_path(std::string_view path) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start < path.size()) {
    std::size_t end = path.find('/', start);
    if (end == std::string_view::npos) end = path.size();
    if (end > start) out.emplace_back(path.substr(start, end - start));
    start = end + 1;
  }
  return out;
}

std::optional<std::string> query_value(std::string_view query, std::string_view key) {
  std::size_t pos = 0;
  while (pos <= query.size()) {
    std::size_t amp = query.find('&', pos);
    if (amp == std::string_view::npos) amp = query.size();
    std::string_view item = query.substr(pos, amp - pos);
    auto eq = item.find('=');
    if (item.substr(0, eq) == key)
      return std::string(eq == std::string_view::npos ? "" : item.substr(eq + 1));
    pos = amp + 1;
  }
  return std::nullopt;
}

Container container_from_request(const Json& body, std::int64_t created_at,
                                  std::optional<ContainerKind> forced = std::nullopt) {
  ContainerKind kind;
  if (forced) {
    kind = *forced;
  } else {
    auto k = parse_container_kind(require_string(body, "kind"));
    if (!k) throw Error(ErrorCode::MalformedInput, "kind must be Observation, Hypothesis or Test");
    kind = *k;
  }
  std::optional<std::string> period;
  if (body.contains("period_tag")) period = require_string(body, "period_tag");
  std::vector<std::string> labels;
  if (auto it = body.find("labels"); it != body.end()) {
    if (!it->is_array()) throw Error(ErrorCode::MalformedInput, "labels must be a list");
    for (const auto& l : *it) {
      if (!l.is_string()) throw Error(ErrorCode::MalformedInput, "labels must be strings");
      labels.push_back(l.get<std::string>());
    }
  }
  Json payload = body.contains("payload") ? body.at("payload") : Json::object();
  return make_container(kind, payload, period, labels, created_at);
}

std::set<ContainerId> id_set(const Snapshot& s, const Json& list, ErrorCode not_found) {
  if (!list.is_array()) throw Error(ErrorCode::MalformedInput, "expected a list of ids");
  std::set<ContainerId> out;
  for (const auto& item : list) {
    if (!item.is_string()) throw Error(ErrorCode::MalformedInput, "ids must be strings");
    out.insert(resolve_id(s, item.get<std::string>(), not_found));
  }
  return out;
}

Response snapshot_response(const Snapshot& s) { return Response{200, serialize_snapshot(s)}; }

}  // namespace

Response Service::handle(std::string_view method, std::string_view target, std::string_view body) {
  std::string_view path = target;
  std::string_view query;
  if (auto q = target.find('?'); q != std::string_view::npos) {
    path = target.substr(0, q);
    query = target.substr(q + 1);
  }
  try {
    return route(method, path, query, body);
  } catch (const Error& e) {
    return error_response(e);
  }
}

Response Service::route(std::string_view method, std::string_view path, std::string_view query,
                        std::string_view raw_body) {
  auto seg = split_path(path);
  auto not_found = [&] {
    return Response{404, canonical_dump(Json{{"code", "NotFound"},
                                             {"message", "no route " + std::string(method) + " " +
                                                             std::string(path)},
                                             {"ids", Json::array()}})};
  };

  if (method == "GET") {
    auto s = current();
    if (seg == std::vector<std::string>{"grid"}) {
      bool permuted = query_value(query, "permute").value_or("0") != "0";
      return Response{200, canonical_grid(*s, permuted)};
    }
    if (seg == std::vector<std::string>{"grid.csv"}) {
      return Response{200, grid_csv(*s, grid_view(*s)), "text/csv"};
    }
    if (seg == std::vector<std::string>{"backlog"}) return Response{200, canonical_backlog(*s)};
    if (seg == std::vector<std::string>{"snapshot"}) return snapshot_response(*s);
    if (seg == std::vector<std::string>{"verify"}) {
      std::string bytes;
      {
        std::lock_guard lock(mutex_);
        bytes = read_file(workspace_.log_path());
      }
      return Response{200, canonical_verify(verify_log_bytes(bytes))};
    }
    if (seg.size() == 3 && seg[0] == "hypotheses" && seg[2] == "status")
      return Response{200, canonical_status(*s, resolve_id(*s, seg[1]))};
    if (seg.size() == 3 && seg[0] == "tests" && seg[2] == "report") {
      ContainerId t = resolve_id(*s, seg[1]);
      if (query_value(query, "format").value_or("") == "markdown")
        return Response{200, report_markdown(*s, knowledge_report(*s, t)), "text/markdown"};
      return Response{200, canonical_report(*s, t)};
    }
    return not_found();
  }

  if (method != "POST") return not_found();
  Json body = parse_body(raw_body);

  if (seg == std::vector<std::string>{"containers"}) {
    Container c = container_from_request(body, now());
    return mutate(EventKind::AddContainer, add_container_payload(c), 201, Json{{"id", c.id.str()}});
  }
  if (seg == std::vector<std::string>{"associations"}) {
    auto s = current();
    auto kind = parse_edge_kind(require_string(body, "kind"));
    if (!kind) throw Error(ErrorCode::MalformedInput, "kind must be a hypothesis, observation or premise edge");
    Association a{resolve_id(*s, require_string(body, "source")),
                  resolve_id(*s, require_string(body, "target")), *kind};
    return mutate(EventKind::AddAssociation, add_association_payload(a), 201,
                  association_to_json(a));
  }
  if (seg.size() == 3 && seg[0] == "tests" && seg[2] == "winner") {
    auto s = current();
    ContainerId t = resolve_id(*s, seg[1]);
    ContainerId h = resolve_id(*s, require_string(body, "hypothesis"));
    return mutate(EventKind::SetWinner, set_winner_payload(t, h), 200,
                  Json{{"test", t.str()}, {"hypothesis", h.str()}});
  }
  if (seg.size() == 3 && seg[0] == "tests" && seg[2] == "observation") {
    auto s = current();
    ContainerId t = resolve_id(*s, seg[1]);
    auto outcome = parse_outcome(require_string(body, "outcome"));
    if (!outcome) throw Error(ErrorCode::InvalidOutcome, "outcome must be proved, disproved or overlooked");
    std::optional<double> confidence;
    if (auto it = body.find("confidence"); it != body.end()) {
      if (!it->is_number()) throw Error(ErrorCode::MalformedPayload, "confidence must be a number");
      confidence = it->get<double>();
    }
    std::int64_t ts = now();
    const Json& obs = require(body, "observation");
    std::optional<Container> inline_obs;
    ContainerId obs_id;
    if (obs.is_string()) {
      obs_id = resolve_id(*s, obs.get<std::string>());
    } else if (obs.is_object()) {
      inline_obs = container_from_request(obs, ts, ContainerKind::Observation);
      obs_id = inline_obs->id;
    } else {
      throw Error(ErrorCode::MalformedInput, "observation must be an id or a container body");
    }
    std::lock_guard lock(mutex_);
    workspace_.append(EventKind::AttachObservation,
                      attach_observation_payload(t, obs_id, *outcome, confidence, inline_obs), ts);
    snapshot_ = std::make_shared<const Snapshot>(workspace_.snapshot());
    Container successor = promoted_successor(snapshot_->at(t), *outcome, confidence, ts);
    return Response{201, canonical_dump(Json{{"successor", successor.id.str()},
                                             {"observation", obs_id.str()}})};
  }
  if (seg.size() == 2 && seg[0] == "algebra") {
    auto s = current();
    auto snapshot_arg = [&](const Json& holder) -> Snapshot {
      auto it = holder.find("snapshot");
      if (it == holder.end()) return *s;
      return snapshot_from_json(*it);
    };
    if (seg[1] == "join") {
      Snapshot acc = *s;
      if (auto it = body.find("snapshots"); it != body.end()) {
        if (!it->is_array()) throw Error(ErrorCode::MalformedInput, "snapshots must be a list");
        for (const auto& doc : *it) acc = join(acc, snapshot_from_json(doc));
      } else {
        acc = join(acc, snapshot_from_json(require(body, "snapshot")));
      }
      return snapshot_response(acc);
    }
    if (seg[1] == "restrict") {
      Snapshot src = snapshot_arg(body);
      if (!is_selectable(src).selectable) return snapshot_response(restrict(src, {}));
      return snapshot_response(
          restrict(src, id_set(src, require(body, "rows"), ErrorCode::UnknownHypothesis)));
    }
    if (seg[1] == "project") {
      Snapshot src = snapshot_arg(body);
      if (!is_selectable(src).selectable) return snapshot_response(project(src, {}));
      return snapshot_response(
          project(src, id_set(src, require(body, "cols"), ErrorCode::UnknownObservation)));
    }
    if (seg[1] == "compose") {
      const Json& raw_parts = require(body, "parts");
      if (!raw_parts.is_array()) throw Error(ErrorCode::MalformedInput, "parts must be a list");
      std::vector<ComposePart> parts;
      for (const auto& raw : raw_parts) {
        ComposePart part;
        part.snapshot = snapshot_arg(raw);
        bool selectable = is_selectable(part.snapshot).selectable;
        if (auto it = raw.find("rows"); it != raw.end())
          part.rows = selectable ? id_set(part.snapshot, *it, ErrorCode::UnknownHypothesis)
                                 : std::set<ContainerId>{};
        if (auto it = raw.find("cols"); it != raw.end())
          part.columns = selectable ? id_set(part.snapshot, *it, ErrorCode::UnknownObservation)
                                    : std::set<ContainerId>{};
        parts.push_back(std::move(part));
      }
      return snapshot_response(compose(parts));
    }
  }
  return not_found();
}

struct HttpServer::Impl {
  Service& service;
  ServerOptions options;
  httplib::Server server;
};

HttpServer::HttpServer(Service& service, ServerOptions options)
    : impl_(new Impl{service, std::move(options), {}}) {
  Impl& im = *impl_;
  auto cors = [&im](httplib::Response& res) {
    res.set_header("Access-Control-Allow-Origin", im.options.cors_origin);
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
  };
  auto dispatch = [&im, cors](const httplib::Request& req, httplib::Response& res) {
    std::string target = req.path;
    char sep = '?';
    for (const auto& [k, v] : req.params) {
      target += sep + k + "=" + v;
      sep = '&';
    }
    Response r = im.service.handle(req.method, target, req.body);
    res.status = r.status;
    res.set_content(r.body, r.content_type);
    cors(res);
  };
  im.server.Get(R"(/.*)", dispatch);
  im.server.Post(R"(/.*)", dispatch);
  im.server.Options(R"(/.*)", [cors](const httplib::Request&, httplib::Response& res) {
    res.status = 204;
    cors(res);
  });
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind() {
  if (impl_->options.port == 0) return impl_->server.bind_to_any_port(impl_->options.host);
  return impl_->server.bind_to_port(impl_->options.host, impl_->options.port) ? impl_->options.port
                                                                              : -1;
}

bool HttpServer::listen() { return impl_->server.listen_after_bind(); }

void HttpServer::stop() { impl_->server.stop(); }

bool serve(Service& service, const ServerOptions& options) {
  HttpServer server(service, options);
  if (server.bind() < 0) return false;
  return server.listen();
}

}  // namespace evident
