#include "dsx/service.hpp"

#include <cmath>

#include "httplib.h"
#include "json.hpp"

#include "dsx/error.hpp"

namespace dsx {

using nlohmann::json;

struct Service::Http {
  httplib::Server server;
};

Service::Service(Corpus corpus, VectorIndex index, SearchConfig defaults)
    : corpus_(std::move(corpus)),
      index_(std::move(index)),
      defaults_(defaults),
      http_(std::make_unique<Http>()) {
  defaults_.validate();
}

Service::~Service() = default;

namespace {

json result_json(const SearchResult& r) {
  json j;
  j["id"] = r.change.id;
  j["rank"] = r.rank;
  if (r.distance) j["distance"] = *r.distance;
  j["old"] = r.change.old_lines;
  j["new"] = r.change.new_lines;
  json b = json::object();
  for (const auto& [k, v] : r.bindings) b[k] = v;
  j["bindings"] = b;
  return j;
}

HttpReply error_reply(int status, const std::string& kind,
                      const std::string& message) {
  json j;
  j["error"] = {{"kind", kind}, {"message", message}};
  return {status, j.dump()};
}

std::size_t positive(const json& body, const char* key, std::size_t fallback) {
  if (!body.contains(key)) return fallback;
  const json& v = body.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 1) {
    throw ConfigError(std::string("'") + key + "' must be a positive integer");
  }
  return v.get<std::size_t>();
}

}  // namespace

std::string response_to_json(const SearchResponse& response) {
  json j;
  j["results"] = json::array();
  for (const auto& r : response.results) j["results"].push_back(result_json(r));
  j["stats"] = {
      {"retrieved", response.stats.retrieved},
      {"matched", response.stats.matched},
      {"elapsed_ms", static_cast<long long>(std::llround(response.stats.elapsed_ms))}};
  return j.dump();
}

HttpReply Service::handle_search(std::string_view body) const {
  json req;
  try {
    req = json::parse(body);
  } catch (const json::parse_error& e) {
    return error_reply(400, "bad_request", std::string("invalid JSON: ") + e.what());
  }
  if (!req.is_object() || !req.contains("old") || !req.contains("new") ||
      !req.at("old").is_string() || !req.at("new").is_string()) {
    return error_reply(400, "bad_request", "'old' and 'new' must be strings");
  }
  SearchConfig config = defaults_;
  try {
    config.k = positive(req, "k", config.k);
    config.max_results = positive(req, "max_results", config.max_results);
    if (req.contains("exhaustive")) {
      if (!req.at("exhaustive").is_boolean()) {
        throw ConfigError("'exhaustive' must be a boolean");
      }
      config.mode = req.at("exhaustive").get<bool>() ? SearchMode::kExhaustive
                                                     : SearchMode::kIndexed;
    }
    Query q = Query::from_text(req.at("old").get<std::string>(),
                               req.at("new").get<std::string>());
    return {200, response_to_json(search(q, config, corpus_, index_))};
  } catch (const QueryParseError& e) {
    json j;
    j["error"] = {{"kind", "parse"},
                  {"side", e.side()},
                  {"line", e.line()},
                  {"column", e.column()},
                  {"message", e.detail()}};
    return {400, j.dump()};
  } catch (const ConfigError& e) {
    return error_reply(400, "bad_request", e.what());
  } catch (const Error& e) {
    return error_reply(500, "internal", e.what());
  }
}

HttpReply Service::handle_health() const {
  json j{{"status", "ok"}, {"corpus", corpus_.size()}};
  return {200, j.dump()};
}

int Service::bind(const std::string& host, int port) {
  auto& srv = http_->server;
  srv.Post("/search", [this](const httplib::Request& req, httplib::Response& res) {
    HttpReply r = handle_search(req.body);
    res.status = r.status;
    res.set_content(r.body, "application/json");
  });
  srv.Get("/health", [this](const httplib::Request&, httplib::Response& res) {
    HttpReply r = handle_health();
    res.status = r.status;
    res.set_content(r.body, "application/json");
  });
  // The web UI is served from another origin during development.
  srv.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
  });
  srv.set_post_routing_handler([](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Origin", "*");
  });
  int bound = port == 0 ? srv.bind_to_any_port(host) : (srv.bind_to_port(host, port) ? port : -1);
  if (bound <= 0) {
    throw IoError("cannot bind " + host + ":" + std::to_string(port));
  }
  return bound;
}

void Service::listen() { http_->server.listen_after_bind(); }

void Service::serve(const std::string& host, int port) {
  bind(host, port);
  listen();
}

void Service::stop() { http_->server.stop(); }

bool Service::running() const { return http_->server.is_running(); }

}  // namespace dsx
