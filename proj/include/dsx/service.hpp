#pragma once

// JSON-over-HTTP front end. The handlers are plain functions of the request
// body so they can be exercised without a socket.
//
//   POST /search  {"old":str,"new":str,"k":int?,"max_results":int?,
//                  "exhaustive":bool?}
//   GET  /health

#include <memory>
#include <string>
#include <string_view>

#include "dsx/engine.hpp"

namespace dsx {

struct HttpReply {
  int status = 200;
  std::string body;  // JSON
};

class Service {
 public:
  Service(Corpus corpus, VectorIndex index, SearchConfig defaults = {});
  ~Service();

  HttpReply handle_search(std::string_view body) const;
  HttpReply handle_health() const;

  // Blocks until stop(). Throws IoError if the port cannot be bound.
  void serve(const std::string& host, int port);
  // serve() in two steps. Port 0 picks a free port; the bound port is
  // returned.
  int bind(const std::string& host, int port);
  void listen();
  void stop();
  bool running() const;

  const Corpus& corpus() const { return corpus_; }
  const VectorIndex& index() const { return index_; }

 private:
  Corpus corpus_;
  VectorIndex index_;
  SearchConfig defaults_;
  struct Http;
  std::unique_ptr<Http> http_;
};

// Search response as sent by POST /search.
std::string response_to_json(const SearchResponse& response);

}  // namespace dsx
