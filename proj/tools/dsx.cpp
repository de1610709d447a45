// dsx: index, search, evaluate and serve a corpus of code changes.

#include <csignal>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "dsx/engine.hpp"
#include "dsx/error.hpp"
#include "dsx/index.hpp"
#include "dsx/ingestion.hpp"
#include "dsx/service.hpp"
#include "dsx/synth.hpp"

namespace {

using namespace dsx;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct IndexArgs {
  std::string corpus;
  std::string git_log;
  std::string out;
  std::size_t l = 1000;
  std::size_t synthetic = 0;
  std::uint64_t seed = 1;
};

int run_index(const IndexArgs& a) {
  if (!a.git_log.empty()) {
    HunkSplit split = split_commit_into_hunks(read_file(a.git_log));
    Corpus corpus;
    for (auto& c : split.changes) corpus.append_unchecked(std::move(c));
    save_corpus(corpus, a.corpus);
    std::cerr << "ingested " << corpus.size() << " hunks, skipped "
              << split.skipped.size() << "\n";
    for (const auto& s : split.skipped) {
      std::cerr << "  skipped hunk at line " << s.line << " (" << s.file
                << "): " << s.reason << "\n";
    }
  } else if (a.synthetic > 0) {
    save_corpus(synthesize_corpus(a.synthetic, a.seed), a.corpus);
  }
  Corpus corpus = load_corpus(a.corpus);
  corpus.set_tree_cache(false);
  VectorIndex index = build_index(corpus, FeatureConfig{a.l, 1});
  save_index(index, a.out);
  std::cout << "indexed " << index.count() << " changes (l=" << index.length()
            << ", " << index.skipped().size() << " unparseable) -> " << a.out
            << "\n";
  return 0;
}

struct SearchArgs {
  std::string index;
  std::string corpus;
  std::string old_text;
  std::string new_text;
  std::string query;
  SearchConfig config;
  bool exhaustive = false;
  bool json = false;
};

void print_lines(const std::vector<std::string>& lines, char mark) {
  for (const auto& l : lines) std::cout << "  " << mark << " " << l << "\n";
}

int run_search(SearchArgs a) {
  Query q = a.query.empty() ? Query::from_text(a.old_text, a.new_text)
                            : Query::from_arrow(a.query);
  ParsedQuery pq = parse_query(q);
  Corpus corpus = load_corpus(a.corpus);
  VectorIndex index;
  if (a.exhaustive) {
    a.config.mode = SearchMode::kExhaustive;
    index = VectorIndex(a.config.l);
  } else {
    index = load_index(a.index);
  }
  if (a.config.mode == SearchMode::kIndexed) a.config.l = index.length();
  SearchResponse r = search(pq, a.config, corpus, index);
  if (r.stats.budget_exceeded > 0) {
    std::cerr << "warning: search budget exceeded on " << r.stats.budget_exceeded
              << " candidate(s); raise it to search them fully\n";
  }
  if (a.json) {
    std::cout << response_to_json(r) << "\n";
    return 0;
  }
  for (const auto& res : r.results) {
    std::cout << "#" << res.rank << "  change " << res.change.id;
    if (res.distance) {
      std::cout << "  distance " << std::fixed << std::setprecision(3) << *res.distance;
    }
    if (!res.change.file.empty()) std::cout << "  " << res.change.file;
    std::cout << "\n";
    print_lines(res.change.old_lines, '-');
    print_lines(res.change.new_lines, '+');
    for (const auto& [k, v] : res.bindings) std::cout << "    " << k << " = " << v << "\n";
  }
  std::cout << r.results.size() << " result(s); " << r.stats.retrieved
            << " candidate(s) checked, " << r.stats.pruned << " pruned, "
            << static_cast<long long>(r.stats.elapsed_ms) << " ms\n";
  return 0;
}

struct EvalArgs {
  std::string strategy = "as-is";
  std::size_t n = 20;
  std::uint64_t seed = 1;
  std::string corpus;
  std::string index;
  std::size_t synthetic = 5000;
  SearchConfig config;
};

int run_eval(EvalArgs a) {
  Strategy strategy = parse_strategy(a.strategy);
  Corpus corpus = a.corpus.empty() ? synthesize_corpus(a.synthetic, a.seed)
                                   : load_corpus(a.corpus);
  VectorIndex index = a.index.empty()
                          ? build_index(corpus, FeatureConfig{a.config.l, 1})
                          : load_index(a.index);
  a.config.l = index.length();
  auto generated = generate_ground_truth_queries(corpus, strategy, a.n, a.seed);
  std::vector<Query> queries;
  for (const auto& g : generated) queries.push_back(g.query);
  RecallReport rep = measure_recall(queries, corpus, index, a.config);
  std::printf("strategy %s, %zu queries, corpus %zu, k=%zu, l=%zu\n",
              a.strategy.c_str(), queries.size(), corpus.size(), a.config.k,
              a.config.l);
  std::printf("mean recall        %.4f\n", rep.mean_recall);
  std::printf("mean ground truth  %.1f changes\n", rep.mean_truth);
  std::printf("mean query size    %.1f chars\n", rep.mean_query_chars);
  std::printf("mean result size   %.1f chars\n", rep.mean_result_chars);
  return 0;
}

Service* g_service = nullptr;

void on_signal(int) {
  if (g_service) g_service->stop();
}

int run_serve(const std::string& index_path, const std::string& corpus_path,
              const std::string& host, int port) {
  Corpus corpus = load_corpus(corpus_path);
  VectorIndex index = load_index(index_path);
  SearchConfig config;
  config.l = index.length();
  Service service(std::move(corpus), std::move(index), config);
  g_service = &service;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::cerr << "serving " << service.corpus().size() << " changes on http://"
            << host << ":" << port << "\n";
  service.serve(host, port);
  g_service = nullptr;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dsx: search code changes with query patterns"};
  app.require_subcommand(1);

  IndexArgs ia;
  auto* index_cmd = app.add_subcommand("index", "build a feature index for a corpus");
  index_cmd->add_option("--corpus", ia.corpus, "corpus (JSON Lines)")
      ->envname("DSX_CORPUS")->required();
  index_cmd->add_option("--git-log", ia.git_log,
                        "ingest `git log -p` text and write it to --corpus");
  index_cmd->add_option("--out", ia.out, "index file to write")
      ->envname("DSX_INDEX")->required();
  index_cmd->add_option("--l", ia.l, "feature vector length")->default_val(1000);
  index_cmd->add_option("--synthetic", ia.synthetic,
                        "generate N synthetic changes into --corpus first");
  index_cmd->add_option("--seed", ia.seed, "seed for --synthetic");

  SearchArgs sa;
  auto* search_cmd = app.add_subcommand("search", "run a query");
  search_cmd->add_option("--index", sa.index, "index file")->envname("DSX_INDEX");
  search_cmd->add_option("--corpus", sa.corpus, "corpus (JSON Lines)")
      ->envname("DSX_CORPUS")->required();
  search_cmd->add_option("--old", sa.old_text, "old side of the query");
  search_cmd->add_option("--new", sa.new_text, "new side of the query");
  search_cmd->add_option("--query", sa.query, "whole query as 'old -> new'");
  search_cmd->add_option("--k", sa.config.k, "candidates to retrieve")->default_val(5000);
  search_cmd->add_option("--max-results", sa.config.max_results, "results to return")
      ->default_val(10);
  search_cmd->add_option("--budget", sa.config.search_budget,
                         "node-pair attempts per candidate");
  search_cmd->add_flag("--exhaustive", sa.exhaustive, "match every change, no index");
  search_cmd->add_flag("--json", sa.json, "print the HTTP response body");

  EvalArgs ea;
  auto* eval_cmd = app.add_subcommand("eval", "measure recall of generated queries");
  eval_cmd->add_option("--strategy", ea.strategy, "as-is | less | more | generalized");
  eval_cmd->add_option("--n", ea.n, "queries")->default_val(20);
  eval_cmd->add_option("--seed", ea.seed, "sampling seed");
  eval_cmd->add_option("--corpus", ea.corpus, "corpus; synthetic when omitted");
  eval_cmd->add_option("--index", ea.index, "prebuilt index for --corpus");
  eval_cmd->add_option("--synthetic", ea.synthetic, "size of the synthetic corpus")
      ->default_val(5000);
  eval_cmd->add_option("--k", ea.config.k, "candidates to retrieve")->default_val(5000);

  std::string serve_index, serve_corpus, host = "127.0.0.1";
  int port = 8080;
  auto* serve_cmd = app.add_subcommand("serve", "serve the HTTP API");
  serve_cmd->add_option("--index", serve_index, "index file")
      ->envname("DSX_INDEX")->required();
  serve_cmd->add_option("--corpus", serve_corpus, "corpus (JSON Lines)")
      ->envname("DSX_CORPUS")->required();
  serve_cmd->add_option("--port", port, "port")->envname("DSX_PORT")->default_val(8080);
  serve_cmd->add_option("--host", host, "address to bind");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*index_cmd) return run_index(ia);
    if (*search_cmd) {
      if (sa.query.empty() && sa.old_text.empty() && sa.new_text.empty()) {
        std::cerr << "dsx search: give --old/--new or --query\n";
        return 2;
      }
      if (!sa.exhaustive && sa.index.empty()) {
        std::cerr << "dsx search: --index is required unless --exhaustive\n";
        return 2;
      }
      return run_search(sa);
    }
    if (*eval_cmd) return run_eval(ea);
    if (*serve_cmd) return run_serve(serve_index, serve_corpus, host, port);
  } catch (const QueryParseError& e) {
    std::string where = e.side() == "query" ? "query" : e.side() + " side of the query";
    std::cerr << "dsx: " << where << ", line " << e.line() << ", column "
              << e.column() << ": " << e.detail() << "\n";
    return 1;
  } catch (const Error& e) {
    std::cerr << "dsx: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
