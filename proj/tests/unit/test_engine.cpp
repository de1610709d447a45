#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "dsx/engine.hpp"
#include "dsx/error.hpp"
#include "dsx/synth.hpp"
#include "fixtures.hpp"

using namespace dsx;

namespace {

Corpus three_corpus() {
  Corpus c;
  for (const auto& ch : fixtures::three_changes()) c.append_change(ch);
  return c;
}

std::set<ChangeId> ids(const SearchResponse& r) {
  std::set<ChangeId> out;
  for (const auto& res : r.results) out.insert(res.change.id);
  return out;
}

struct Fixture {
  Corpus corpus = synthesize_corpus(2000, 31);
  VectorIndex index = build_index(corpus);
};

Fixture& shared() {
  static Fixture f;
  return f;
}

}  // namespace

TEST_CASE("search: running example") {
  Corpus corpus = three_corpus();
  VectorIndex index = build_index(corpus);
  SearchConfig cfg;
  cfg.k = 3;
  SearchResponse r = search(fixtures::swap_query(), cfg, corpus, index);
  REQUIRE(r.results.size() == 1);
  const SearchResult& hit = r.results[0];
  CHECK(hit.change.id == 1);
  CHECK(hit.change == fixtures::three_changes()[1]);
  CHECK(hit.rank == 1);
  CHECK(hit.distance.has_value());
  CHECK(hit.bindings == std::vector<std::pair<std::string, std::string>>{
                            {"EXPR<1>", "x"}, {"EXPR<2>", "y"}, {"ID<1>", "isValidPoint"}});
  CHECK(r.stats.retrieved == 3);
  CHECK(r.stats.matched == 1);
  CHECK(r.stats.pruned >= 1);

  cfg.mode = SearchMode::kExhaustive;
  SearchResponse e = search(fixtures::swap_query(), cfg, corpus, VectorIndex(1000));
  REQUIRE(e.results.size() == 1);
  CHECK(e.results[0].change.id == 1);
  CHECK_FALSE(e.results[0].distance.has_value());
}

TEST_CASE("search: errors") {
  Corpus corpus = three_corpus();
  VectorIndex index = build_index(corpus);
  SearchConfig cfg;
  CHECK_THROWS_AS(search(fixtures::q("_", "_"), cfg, corpus, index), QueryParseError);
  try {
    search(fixtures::q("a();", "b(;"), cfg, corpus, index);
    FAIL("expected QueryParseError");
  } catch (const QueryParseError& e) {
    CHECK(e.side() == "new");
    CHECK(e.line() == 1);
  }
  cfg.l = 996;
  CHECK_THROWS_AS(search(fixtures::swap_query(), cfg, corpus, index), IndexMismatch);
  cfg.l = 1000;
  Corpus bigger = three_corpus();
  bigger.append_change(fixtures::change({"a();"}, {}));
  CHECK_THROWS_AS(search(fixtures::swap_query(), cfg, bigger, index), IndexMismatch);

  auto bad = [&](auto mutate) {
    SearchConfig c;
    mutate(c);
    c.validate();
  };
  CHECK_THROWS_AS(bad([](SearchConfig& c) { c.k = 0; }), ConfigError);
  CHECK_THROWS_AS(bad([](SearchConfig& c) { c.l = 10; }), ConfigError);
  CHECK_THROWS_AS(bad([](SearchConfig& c) { c.max_results = 0; }), ConfigError);
}

TEST_CASE("search: max_results and ranking") {
  auto& f = shared();
  Query broad = fixtures::q("EXPR", "EXPR");
  SearchConfig cfg;
  cfg.max_results = 7;
  SearchResponse r = search(broad, cfg, f.corpus, f.index);
  CHECK(r.results.size() == 7);
  for (std::size_t i = 0; i < r.results.size(); ++i) {
    CHECK(r.results[i].rank == i + 1);
    if (i > 0) CHECK(*r.results[i - 1].distance <= *r.results[i].distance);
  }
  // Rank stability.
  SearchResponse again = search(broad, cfg, f.corpus, f.index);
  REQUIRE(again.results.size() == r.results.size());
  for (std::size_t i = 0; i < r.results.size(); ++i) {
    CHECK(again.results[i].change.id == r.results[i].change.id);
  }
}

TEST_CASE("indexed results are contained in exhaustive results") {
  auto& f = shared();
  auto queries = generate_ground_truth_queries(f.corpus, Strategy::kAsIs, 200, 4);
  REQUIRE(queries.size() == 200);
  SearchConfig indexed;
  indexed.k = 500;
  indexed.max_results = 500;
  SearchConfig exhaustive = indexed;
  exhaustive.mode = SearchMode::kExhaustive;
  for (const auto& g : queries) {
    auto a = ids(search(g.query, indexed, f.corpus, f.index));
    auto b = ids(search(g.query, exhaustive, f.corpus, f.index));
    CHECK(b.count(g.source) == 1);
    CHECK(std::includes(b.begin(), b.end(), a.begin(), a.end()));
  }
}

TEST_CASE("every result matches the query") {
  auto& f = shared();
  for (Strategy s : {Strategy::kLess, Strategy::kMore, Strategy::kGeneralized}) {
    for (const auto& g : generate_ground_truth_queries(f.corpus, s, 15, 12)) {
      SearchConfig cfg;
      cfg.max_results = 50;
      SearchResponse r = search(g.query, cfg, f.corpus, f.index);
      ParsedQuery pq = parse_query(g.query);
      for (const auto& res : r.results) {
        CHECK(matches(*f.corpus.trees(res.change.id), pq).matched);
      }
    }
  }
}

TEST_CASE("query generation") {
  auto cs = fixtures::three_changes();
  Query asis = abstract_change(cs[1], Strategy::kAsIs, 1);
  CHECK(asis.old_lines == cs[1].old_lines);
  CHECK(asis.new_lines == cs[1].new_lines);
  CHECK(abstract_change(fixtures::change({"a();"}, {}), Strategy::kAsIs, 1).new_lines ==
        std::vector<std::string>{"_"});

  // Generalized: callee and arguments abstracted, swap preserved.
  Query gen = abstract_change(cs[1], Strategy::kGeneralized, 3,
                              GenerationConfig{0.25, 0.75, 1.0});
  CHECK(gen.old_lines == std::vector<std::string>{"if (ID<1>(ID<2>, ID<3>)) {"});
  CHECK(gen.new_lines == std::vector<std::string>{"if (ID<1>(ID<3>, ID<2>)) {"});
  CHECK(matches(cs[1], gen).matched);

  auto& f = shared();
  for (Strategy s : {Strategy::kAsIs, Strategy::kLess, Strategy::kMore, Strategy::kGeneralized}) {
    auto a = generate_ground_truth_queries(f.corpus, s, 30, 77);
    auto b = generate_ground_truth_queries(f.corpus, s, 30, 77);
    REQUIRE(a.size() == 30);
    std::set<ChangeId> sources;
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].query.old_lines == b[i].query.old_lines);
      CHECK(a[i].query.new_lines == b[i].query.new_lines);
      CHECK(a[i].strategy == s);
      sources.insert(a[i].source);
      CHECK(matches(f.corpus.change(a[i].source), a[i].query).matched);
    }
    CHECK(sources.size() == 30);
  }
  CHECK(generate_ground_truth_queries(three_corpus(), Strategy::kMore, 10, 1).size() == 3);
  CHECK_THROWS_AS(generate_ground_truth_queries(Corpus{}, Strategy::kMore, 10, 1), EmptyCorpus);
  CHECK(parse_strategy("generalized") == Strategy::kGeneralized);
  CHECK(strategy_name(Strategy::kLess) == "less");
  CHECK_THROWS_AS(parse_strategy("most"), ConfigError);
}

TEST_CASE("measure_recall") {
  auto& f = shared();
  std::vector<Query> qs;
  for (const auto& g : generate_ground_truth_queries(f.corpus, Strategy::kMore, 10, 8)) {
    qs.push_back(g.query);
  }
  SearchConfig all;
  all.k = f.corpus.size();
  RecallReport full = measure_recall(qs, f.corpus, f.index, all);
  CHECK(full.per_query.size() == 10);
  CHECK(full.mean_recall == doctest::Approx(1.0));
  for (const auto& q : full.per_query) {
    CHECK(q.truth >= 1);
    CHECK(q.found == q.truth);
    CHECK(q.query_chars > 0);
  }
  SearchConfig few;
  few.k = 5;
  RecallReport small = measure_recall(qs, f.corpus, f.index, few);
  CHECK(small.mean_recall <= full.mean_recall);
  CHECK(small.mean_truth == full.mean_truth);
}
