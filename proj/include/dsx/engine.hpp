#pragma once

// Query pipeline: parse -> featurize -> retrieve k -> prune -> match.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dsx/features.hpp"
#include "dsx/index.hpp"
#include "dsx/ingestion.hpp"
#include "dsx/matcher.hpp"
#include "dsx/query.hpp"

namespace dsx {

enum class SearchMode : std::uint8_t { kIndexed, kExhaustive };

struct SearchConfig {
  std::size_t k = 5000;
  std::size_t l = 1000;
  std::size_t max_results = 10;
  std::size_t search_budget = 1'000'000;
  SearchMode mode = SearchMode::kIndexed;

  // Throws ConfigError.
  void validate() const;
};

struct SearchResult {
  CodeChange change;
  std::size_t rank = 0;             // 1-based, retrieval order kept
  std::optional<double> distance;   // absent in exhaustive mode
  std::vector<std::pair<std::string, std::string>> bindings;
};

struct SearchStats {
  std::size_t retrieved = 0;   // candidates considered
  std::size_t pruned = 0;      // rejected by the leaf-token filter
  std::size_t matched = 0;
  std::size_t budget_exceeded = 0;
  double elapsed_ms = 0.0;
};

struct SearchResponse {
  std::vector<SearchResult> results;
  SearchStats stats;
};

// Indexed mode stops after max_results matches; exhaustive mode scans the
// whole corpus and returns every match. Throws QueryParseError,
// IndexMismatch (index length differs from config.l, or index and corpus
// sizes differ) and ConfigError.
SearchResponse search(const Query& query, const SearchConfig& config,
                      const Corpus& corpus, const VectorIndex& index);
SearchResponse search(const ParsedQuery& query, const SearchConfig& config,
                      const Corpus& corpus, const VectorIndex& index);

enum class Strategy : std::uint8_t { kAsIs, kLess, kMore, kGeneralized };

std::string_view strategy_name(Strategy s);
// Accepts as-is, less, more, generalized. Throws ConfigError.
Strategy parse_strategy(std::string_view name);

struct GenerationConfig {
  double p_less = 0.25;
  double p_more = 0.75;
  double p_generalized = 0.95;

  double probability(Strategy s) const;
};

struct GeneratedQuery {
  Query query;
  ChangeId source = 0;
  Strategy strategy = Strategy::kAsIs;
};

// Abstracts one change into a query that still matches it. Terminals are
// replaced by their placeholders independently with the strategy's
// probability; a text occurring more than once in the change gets a named
// placeholder. `generalized` also folds compound expressions whose
// terminals were all replaced into one EXPR.
// as-is keeps the original lines. An empty side becomes `_`. Throws the
// change's parse errors.
Query abstract_change(const CodeChange& change, Strategy strategy,
                      std::uint64_t seed, const GenerationConfig& config = {});

// Samples n distinct parseable changes (fewer if the corpus is smaller).
// Same (corpus, strategy, n, seed) -> same list. Throws EmptyCorpus.
std::vector<GeneratedQuery> generate_ground_truth_queries(
    const Corpus& corpus, Strategy strategy, std::size_t n, std::uint64_t seed,
    const GenerationConfig& config = {});

struct QueryRecall {
  std::size_t truth = 0;     // exhaustive matches
  std::size_t found = 0;     // of those, returned by indexed mode
  double recall = 0.0;
  std::size_t query_chars = 0;
  double mean_result_chars = 0.0;
};

struct RecallReport {
  std::vector<QueryRecall> per_query;
  double mean_recall = 0.0;
  double mean_truth = 0.0;
  double mean_query_chars = 0.0;
  double mean_result_chars = 0.0;
};

// Ground truth from exhaustive mode; indexed mode runs with max_results
// lifted to k. Queries without any exhaustive match are left out of the
// mean.
RecallReport measure_recall(std::span<const Query> queries,
                            const Corpus& corpus, const VectorIndex& index,
                            const SearchConfig& config);

}  // namespace dsx
