#include "dsx/engine.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <numeric>
#include <random>
#include <unordered_set>

#include "dsx/error.hpp"

namespace dsx {

void SearchConfig::validate() const {
  if (k < 1) throw ConfigError("k must be at least 1");
  if (max_results < 1) throw ConfigError("max_results must be at least 1");
  if (l == 0 || l % 4 != 0) {
    throw ConfigError("l must be a positive multiple of 4, got " + std::to_string(l));
  }
}

namespace {

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - t0)
      .count();
}

}  // namespace

SearchResponse search(const ParsedQuery& query, const SearchConfig& config,
                      const Corpus& corpus, const VectorIndex& index) {
  config.validate();
  auto t0 = std::chrono::steady_clock::now();
  SearchResponse out;
  MatchOptions options{config.search_budget};

  // True once enough results are collected.
  auto consider = [&](ChangeId id, std::optional<double> distance,
                      std::size_t limit) {
    ++out.stats.retrieved;
    auto trees = corpus.trees(id);
    if (!trees) return false;
    if (!prune_by_leaves(*trees, query)) {
      ++out.stats.pruned;
      return false;
    }
    MatchResult r = matches(*trees, query, options);
    if (r.budget_exceeded) ++out.stats.budget_exceeded;
    if (!r.matched) return false;
    SearchResult res;
    res.change = corpus.change(id);
    res.rank = out.results.size() + 1;
    res.distance = distance;
    res.bindings = binding_texts(*trees, *r.witness);
    out.results.push_back(std::move(res));
    return out.results.size() >= limit;
  };

  if (config.mode == SearchMode::kIndexed) {
    if (index.length() != config.l) {
      throw IndexMismatch("index built with l=" + std::to_string(index.length()) +
                          " but search uses l=" + std::to_string(config.l));
    }
    if (index.count() != corpus.size()) {
      throw IndexMismatch("index holds " + std::to_string(index.count()) +
                          " vectors for a corpus of " +
                          std::to_string(corpus.size()));
    }
    FeatureVector v = featurize_query(query, FeatureConfig{config.l, 1});
    for (const Candidate& c : retrieve(index, v, config.k)) {
      if (consider(c.change_id, c.distance, config.max_results)) break;
    }
  } else {
    for (ChangeId id = 0; id < corpus.size(); ++id) {
      consider(id, std::nullopt, static_cast<std::size_t>(-1));
    }
  }
  out.stats.matched = out.results.size();
  out.stats.elapsed_ms = ms_since(t0);
  return out;
}

SearchResponse search(const Query& query, const SearchConfig& config,
                      const Corpus& corpus, const VectorIndex& index) {
  config.validate();
  return search(parse_query(query), config, corpus, index);
}

std::string_view strategy_name(Strategy s) {
  switch (s) {
    case Strategy::kAsIs: return "as-is";
    case Strategy::kLess: return "less";
    case Strategy::kMore: return "more";
    case Strategy::kGeneralized: return "generalized";
  }
  return "?";
}

Strategy parse_strategy(std::string_view name) {
  for (Strategy s : {Strategy::kAsIs, Strategy::kLess, Strategy::kMore,
                     Strategy::kGeneralized}) {
    if (strategy_name(s) == name) return s;
  }
  throw ConfigError("unknown strategy '" + std::string(name) +
                    "' (as-is, less, more, generalized)");
}

double GenerationConfig::probability(Strategy s) const {
  switch (s) {
    case Strategy::kAsIs: return 0.0;
    case Strategy::kLess: return p_less;
    case Strategy::kMore: return p_more;
    case Strategy::kGeneralized: return p_generalized;
  }
  return 0.0;
}

namespace {

std::optional<Category> replaceable(const ParseTree& t, NodeId n) {
  if (t.kind(n) != NodeKind::kTerminal) return std::nullopt;
  switch (t.role(n)) {
    case TermRole::kIdentifier: return Category::kId;
    case TermRole::kLiteral: return Category::kLt;
    case TermRole::kAssignOp: return Category::kOp;
    case TermRole::kBinaryOp: return Category::kBinOp;
    case TermRole::kUnaryOp: return Category::kUnOp;
    default: return std::nullopt;
  }
}

bool compound(const ParseTree& t, NodeId expr) {
  auto kids = t.children(expr);
  return kids.size() == 1 && t.kind(kids[0]) == NodeKind::kNonterminal;
}

std::vector<std::string> side_lines(const ParseTree& tree,
                                    const std::vector<std::string>& raw,
                                    const std::map<NodeId, std::string>* subst) {
  if (tree.is_empty()) return {"_"};
  if (subst == nullptr) return raw;
  return render_lines(tree, [&](NodeId n) -> std::optional<std::string> {
    auto it = subst->find(n);
    if (it == subst->end()) return std::nullopt;
    return it->second;
  });
}

// One abstraction attempt. `keep_binary` leaves binary operators concrete:
// binOP parses at the loosest precedence, so replacing one can regroup the
// expression around it.
Query abstract_once(const CodeChange& change, const ParsedChange& parsed,
                    Strategy strategy, std::uint64_t seed, double p,
                    bool keep_binary) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(p);
  const ParseTree* trees[2] = {&parsed.old_tree, &parsed.new_tree};

  std::map<std::pair<Category, std::string>, int> occurrences;
  for (const ParseTree* t : trees) {
    if (t->is_empty()) continue;
    for (NodeId n : t->preorder()) {
      if (auto c = replaceable(*t, n)) ++occurrences[{*c, std::string(t->label(n))}];
    }
  }

  std::map<NodeId, std::string> subst[2];
  std::map<std::pair<Category, std::string>, std::uint32_t> names;
  std::uint32_t next_name[6] = {1, 1, 1, 1, 1, 1};
  std::vector<char> replaced[2];
  for (int s = 0; s < 2; ++s) {
    const ParseTree& t = *trees[s];
    replaced[s].assign(t.size(), 0);
    if (t.is_empty()) continue;
    for (NodeId n : t.preorder()) {
      auto c = replaceable(t, n);
      if (!c) continue;
      bool hit = coin(rng);
      if (!hit || (keep_binary && *c == Category::kBinOp)) continue;
      replaced[s][n] = 1;
      PlaceholderSpec spec{*c, std::nullopt};
      auto key = std::make_pair(*c, std::string(t.label(n)));
      if (occurrences[key] > 1) {
        auto it = names.find(key);
        if (it == names.end()) {
          it = names.emplace(key, next_name[static_cast<int>(*c)]++).first;
        }
        spec.name = it->second;
      }
      subst[s][n] = spec.spelling();
    }
  }

  if (strategy == Strategy::kGeneralized) {
    // Fold maximal compound expressions whose replaceable terminals were
    // all replaced. Repeated folded texts share a named EXPR. Calls stay
    // unfolded so the callee and argument shape survive.
    std::vector<std::pair<int, NodeId>> folds;
    std::map<std::string, int> fold_texts;
    for (int s = 0; s < 2; ++s) {
      const ParseTree& t = *trees[s];
      if (t.is_empty()) continue;
      std::vector<NodeId> stack{t.root()};
      while (!stack.empty()) {
        NodeId n = stack.back();
        stack.pop_back();
        if (t.is_nonterminal(n, Rule::kExpr) && compound(t, n) &&
            !t.is_nonterminal(t.children(n)[0], Rule::kCall)) {
          std::size_t total = 0, hits = 0;
          for (NodeId d : t.preorder(n)) {
            if (replaceable(t, d)) {
              ++total;
              hits += replaced[s][d];
            }
          }
          if (total > 0 && hits == total) {
            folds.emplace_back(s, t.children(n)[0]);
            ++fold_texts[render(t, n)];
            continue;
          }
        }
        auto kids = t.children(n);
        for (auto it = kids.rbegin(); it != kids.rend(); ++it) stack.push_back(*it);
      }
    }
    std::map<std::string, std::uint32_t> expr_names;
    std::uint32_t next_expr = 1;
    for (auto [s, content] : folds) {
      const ParseTree& t = *trees[s];
      std::string text = render(t, content);
      PlaceholderSpec spec{Category::kExpr, std::nullopt};
      if (fold_texts[render(t, t.parent(content))] > 1) {
        auto it = expr_names.find(text);
        if (it == expr_names.end()) it = expr_names.emplace(text, next_expr++).first;
        spec.name = it->second;
      }
      for (NodeId d : t.preorder(content)) subst[s].erase(d);
      subst[s][content] = spec.spelling();
    }
  }

  Query q;
  q.old_lines = side_lines(parsed.old_tree, change.old_lines, &subst[0]);
  q.new_lines = side_lines(parsed.new_tree, change.new_lines, &subst[1]);
  return q;
}

bool verified(const Query& q, const ParsedChange& parsed) {
  try {
    ParsedQuery pq = parse_query(q);
    return matches(parsed, pq).matched;
  } catch (const Error&) {
    return false;
  }
}

}  // namespace

Query abstract_change(const CodeChange& change, Strategy strategy,
                      std::uint64_t seed, const GenerationConfig& config) {
  ParsedChange parsed = parse_change(change);
  Query as_is{side_lines(parsed.old_tree, change.old_lines, nullptr),
              side_lines(parsed.new_tree, change.new_lines, nullptr)};
  if (strategy == Strategy::kAsIs) return as_is;
  double p = config.probability(strategy);
  for (bool keep_binary : {false, true}) {
    Query q = abstract_once(change, parsed, strategy, seed, p, keep_binary);
    if (verified(q, parsed)) return q;
  }
  return as_is;
}

std::vector<GeneratedQuery> generate_ground_truth_queries(
    const Corpus& corpus, Strategy strategy, std::size_t n, std::uint64_t seed,
    const GenerationConfig& config) {
  if (corpus.empty()) throw EmptyCorpus("cannot sample queries from an empty corpus");
  std::vector<ChangeId> ids(corpus.size());
  std::iota(ids.begin(), ids.end(), ChangeId{0});
  std::mt19937_64 rng(seed);
  std::shuffle(ids.begin(), ids.end(), rng);
  std::vector<GeneratedQuery> out;
  for (ChangeId id : ids) {
    if (out.size() >= n) break;
    if (!corpus.trees(id)) continue;
    std::uint64_t qseed = seed ^ (0x9e3779b97f4a7c15ull * (std::uint64_t{id} + 1));
    Query q = abstract_change(corpus.change(id), strategy, qseed, config);
    out.push_back({std::move(q), id, strategy});
  }
  return out;
}

RecallReport measure_recall(std::span<const Query> queries,
                            const Corpus& corpus, const VectorIndex& index,
                            const SearchConfig& config) {
  RecallReport report;
  SearchConfig exhaustive = config;
  exhaustive.mode = SearchMode::kExhaustive;
  SearchConfig indexed = config;
  indexed.mode = SearchMode::kIndexed;
  indexed.max_results = std::max<std::size_t>(config.k, 1);

  std::size_t counted = 0;
  double result_chars_sum = 0.0;
  std::size_t with_results = 0;
  for (const Query& q : queries) {
    ParsedQuery pq = parse_query(q);
    QueryRecall r;
    r.query_chars = q.char_count();
    SearchResponse truth = search(pq, exhaustive, corpus, index);
    SearchResponse got = search(pq, indexed, corpus, index);
    std::unordered_set<ChangeId> truth_ids;
    for (const auto& res : truth.results) truth_ids.insert(res.change.id);
    r.truth = truth_ids.size();
    double chars = 0.0;
    for (const auto& res : got.results) {
      r.found += truth_ids.count(res.change.id);
      chars += static_cast<double>(res.change.char_count());
    }
    if (!got.results.empty()) {
      r.mean_result_chars = chars / static_cast<double>(got.results.size());
      result_chars_sum += r.mean_result_chars;
      ++with_results;
    }
    if (r.truth > 0) {
      r.recall = static_cast<double>(r.found) / static_cast<double>(r.truth);
      report.mean_recall += r.recall;
      report.mean_truth += static_cast<double>(r.truth);
      ++counted;
    }
    report.mean_query_chars += static_cast<double>(r.query_chars);
    report.per_query.push_back(r);
  }
  if (counted > 0) {
    report.mean_recall /= static_cast<double>(counted);
    report.mean_truth /= static_cast<double>(counted);
  }
  if (!queries.empty()) {
    report.mean_query_chars /= static_cast<double>(queries.size());
  }
  if (with_results > 0) {
    report.mean_result_chars = result_chars_sum / static_cast<double>(with_results);
  }
  return report;
}

}  // namespace dsx
