#pragma once

// Small randomized (change, query) families for differential tests.

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "dsx/engine.hpp"
#include "dsx/error.hpp"
#include "dsx/ingestion.hpp"
#include "dsx/query.hpp"

namespace dsx::families {

// Statements of at most four tokens.
inline const std::vector<std::string>& code_statements() {
  static const std::vector<std::string> s{
      "a();", "b();", "x = 1;", "x = a;", "y = 1;", "return x;", "x++;",
      "-x;",  "a;",   "y = b;", "return;", "}"};
  return s;
}

inline const std::vector<std::string>& query_statements() {
  static const std::vector<std::string> s{
      "a();",    "x = 1;",     "x = a;",  "return x;", "x++;",   "ID();",
      "ID<1>();", "x = LT;",   "ID = EXPR;", "ID<1> = LT;", "EXPR;",
      "<...>",   "return EXPR;", "ID++;",  "unOP ID;",  "ID = ID<1>;",
      "EXPR<1>;", "ID<1> = LT<1>;", "return;", "}", "OP;"};
  return s;
}

inline std::vector<std::string> pick(const std::vector<std::string>& pool,
                                     std::size_t lo, std::size_t hi,
                                     std::mt19937_64& rng) {
  std::size_t n = std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(pool[rng() % pool.size()]);
  return out;
}

inline CodeChange small_change(std::mt19937_64& rng) {
  for (;;) {
    CodeChange c;
    c.old_lines = pick(code_statements(), 0, 3, rng);
    c.new_lines = pick(code_statements(), 0, 3, rng);
    try {
      validate_change(c);
      return c;
    } catch (const Error&) {
    }
  }
}

inline std::vector<std::string> query_side(std::mt19937_64& rng) {
  switch (rng() % 8) {
    case 0: return {"_"};
    case 1: return {"EXPR"};
    case 2: return {"ID"};
    default: return pick(query_statements(), 1, 3, rng);
  }
}

inline Query small_query(std::mt19937_64& rng) {
  for (;;) {
    Query q{query_side(rng), query_side(rng)};
    try {
      parse_query(q);
      return q;
    } catch (const Error&) {
    }
  }
}

// Half enumerated queries, half queries abstracted from a change of the
// family (so positives are common).
inline std::vector<std::pair<CodeChange, Query>> small_pairs(std::size_t n,
                                                             std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::pair<CodeChange, Query>> out;
  while (out.size() < n) {
    CodeChange c = small_change(rng);
    if (rng() % 2 == 0) {
      out.emplace_back(std::move(c), small_query(rng));
    } else {
      auto strategy = static_cast<Strategy>(rng() % 4);
      CodeChange source = rng() % 3 == 0 ? small_change(rng) : c;
      out.emplace_back(std::move(c), abstract_change(source, strategy, rng()));
    }
  }
  return out;
}

// Changes from the synthetic corpus paired with queries generated from a
// mix of the same change and random others.
inline std::vector<std::pair<CodeChange, Query>> corpus_pairs(const Corpus& corpus,
                                                              std::size_t n,
                                                              std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::pair<CodeChange, Query>> out;
  while (out.size() < n) {
    ChangeId target = static_cast<ChangeId>(rng() % corpus.size());
    ChangeId source = rng() % 2 == 0 ? target : static_cast<ChangeId>(rng() % corpus.size());
    auto strategy = static_cast<Strategy>(rng() % 4);
    out.emplace_back(corpus.change(target),
                     abstract_change(corpus.change(source), strategy, rng()));
  }
  return out;
}

}  // namespace dsx::families
