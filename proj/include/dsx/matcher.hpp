#pragma once

// Exact matching of a change against a query.
//
// Each query side expands (placeholders -> subtrees of their category,
// wildcards -> skipped statements or an optional expression) into part of
// the change side. The query's statement list is anchored at one nesting
// level of the change: it maps onto an order-preserving subsequence of the
// children of some node. Below the anchor every change node must be
// accounted for, either by a query node or by a wildcard. Named
// placeholders bind once, across both sides.

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dsx/grammar.hpp"
#include "dsx/ingestion.hpp"
#include "dsx/query.hpp"

namespace dsx {

struct MatchOptions {
  // Node-pair attempts before giving up.
  std::size_t budget = 1'000'000;
};

struct NodePair {
  Side side = Side::kOld;
  NodeId query = kNoNode;
  NodeId change = kNoNode;
};

struct PlaceholderBinding {
  PlaceholderSpec spec;
  Side side = Side::kOld;  // where the bound subtree lives
  NodeId change = kNoNode;
};

struct WildcardExpansion {
  Side side = Side::kOld;
  NodeId wildcard = kNoNode;
  std::vector<NodeId> absorbed;  // consecutive change siblings, maybe none
};

struct AnchorPoint {
  Side side = Side::kOld;
  // Change node whose children host the query's statements; for a bare
  // expression query, the matched `expr` node. kNoNode for `_`.
  NodeId change = kNoNode;
};

struct NodeMapping {
  std::vector<NodePair> pairs;
  std::vector<PlaceholderBinding> bindings;  // named placeholders only
  std::vector<WildcardExpansion> wildcards;
  std::vector<AnchorPoint> anchors;          // old side first
};

struct MatchResult {
  bool matched = false;
  // The search gave up; reported as a non-match.
  bool budget_exceeded = false;
  std::size_t attempts = 0;
  std::optional<NodeMapping> witness;
};

// First witness of a depth-first, left-to-right search.
MatchResult matches(const ParsedChange& change, const ParsedQuery& query,
                    const MatchOptions& options = {});
// Parses both; propagates parse errors.
MatchResult matches(const CodeChange& change, const Query& query,
                    const MatchOptions& options = {});

// False when some concrete token of a query side is missing from the
// corresponding change side, which rules out a match.
bool prune_by_leaves(const ParsedChange& change, const ParsedQuery& query);
bool prune_by_leaves(const CodeChange& change, const Query& query);

// Named bindings as (spelling, rendered subtree), sorted by spelling.
std::vector<std::pair<std::string, std::string>> binding_texts(
    const ParsedChange& change, const NodeMapping& witness);

}  // namespace dsx
