#pragma once

#include <initializer_list>

#include "dsx/grammar.hpp"

namespace dsx {

// Appends nodes bottom-up; a node's children must exist before it.
class ParseTree::Builder {
 public:
  explicit Builder(SnippetMode mode);

  NodeId terminal(const Token& token, TermRole role);
  NodeId synthetic_terminal(std::string_view text, TermRole role);
  NodeId placeholder(const Token& token);
  NodeId wildcard(const Token& token);
  NodeId empty_marker(const Token& token);
  NodeId nonterminal(Rule rule, std::span<const NodeId> children);
  NodeId nonterminal(Rule rule, std::initializer_list<NodeId> children) {
    return nonterminal(rule, std::span<const NodeId>(children.begin(),
                                                     children.size()));
  }

  ParseTree finish(NodeId root) &&;

 private:
  NodeId add_leaf(NodeKind kind, std::string_view text, const Token* token);

  ParseTree tree_;
};

}  // namespace dsx
