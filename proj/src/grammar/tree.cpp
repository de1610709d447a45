#include <array>
#include <cctype>

#include "dsx/grammar.hpp"
#include "tree_builder.hpp"

namespace dsx {

std::string_view category_name(Category c) {
  switch (c) {
    case Category::kExpr:
      return "EXPR";
    case Category::kId:
      return "ID";
    case Category::kLt:
      return "LT";
    case Category::kOp:
      return "OP";
    case Category::kBinOp:
      return "binOP";
    case Category::kUnOp:
      return "unOP";
  }
  return "?";
}

std::string PlaceholderSpec::spelling() const {
  std::string s(category_name(category));
  if (name) s += "<" + std::to_string(*name) + ">";
  return s;
}

std::string_view rule_name(Rule r) {
  static constexpr std::array<std::string_view, 16> kNames = {
      "snippet",     "block",    "if_stmt", "while_stmt", "return_stmt",
      "expr_stmt",   "assign_stmt", "var_decl", "expr",   "binary",
      "unary",       "postfix",  "call",    "member",     "paren",
      "expr_list"};
  return kNames[static_cast<std::size_t>(r)];
}

std::string_view ParseTree::label(NodeId n) const {
  const Node& node = nodes_[n];
  if (node.kind == NodeKind::kNonterminal) return rule_name(node.rule);
  return std::string_view(text_).substr(node.label_offset, node.label_length);
}

std::optional<PlaceholderSpec> ParseTree::placeholder(NodeId n) const {
  const Node& node = nodes_[n];
  if (node.kind != NodeKind::kPlaceholder) return std::nullopt;
  PlaceholderSpec spec{node.category, std::nullopt};
  if (node.placeholder_name >= 0) {
    spec.name = static_cast<std::uint32_t>(node.placeholder_name);
  }
  return spec;
}

std::optional<Span> ParseTree::span(NodeId n) const {
  if (!nodes_[n].has_span) return std::nullopt;
  return nodes_[n].span;
}

bool ParseTree::is_empty() const {
  return nodes_.empty() || (kind(root_) == NodeKind::kNonterminal &&
                            children(root_).empty());
}

std::optional<NodeId> ParseTree::bare_expression() const {
  if (nodes_.empty() || kind(root_) != NodeKind::kNonterminal) {
    return std::nullopt;
  }
  auto top = children(root_);
  if (top.size() != 1 || !is_nonterminal(top[0], Rule::kExprStmt)) {
    return std::nullopt;
  }
  auto parts = children(top[0]);
  if (parts.size() != 1) return std::nullopt;
  return parts[0];
}

std::vector<NodeId> ParseTree::preorder(NodeId from) const {
  std::vector<NodeId> out;
  if (nodes_.empty()) return out;
  std::vector<NodeId> stack{from};
  while (!stack.empty()) {
    NodeId n = stack.back();
    stack.pop_back();
    out.push_back(n);
    auto kids = children(n);
    for (auto it = kids.rbegin(); it != kids.rend(); ++it) stack.push_back(*it);
  }
  return out;
}

std::vector<NodeId> ParseTree::leaves(NodeId from) const {
  std::vector<NodeId> out;
  for (NodeId n : preorder(from)) {
    if (children(n).empty() && kind(n) != NodeKind::kNonterminal) {
      out.push_back(n);
    }
  }
  return out;
}

ParseTree::Builder::Builder(SnippetMode mode) { tree_.mode_ = mode; }

NodeId ParseTree::Builder::add_leaf(NodeKind kind, std::string_view text,
                                    const Token* token) {
  Node node;
  node.kind = kind;
  node.label_offset = static_cast<std::uint32_t>(tree_.text_.size());
  node.label_length = static_cast<std::uint32_t>(text.size());
  tree_.text_.append(text);
  node.first_child = static_cast<std::uint32_t>(tree_.edges_.size());
  if (token != nullptr) {
    node.has_span = true;
    node.span.line = static_cast<std::uint32_t>(token->line);
    node.span.column = static_cast<std::uint32_t>(token->column);
    node.span.end_line = node.span.line;
    node.span.end_column =
        static_cast<std::uint32_t>(token->column + token->text.size());
  }
  tree_.nodes_.push_back(node);
  return static_cast<NodeId>(tree_.nodes_.size() - 1);
}

NodeId ParseTree::Builder::terminal(const Token& token, TermRole role) {
  NodeId id = add_leaf(NodeKind::kTerminal, token.text, &token);
  tree_.nodes_[id].role = role;
  return id;
}

NodeId ParseTree::Builder::synthetic_terminal(std::string_view text,
                                              TermRole role) {
  NodeId id = add_leaf(NodeKind::kTerminal, text, nullptr);
  tree_.nodes_[id].role = role;
  tree_.nodes_[id].synthetic = true;
  return id;
}

NodeId ParseTree::Builder::placeholder(const Token& token) {
  NodeId id = add_leaf(NodeKind::kPlaceholder, token.text, &token);
  Node& node = tree_.nodes_[id];
  node.category = token.placeholder->category;
  node.placeholder_name =
      token.placeholder->name ? static_cast<std::int64_t>(*token.placeholder->name)
                              : -1;
  return id;
}

NodeId ParseTree::Builder::wildcard(const Token& token) {
  return add_leaf(NodeKind::kWildcard, token.text, &token);
}

NodeId ParseTree::Builder::empty_marker(const Token& token) {
  return add_leaf(NodeKind::kEmptyMarker, token.text, &token);
}

NodeId ParseTree::Builder::nonterminal(Rule rule,
                                       std::span<const NodeId> children) {
  Node node;
  node.kind = NodeKind::kNonterminal;
  node.rule = rule;
  node.first_child = static_cast<std::uint32_t>(tree_.edges_.size());
  node.child_count = static_cast<std::uint32_t>(children.size());
  NodeId id = static_cast<NodeId>(tree_.nodes_.size());
  for (NodeId c : children) {
    tree_.edges_.push_back(c);
    tree_.nodes_[c].parent = id;
    const Node& child = tree_.nodes_[c];
    if (!child.has_span) continue;
    if (!node.has_span) {
      node.has_span = true;
      node.span.line = child.span.line;
      node.span.column = child.span.column;
    }
    node.span.end_line = child.span.end_line;
    node.span.end_column = child.span.end_column;
  }
  tree_.nodes_.push_back(node);
  return id;
}

ParseTree ParseTree::Builder::finish(NodeId root) && {
  tree_.root_ = root;
  return std::move(tree_);
}

bool subtrees_equal(const ParseTree& a, NodeId na, const ParseTree& b,
                    NodeId nb) {
  if (a.kind(na) != b.kind(nb)) return false;
  if (a.kind(na) == NodeKind::kNonterminal) {
    if (a.rule(na) != b.rule(nb)) return false;
  } else if (a.label(na) != b.label(nb)) {
    return false;
  }
  auto ca = a.children(na);
  auto cb = b.children(nb);
  if (ca.size() != cb.size()) return false;
  for (std::size_t i = 0; i < ca.size(); ++i) {
    if (!subtrees_equal(a, ca[i], b, cb[i])) return false;
  }
  return true;
}

bool trees_equal(const ParseTree& a, const ParseTree& b) {
  if (a.size() == 0 || b.size() == 0) return a.size() == b.size();
  return subtrees_equal(a, a.root(), b, b.root());
}

namespace {

bool word_like(std::string_view tok) {
  if (tok.empty()) return false;
  char c = tok.back();
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '>' ||
         c == '"' || tok == ")";
}

// Canonical spacing: tokens are separated by one space except around
// punctuation that reads better tight. The output always re-lexes to the
// same token sequence.
void append_token(std::string& out, std::string_view prev,
                  std::string_view tok) {
  if (!out.empty()) {
    bool tight = tok == ")" || tok == "," || tok == ";" || tok == "." ||
                 prev == "(" || prev == "." ||
                 (tok == "(" && word_like(prev) && prev != "<...>" && prev != "if" &&
                  prev != "while" && prev != "return");
    if (!tight) out += ' ';
  }
  out.append(tok);
}

}  // namespace

std::string render(const ParseTree& tree, NodeId from) {
  std::string out;
  std::string_view prev;
  for (NodeId n : tree.leaves(from)) {
    if (tree.synthetic(n)) continue;
    std::string_view tok = tree.label(n);
    append_token(out, prev, tok);
    prev = tok;
  }
  return out;
}

std::string render(const ParseTree& tree) {
  if (tree.size() == 0) return {};
  return render(tree, tree.root());
}

std::vector<std::string> render_lines(const ParseTree& tree) {
  return render_lines(tree, [](NodeId) { return std::optional<std::string>(); });
}

std::vector<std::string> render_lines(
    const ParseTree& tree,
    const std::function<std::optional<std::string>(NodeId)>& replace) {
  std::vector<std::string> lines;
  if (tree.size() == 0) return lines;
  std::uint32_t current = 0;
  std::string prev;
  auto emit = [&](std::string_view tok, std::optional<Span> sp) {
    std::uint32_t line = sp ? sp->line : current;
    if (lines.empty() || line != current) {
      lines.emplace_back();
      current = line;
      prev.clear();
    }
    append_token(lines.back(), prev, tok);
    prev = std::string(tok);
  };
  std::vector<NodeId> stack{tree.root()};
  while (!stack.empty()) {
    NodeId n = stack.back();
    stack.pop_back();
    if (auto text = replace(n)) {
      emit(*text, tree.span(n));
      continue;
    }
    auto kids = tree.children(n);
    if (kids.empty()) {
      if (tree.kind(n) != NodeKind::kNonterminal && !tree.synthetic(n)) {
        emit(tree.label(n), tree.span(n));
      }
      continue;
    }
    for (auto it = kids.rbegin(); it != kids.rend(); ++it) stack.push_back(*it);
  }
  return lines;
}

std::string to_sexpr(const ParseTree& tree, NodeId from) {
  auto kids = tree.children(from);
  std::string label(tree.label(from));
  if (tree.synthetic(from)) label += "*";
  if (kids.empty()) {
    return tree.kind(from) == NodeKind::kNonterminal ? "(" + label + ")"
                                                      : label;
  }
  std::string out = "(" + label;
  for (NodeId c : kids) out += " " + to_sexpr(tree, c);
  return out + ")";
}

std::string to_sexpr(const ParseTree& tree) {
  if (tree.size() == 0) return "()";
  return to_sexpr(tree, tree.root());
}

}  // namespace dsx
