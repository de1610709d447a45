#pragma once

// MiniLang: the reference target language, its query extension, and the
// relaxed parser that turns (possibly incomplete) hunk lines into parse trees.
//
// Trees are stored in an arena; nodes are addressed by NodeId. Every
// expression occurrence is wrapped in an `expr` node whose single child is
// the concrete form (binary, call, identifier terminal, placeholder, ...).

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dsx {

enum class Category : std::uint8_t { kExpr, kId, kLt, kOp, kBinOp, kUnOp };

std::string_view category_name(Category c);

struct PlaceholderSpec {
  Category category = Category::kExpr;
  std::optional<std::uint32_t> name;

  bool named() const { return name.has_value(); }
  // `EXPR`, `ID<3>`, ...
  std::string spelling() const;

  friend bool operator==(const PlaceholderSpec&,
                         const PlaceholderSpec&) = default;
};

enum class TokenType : std::uint8_t {
  kIdentifier,
  kIntLiteral,
  kStringLiteral,
  kBoolLiteral,
  kKeyword,
  kOperator,
  kPunct,
  kPlaceholder,
  kWildcard,
  kEmpty,
};

struct Token {
  TokenType type;
  std::string text;
  std::size_t line = 0;    // 1-based
  std::size_t column = 0;  // 1-based
  std::optional<PlaceholderSpec> placeholder;

  bool is(TokenType t, std::string_view s) const {
    return type == t && text == s;
  }
};

// Maximal-munch lexing of MiniLang plus query tokens. Lines are lexed
// independently; a string literal may not span lines.
std::vector<Token> tokenize(std::span<const std::string> lines);
std::vector<Token> tokenize(std::string_view text);

enum class NodeKind : std::uint8_t {
  kNonterminal,
  kTerminal,
  kPlaceholder,
  kWildcard,
  kEmptyMarker,
};

enum class Rule : std::uint8_t {
  kSnippet,
  kBlock,
  kIfStmt,
  kWhileStmt,
  kReturnStmt,
  kExprStmt,
  kAssignStmt,
  kVarDecl,
  kExpr,
  kBinary,
  kUnary,
  kPostfix,
  kCall,
  kMember,
  kParen,
  kExprList,
};

std::string_view rule_name(Rule r);

// Syntactic role of a terminal; decides which placeholder category may
// stand for it.
enum class TermRole : std::uint8_t {
  kNone,
  kIdentifier,
  kLiteral,
  kAssignOp,
  kBinaryOp,
  kUnaryOp,
  kPostfixOp,
  kKeyword,
  kPunct,
};

enum class SnippetMode : std::uint8_t { kCode, kQuery };

struct Snippet {
  std::vector<std::string> lines;
  SnippetMode mode = SnippetMode::kCode;
};

struct Span {
  std::uint32_t line = 0;
  std::uint32_t column = 0;
  std::uint32_t end_line = 0;
  std::uint32_t end_column = 0;
};

using NodeId = std::uint32_t;
inline constexpr NodeId kNoNode = 0xffffffffu;

class ParseTree {
 public:
  ParseTree() = default;

  NodeId root() const { return root_; }
  std::size_t size() const { return nodes_.size(); }
  SnippetMode mode() const { return mode_; }

  NodeKind kind(NodeId n) const { return nodes_[n].kind; }
  // Rule name for nonterminals; token text for terminals; spelling for
  // placeholders; `<...>` and `_` for wildcards and the empty marker.
  std::string_view label(NodeId n) const;
  Rule rule(NodeId n) const { return nodes_[n].rule; }
  TermRole role(NodeId n) const { return nodes_[n].role; }
  bool synthetic(NodeId n) const { return nodes_[n].synthetic; }
  std::optional<PlaceholderSpec> placeholder(NodeId n) const;
  std::optional<Span> span(NodeId n) const;
  NodeId parent(NodeId n) const { return nodes_[n].parent; }
  std::span<const NodeId> children(NodeId n) const {
    const Node& node = nodes_[n];
    return {edges_.data() + node.first_child, node.child_count};
  }

  bool is_nonterminal(NodeId n, Rule r) const {
    return kind(n) == NodeKind::kNonterminal && rule(n) == r;
  }
  bool is_terminal(NodeId n, std::string_view text) const {
    return kind(n) == NodeKind::kTerminal && label(n) == text;
  }

  // `_` query side.
  bool is_empty_marker() const {
    return !nodes_.empty() && kind(root_) == NodeKind::kEmptyMarker;
  }
  // A code side with no lines (or only blank lines).
  bool is_empty() const;
  // The snippet is a single expression without a terminating `;`. The
  // returned node is the `expr` wrapper inside the expression statement.
  std::optional<NodeId> bare_expression() const;

  // Preorder list of all nodes reachable from `from`.
  std::vector<NodeId> preorder(NodeId from) const;
  std::vector<NodeId> preorder() const { return preorder(root_); }

  // Terminal labels (including synthetic block closes) below `from`.
  std::vector<NodeId> leaves(NodeId from) const;

  class Builder;

 private:
  struct Node {
    NodeKind kind = NodeKind::kNonterminal;
    TermRole role = TermRole::kNone;
    Rule rule = Rule::kSnippet;
    Category category = Category::kExpr;
    bool synthetic = false;
    bool has_span = false;
    std::int64_t placeholder_name = -1;
    std::uint32_t label_offset = 0;
    std::uint32_t label_length = 0;
    std::uint32_t first_child = 0;
    std::uint32_t child_count = 0;
    NodeId parent = kNoNode;
    Span span;
  };

  std::vector<Node> nodes_;
  std::vector<NodeId> edges_;
  std::string text_;
  NodeId root_ = kNoNode;
  SnippetMode mode_ = SnippetMode::kCode;
};

struct ParseOptions {
  // Disable every relaxation (orphan `}`, unclosed `{`, bare expression).
  bool strict = false;
};

// Throws LexError, SyntaxError or QueryTokenInCodeMode.
ParseTree parse_snippet(const Snippet& snippet, ParseOptions options = {});

// Structural equality on (label, kind, children); spans and the synthetic
// flag are ignored.
bool trees_equal(const ParseTree& a, const ParseTree& b);
bool subtrees_equal(const ParseTree& a, NodeId na, const ParseTree& b,
                    NodeId nb);

// Canonical single-line text of the non-synthetic terminals below `from`.
std::string render(const ParseTree& tree, NodeId from);
std::string render(const ParseTree& tree);
// Like render(), but keeps the source line structure.
std::vector<std::string> render_lines(const ParseTree& tree);
// A node for which `replace` returns text is emitted as that one token
// instead of its subtree.
std::vector<std::string> render_lines(
    const ParseTree& tree,
    const std::function<std::optional<std::string>(NodeId)>& replace);

// Bracketed debug form, e.g. `(expr_stmt (expr x) ;)`.
std::string to_sexpr(const ParseTree& tree, NodeId from);
std::string to_sexpr(const ParseTree& tree);

}  // namespace dsx
