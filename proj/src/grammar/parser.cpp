#include <vector>

#include "dsx/error.hpp"
#include "dsx/grammar.hpp"
#include "tree_builder.hpp"

namespace dsx {
namespace {

// Binding strength of binary operators; higher binds tighter. `binOP`
// shares the loosest level since it may stand for any of them.
int binary_precedence(const Token& t) {
  if (t.type == TokenType::kPlaceholder) {
    return t.placeholder->category == Category::kBinOp ? 1 : 0;
  }
  if (t.type != TokenType::kOperator) return 0;
  const std::string& op = t.text;
  if (op == "||") return 1;
  if (op == "&&") return 2;
  if (op == "==" || op == "!=") return 3;
  if (op == "<" || op == ">" || op == "<=" || op == ">=") return 4;
  if (op == "+" || op == "-") return 5;
  if (op == "*" || op == "/" || op == "%") return 6;
  return 0;
}

bool is_prefix_op(const Token& t) {
  if (t.type == TokenType::kPlaceholder) {
    return t.placeholder->category == Category::kUnOp;
  }
  return t.type == TokenType::kOperator &&
         (t.text == "!" || t.text == "-" || t.text == "++" || t.text == "--");
}

bool is_assign_op(const Token& t) {
  if (t.type == TokenType::kPlaceholder) {
    return t.placeholder->category == Category::kOp;
  }
  return t.type == TokenType::kOperator &&
         (t.text == "=" || t.text == "+=" || t.text == "-=");
}

bool is_identifier_like(const Token& t) {
  return t.type == TokenType::kIdentifier ||
         (t.type == TokenType::kPlaceholder &&
          t.placeholder->category == Category::kId);
}

bool is_literal(const Token& t) {
  return t.type == TokenType::kIntLiteral ||
         t.type == TokenType::kStringLiteral ||
         t.type == TokenType::kBoolLiteral;
}

class Parser {
 public:
  Parser(const std::vector<Token>& tokens, SnippetMode mode,
         ParseOptions options)
      : tokens_(tokens), mode_(mode), options_(options), builder_(mode) {}

  ParseTree parse_statements() && {
    std::vector<NodeId> items;
    while (!at_end()) {
      if (peek().is(TokenType::kPunct, "}")) {
        if (options_.strict) fail(peek(), "unmatched '}'");
        items.push_back(builder_.terminal(next(), TermRole::kPunct));
        continue;
      }
      items.push_back(statement());
    }
    NodeId root = builder_.nonterminal(Rule::kSnippet, items);
    return std::move(builder_).finish(root);
  }

  ParseTree parse_bare_expression() && {
    NodeId e = expression();
    if (!at_end()) fail(peek(), "unexpected token after expression");
    NodeId stmt = builder_.nonterminal(Rule::kExprStmt, {e});
    NodeId root = builder_.nonterminal(Rule::kSnippet, {stmt});
    return std::move(builder_).finish(root);
  }

 private:
  bool at_end() const { return pos_ >= tokens_.size(); }
  const Token& peek(std::size_t ahead = 0) const {
    static const Token kEnd{TokenType::kPunct, "<end>", 0, 0, std::nullopt};
    if (pos_ + ahead >= tokens_.size()) return kEnd;
    return tokens_[pos_ + ahead];
  }
  const Token& next() {
    if (at_end()) fail_at_end("unexpected end of snippet");
    return tokens_[pos_++];
  }

  [[noreturn]] void fail(const Token& at, const std::string& message) const {
    if (at.line == 0) fail_at_end(message);
    throw SyntaxError(at.line, at.column, message + " near '" + at.text + "'");
  }
  [[noreturn]] void fail_at_end(const std::string& message) const {
    std::size_t line = 1, column = 1;
    if (!tokens_.empty()) {
      line = tokens_.back().line;
      column = tokens_.back().column + tokens_.back().text.size();
    }
    throw SyntaxError(line, column, message);
  }

  const Token& expect_punct(std::string_view p) {
    if (!peek().is(TokenType::kPunct, p)) {
      if (at_end()) fail_at_end("expected '" + std::string(p) + "'");
      fail(peek(), "expected '" + std::string(p) + "'");
    }
    return next();
  }

  NodeId punct(std::string_view p) {
    return builder_.terminal(expect_punct(p), TermRole::kPunct);
  }

  NodeId statement() {
    const Token& t = peek();
    if (t.type == TokenType::kWildcard) {
      return builder_.wildcard(next());
    }
    if (t.is(TokenType::kPunct, "{")) return block();
    if (t.is(TokenType::kKeyword, "if")) return if_statement();
    if (t.is(TokenType::kKeyword, "while")) return while_statement();
    if (t.is(TokenType::kKeyword, "return")) return return_statement();
    if (t.type == TokenType::kKeyword) fail(t, "unexpected keyword");
    if (is_identifier_like(t) && is_identifier_like(peek(1)) &&
        is_assign_op(peek(2))) {
      return var_decl();
    }
    NodeId lhs = expression();
    if (is_assign_op(peek())) {
      NodeId op = assign_operator();
      NodeId rhs = expression();
      NodeId semi = punct(";");
      return builder_.nonterminal(Rule::kAssignStmt, {lhs, op, rhs, semi});
    }
    NodeId semi = punct(";");
    return builder_.nonterminal(Rule::kExprStmt, {lhs, semi});
  }

  NodeId block() {
    std::vector<NodeId> items{punct("{")};
    while (true) {
      if (at_end()) {
        if (options_.strict) fail_at_end("unclosed '{'");
        items.push_back(builder_.synthetic_terminal("}", TermRole::kPunct));
        break;
      }
      if (peek().is(TokenType::kPunct, "}")) {
        items.push_back(punct("}"));
        break;
      }
      items.push_back(statement());
    }
    return builder_.nonterminal(Rule::kBlock, items);
  }

  NodeId if_statement() {
    std::vector<NodeId> items;
    items.push_back(builder_.terminal(next(), TermRole::kKeyword));
    items.push_back(punct("("));
    items.push_back(expression());
    items.push_back(punct(")"));
    items.push_back(statement_or_fail());
    if (peek().is(TokenType::kKeyword, "else")) {
      items.push_back(builder_.terminal(next(), TermRole::kKeyword));
      items.push_back(statement_or_fail());
    }
    return builder_.nonterminal(Rule::kIfStmt, items);
  }

  NodeId while_statement() {
    NodeId kw = builder_.terminal(next(), TermRole::kKeyword);
    NodeId open = punct("(");
    NodeId cond = expression();
    NodeId close = punct(")");
    NodeId body = statement_or_fail();
    return builder_.nonterminal(Rule::kWhileStmt,
                                {kw, open, cond, close, body});
  }

  NodeId statement_or_fail() {
    if (at_end()) fail_at_end("expected a statement");
    return statement();
  }

  NodeId return_statement() {
    NodeId kw = builder_.terminal(next(), TermRole::kKeyword);
    if (peek().is(TokenType::kPunct, ";")) {
      return builder_.nonterminal(Rule::kReturnStmt, {kw, punct(";")});
    }
    NodeId value = expression();
    return builder_.nonterminal(Rule::kReturnStmt, {kw, value, punct(";")});
  }

  NodeId var_decl() {
    NodeId type = identifier();
    NodeId name = identifier();
    NodeId op = assign_operator();
    NodeId init = expression();
    return builder_.nonterminal(Rule::kVarDecl,
                                {type, name, op, init, punct(";")});
  }

  NodeId identifier() {
    const Token& t = peek();
    if (t.type == TokenType::kIdentifier) {
      return builder_.terminal(next(), TermRole::kIdentifier);
    }
    if (is_identifier_like(t)) return placeholder();
    fail(t, "expected an identifier");
  }

  NodeId assign_operator() {
    const Token& t = peek();
    if (t.type == TokenType::kPlaceholder) return placeholder();
    if (!is_assign_op(t)) fail(t, "expected an assignment operator");
    return builder_.terminal(next(), TermRole::kAssignOp);
  }

  NodeId placeholder() {
    const Token& t = next();
    if (mode_ == SnippetMode::kCode) {
      throw QueryTokenInCodeMode(t.line, t.column,
                                 "placeholder '" + t.text + "' in code");
    }
    return builder_.placeholder(t);
  }

  NodeId wrap(NodeId content) {
    return builder_.nonterminal(Rule::kExpr, {content});
  }

  NodeId expression() { return binary(1); }

  NodeId binary(int min_precedence) {
    NodeId lhs = unary();
    while (true) {
      int prec = binary_precedence(peek());
      if (prec == 0 || prec < min_precedence) break;
      NodeId op = peek().type == TokenType::kPlaceholder
                      ? placeholder()
                      : builder_.terminal(next(), TermRole::kBinaryOp);
      NodeId rhs = binary(prec + 1);
      lhs = wrap(builder_.nonterminal(Rule::kBinary, {lhs, op, rhs}));
    }
    return lhs;
  }

  NodeId unary() {
    if (is_prefix_op(peek())) {
      NodeId op = peek().type == TokenType::kPlaceholder
                      ? placeholder()
                      : builder_.terminal(next(), TermRole::kUnaryOp);
      NodeId operand = unary();
      return wrap(builder_.nonterminal(Rule::kUnary, {op, operand}));
    }
    return postfix();
  }

  NodeId postfix() {
    NodeId base = primary();
    while (true) {
      const Token& t = peek();
      if (t.is(TokenType::kPunct, "(")) {
        base = wrap(call(base));
      } else if (t.is(TokenType::kPunct, ".")) {
        NodeId dot = punct(".");
        NodeId field = identifier();
        base = wrap(builder_.nonterminal(Rule::kMember, {base, dot, field}));
      } else if (t.is(TokenType::kOperator, "++") ||
                 t.is(TokenType::kOperator, "--")) {
        NodeId op = builder_.terminal(next(), TermRole::kPostfixOp);
        base = wrap(builder_.nonterminal(Rule::kPostfix, {base, op}));
      } else {
        return base;
      }
    }
  }

  NodeId call(NodeId callee) {
    NodeId open = punct("(");
    if (peek().is(TokenType::kPunct, ")")) {
      return builder_.nonterminal(Rule::kCall, {callee, open, punct(")")});
    }
    // `f(<...>)` stands for any argument list, including none.
    if (peek().type == TokenType::kWildcard &&
        peek(1).is(TokenType::kPunct, ")")) {
      if (mode_ == SnippetMode::kCode) reject_query_token(peek());
      NodeId wc = builder_.wildcard(next());
      return builder_.nonterminal(Rule::kCall, {callee, open, wc, punct(")")});
    }
    std::vector<NodeId> args{expression()};
    while (peek().is(TokenType::kPunct, ",")) {
      args.push_back(punct(","));
      args.push_back(expression());
    }
    NodeId list = builder_.nonterminal(Rule::kExprList, args);
    return builder_.nonterminal(Rule::kCall, {callee, open, list, punct(")")});
  }

  NodeId primary() {
    const Token& t = peek();
    if (at_end()) fail_at_end("expected an expression");
    if (t.type == TokenType::kIdentifier) {
      return wrap(builder_.terminal(next(), TermRole::kIdentifier));
    }
    if (is_literal(t)) {
      return wrap(builder_.terminal(next(), TermRole::kLiteral));
    }
    if (t.type == TokenType::kPlaceholder) {
      Category c = t.placeholder->category;
      if (c != Category::kExpr && c != Category::kId && c != Category::kLt) {
        if (mode_ == SnippetMode::kCode) reject_query_token(t);
        fail(t, "operator placeholder in expression position");
      }
      return wrap(placeholder());
    }
    if (t.type == TokenType::kWildcard) {
      if (mode_ == SnippetMode::kCode) reject_query_token(t);
      return wrap(builder_.wildcard(next()));
    }
    if (t.is(TokenType::kPunct, "(")) {
      NodeId open = punct("(");
      NodeId inner = expression();
      NodeId close = punct(")");
      return wrap(builder_.nonterminal(Rule::kParen, {open, inner, close}));
    }
    fail(t, "expected an expression");
  }

  [[noreturn]] void reject_query_token(const Token& t) const {
    throw QueryTokenInCodeMode(t.line, t.column,
                               "query token '" + t.text + "' in code");
  }

  const std::vector<Token>& tokens_;
  SnippetMode mode_;
  ParseOptions options_;
  ParseTree::Builder builder_;
  std::size_t pos_ = 0;
};

}  // namespace

ParseTree parse_snippet(const Snippet& snippet, ParseOptions options) {
  std::vector<Token> tokens = tokenize(snippet.lines);

  for (const Token& t : tokens) {
    bool query_token = t.type == TokenType::kPlaceholder ||
                       t.type == TokenType::kWildcard ||
                       t.type == TokenType::kEmpty;
    if (query_token && snippet.mode == SnippetMode::kCode) {
      throw QueryTokenInCodeMode(t.line, t.column,
                                 "query token '" + t.text + "' in code");
    }
  }

  if (snippet.mode == SnippetMode::kQuery) {
    if (tokens.size() == 1 && tokens[0].type == TokenType::kEmpty) {
      ParseTree::Builder builder(SnippetMode::kQuery);
      NodeId root = builder.empty_marker(tokens[0]);
      return std::move(builder).finish(root);
    }
    for (const Token& t : tokens) {
      if (t.type == TokenType::kEmpty) {
        throw SyntaxError(t.line, t.column,
                          "'_' must be the whole snippet");
      }
    }
    if (tokens.empty()) {
      throw SyntaxError(1, 1, "empty query snippet; write '_' for no code");
    }
  }

  try {
    return Parser(tokens, snippet.mode, options).parse_statements();
  } catch (const QueryTokenInCodeMode&) {
    throw;
  } catch (const SyntaxError&) {
    if (options.strict || tokens.empty()) throw;
    // A snippet that is exactly one expression parses without its `;`.
    try {
      return Parser(tokens, snippet.mode, options).parse_bare_expression();
    } catch (const SyntaxError&) {
    }
    throw;
  }
}

}  // namespace dsx
