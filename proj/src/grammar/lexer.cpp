#include <array>
#include <cctype>

#include "dsx/error.hpp"
#include "dsx/grammar.hpp"

namespace dsx {
namespace {

constexpr std::array<std::string_view, 4> kKeywords = {"if", "else", "while",
                                                       "return"};

// Longest first, so the first hit is the maximal munch.
constexpr std::array<std::string_view, 19> kOperators = {
    "||", "&&", "==", "!=", "<=", ">=", "+=", "-=", "++", "--",
    "=",  "<",  ">",  "+",  "-",  "*",  "/",  "%",  "!"};

constexpr std::string_view kPunct = "(){};,.";

struct QueryWord {
  std::string_view text;
  Category category;
};

constexpr std::array<QueryWord, 6> kQueryWords = {{
    {"EXPR", Category::kExpr},
    {"ID", Category::kId},
    {"LT", Category::kLt},
    {"OP", Category::kOp},
    {"binOP", Category::kBinOp},
    {"unOP", Category::kUnOp},
}};

bool ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}
bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}
bool digit(char c) { return std::isdigit(static_cast<unsigned char>(c)); }

void lex_line(std::string_view line, std::size_t line_no,
              std::vector<Token>& out) {
  std::size_t i = 0;
  auto push = [&](TokenType type, std::size_t start, std::size_t end) {
    out.push_back(Token{type, std::string(line.substr(start, end - start)),
                        line_no, start + 1, std::nullopt});
  };
  while (i < line.size()) {
    char c = line[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    std::size_t start = i;
    if (line.substr(i, 5) == "<...>") {
      push(TokenType::kWildcard, i, i + 5);
      i += 5;
      continue;
    }
    if (ident_start(c)) {
      while (i < line.size() && ident_char(line[i])) ++i;
      std::string_view word = line.substr(start, i - start);
      if (word == "_") {
        push(TokenType::kEmpty, start, i);
        continue;
      }
      const QueryWord* qw = nullptr;
      for (const auto& candidate : kQueryWords) {
        if (candidate.text == word) qw = &candidate;
      }
      if (qw != nullptr) {
        PlaceholderSpec spec{qw->category, std::nullopt};
        // `ID<12>`: the index must follow the keyword without whitespace.
        if (i < line.size() && line[i] == '<') {
          std::size_t j = i + 1;
          while (j < line.size() && digit(line[j])) ++j;
          if (j > i + 1 && j < line.size() && line[j] == '>') {
            spec.name = static_cast<std::uint32_t>(
                std::stoul(std::string(line.substr(i + 1, j - i - 1))));
            i = j + 1;
          }
        }
        push(TokenType::kPlaceholder, start, i);
        out.back().placeholder = spec;
        continue;
      }
      bool keyword = false;
      for (auto kw : kKeywords) keyword = keyword || kw == word;
      if (keyword) {
        push(TokenType::kKeyword, start, i);
      } else if (word == "true" || word == "false") {
        push(TokenType::kBoolLiteral, start, i);
      } else {
        push(TokenType::kIdentifier, start, i);
      }
      continue;
    }
    if (digit(c)) {
      while (i < line.size() && digit(line[i])) ++i;
      push(TokenType::kIntLiteral, start, i);
      continue;
    }
    if (c == '"') {
      ++i;
      bool closed = false;
      while (i < line.size()) {
        if (line[i] == '\\' && i + 1 < line.size()) {
          i += 2;
          continue;
        }
        if (line[i] == '"') {
          closed = true;
          ++i;
          break;
        }
        ++i;
      }
      if (!closed) {
        throw LexError(line_no, start + 1, "unterminated string literal");
      }
      push(TokenType::kStringLiteral, start, i);
      continue;
    }
    bool matched = false;
    for (auto op : kOperators) {
      if (line.substr(i, op.size()) == op) {
        push(TokenType::kOperator, i, i + op.size());
        i += op.size();
        matched = true;
        break;
      }
    }
    if (matched) continue;
    if (kPunct.find(c) != std::string_view::npos) {
      push(TokenType::kPunct, i, i + 1);
      ++i;
      continue;
    }
    throw LexError(line_no, start + 1,
                   std::string("unexpected character '") + c + "'");
  }
}

}  // namespace

std::vector<Token> tokenize(std::span<const std::string> lines) {
  std::vector<Token> out;
  for (std::size_t n = 0; n < lines.size(); ++n) {
    lex_line(lines[n], n + 1, out);
  }
  return out;
}

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  std::size_t line_no = 1;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    lex_line(text.substr(start, end - start), line_no++, out);
    start = end + 1;
  }
  return out;
}

}  // namespace dsx
