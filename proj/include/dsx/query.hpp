#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "dsx/grammar.hpp"

namespace dsx {

enum class Side : std::uint8_t { kOld, kNew };

// Two query-language snippets: code before and after the change. A side
// holding only `_` asks for no code on that side.
struct Query {
  std::vector<std::string> old_lines;
  std::vector<std::string> new_lines;

  // Splits "old -> new"; each side may contain newlines.
  static Query from_arrow(std::string_view text);
  // Splits a single string into lines on '\n'.
  static Query from_text(std::string_view old_text, std::string_view new_text);

  std::size_t char_count() const;
};

struct ParsedQuery {
  ParseTree old_tree;
  ParseTree new_tree;
};

// Throws QueryParseError naming the offending side and position. A query
// whose two sides are both `_` is rejected.
ParsedQuery parse_query(const Query& query);

std::vector<std::string> split_lines(std::string_view text);

}  // namespace dsx
