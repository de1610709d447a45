#include "dsx/query.hpp"

#include "dsx/error.hpp"

namespace dsx {

std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (true) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) {
      lines.emplace_back(text.substr(start));
      break;
    }
    lines.emplace_back(text.substr(start, end - start));
    start = end + 1;
  }
  for (auto& line : lines) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
  }
  return lines;
}

Query Query::from_text(std::string_view old_text, std::string_view new_text) {
  return Query{split_lines(old_text), split_lines(new_text)};
}

Query Query::from_arrow(std::string_view text) {
  constexpr std::string_view kArrow = " -> ";
  std::size_t at = text.find(kArrow);
  if (at == std::string_view::npos) {
    throw QueryParseError("query", 1, 1, "missing ' -> ' between old and new");
  }
  return from_text(text.substr(0, at), text.substr(at + kArrow.size()));
}

std::size_t Query::char_count() const {
  std::size_t n = 0;
  for (const auto& l : old_lines) n += l.size();
  for (const auto& l : new_lines) n += l.size();
  return n;
}

namespace {

ParseTree parse_side(const std::vector<std::string>& lines,
                     const std::string& side) {
  try {
    return parse_snippet(Snippet{lines, SnippetMode::kQuery});
  } catch (const SyntaxError& e) {
    throw QueryParseError(side, e.line(), e.column(), e.what());
  } catch (const LexError& e) {
    throw QueryParseError(side, e.line(), e.column(), e.what());
  }
}

}  // namespace

ParsedQuery parse_query(const Query& query) {
  ParsedQuery parsed{parse_side(query.old_lines, "old"),
                     parse_side(query.new_lines, "new")};
  if (parsed.old_tree.is_empty_marker() && parsed.new_tree.is_empty_marker()) {
    throw QueryParseError("query", 1, 1, "both sides are '_'");
  }
  return parsed;
}

}  // namespace dsx
