#pragma once

#include <string>
#include <vector>

#include "dsx/ingestion.hpp"
#include "dsx/query.hpp"

namespace dsx::fixtures {

inline CodeChange change(std::vector<std::string> old_lines,
                         std::vector<std::string> new_lines) {
  CodeChange c;
  c.old_lines = std::move(old_lines);
  c.new_lines = std::move(new_lines);
  return c;
}

// The three running-example hunks: a changed argument, swapped arguments,
// and an edited loop.
inline std::vector<CodeChange> three_changes() {
  std::vector<CodeChange> out{
      change({"if(check(a - 1, b)){"}, {"if(check(a - 1, c)){"}),
      change({"if(isValidPoint(x, y)){"}, {"if(isValidPoint(y, x)){"}),
      change({"while(var > k - 1){", "  sum += count(var);"},
             {"while(var > k){", "  sum += 2 * count(var);"}),
  };
  for (std::size_t i = 0; i < out.size(); ++i) out[i].id = static_cast<ChangeId>(i);
  return out;
}

inline Query swap_query() {
  return Query{{"if(ID<1>(EXPR<1>, EXPR<2>)){", "  <...>"},
               {"if(ID<1>(EXPR<2>, EXPR<1>)){", "  <...>"}};
}

inline Query q(const std::string& old_text, const std::string& new_text) {
  return Query::from_text(old_text, new_text);
}

}  // namespace dsx::fixtures
