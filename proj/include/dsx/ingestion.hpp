#pragma once

#include <cstdint>
#include <deque>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "dsx/grammar.hpp"

namespace dsx {

using ChangeId = std::uint32_t;

// One hunk: the removed lines and the added lines, with provenance.
struct CodeChange {
  ChangeId id = 0;
  std::string repo;
  std::string commit;
  std::string file;
  std::vector<std::string> old_lines;
  std::vector<std::string> new_lines;

  std::size_t char_count() const;
  friend bool operator==(const CodeChange&, const CodeChange&) = default;
};

struct ParsedChange {
  ParseTree old_tree;
  ParseTree new_tree;
};

// Parses both sides in code mode. Throws LexError / SyntaxError.
ParsedChange parse_change(const CodeChange& change);

// Throws InvalidChange unless both sides parse, at least one side is
// non-empty, and the two sides differ as trees.
ParsedChange validate_change(const CodeChange& change);

struct SkippedHunk {
  std::size_t line = 0;  // line of the `@@` header in the input
  std::string file;
  std::string reason;
};

struct HunkSplit {
  std::vector<CodeChange> changes;  // ids 0..n-1 in input order
  std::vector<SkippedHunk> skipped;
};

// Turns unified-diff / `git log -p` text into hunk-level changes. Context
// lines are dropped; hunks with unparseable or tree-equal sides are skipped
// and reported. Throws DiffFormatError on malformed hunk headers.
HunkSplit split_commit_into_hunks(std::string_view diff_text,
                                  std::string_view repo = {});

class Corpus {
 public:
  Corpus() = default;
  Corpus(Corpus&&) = default;
  Corpus& operator=(Corpus&&) = default;

  std::size_t size() const { return slots_.size(); }
  bool empty() const { return slots_.empty(); }
  const CodeChange& change(ChangeId id) const { return slots_.at(id).change; }

  // Validates, assigns the next dense id and returns it.
  ChangeId append_change(CodeChange change);
  // Appends without parsing; problems surface when trees() is called.
  ChangeId append_unchecked(CodeChange change);

  // Parse trees of a change, parsed on first use. Returns null when the
  // change does not parse. Safe to call concurrently.
  std::shared_ptr<const ParsedChange> trees(ChangeId id) const;

  // When disabled, trees() parses on every call and keeps nothing.
  void set_tree_cache(bool enabled) { cache_trees_ = enabled; }
  bool tree_cache() const { return cache_trees_; }

 private:
  struct Slot {
    explicit Slot(CodeChange c) : change(std::move(c)) {}
    CodeChange change;
    mutable std::once_flag parsed_once;
    mutable std::shared_ptr<const ParsedChange> parsed;
  };

  std::deque<Slot> slots_;
  bool cache_trees_ = true;
};

// JSON Lines, one object per change:
//   {"id":int,"repo":str,"commit":str,"file":str,"old":[str],"new":[str]}
// Throws CorpusFormatError with the 1-based line number.
Corpus read_corpus(std::istream& in);
Corpus load_corpus(const std::filesystem::path& path);
void write_corpus(const Corpus& corpus, std::ostream& out);
void save_corpus(const Corpus& corpus, const std::filesystem::path& path);

std::string to_json_line(const CodeChange& change);

}  // namespace dsx
