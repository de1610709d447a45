#include "dsx/ingestion.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <regex>
#include <sstream>

#include "json.hpp"

#include "dsx/error.hpp"
#include "dsx/query.hpp"

namespace dsx {

std::size_t CodeChange::char_count() const {
  std::size_t n = 0;
  for (const auto& l : old_lines) n += l.size();
  for (const auto& l : new_lines) n += l.size();
  return n;
}

ParsedChange parse_change(const CodeChange& change) {
  return ParsedChange{
      parse_snippet(Snippet{change.old_lines, SnippetMode::kCode}),
      parse_snippet(Snippet{change.new_lines, SnippetMode::kCode})};
}

ParsedChange validate_change(const CodeChange& change) {
  ParsedChange parsed;
  try {
    parsed = parse_change(change);
  } catch (const Error& e) {
    throw InvalidChange(std::string("unparseable: ") + e.what());
  }
  if (parsed.old_tree.is_empty() && parsed.new_tree.is_empty()) {
    throw InvalidChange("both sides are empty");
  }
  if (trees_equal(parsed.old_tree, parsed.new_tree)) {
    throw InvalidChange("sides are tree-equal");
  }
  return parsed;
}

namespace {

struct HunkHeader {
  std::size_t old_count = 1;
  std::size_t new_count = 1;
};

HunkHeader parse_hunk_header(const std::string& line, std::size_t line_no) {
  static const std::regex kHeader(
      R"(^@@ -(\d+)(?:,(\d+))? \+(\d+)(?:,(\d+))? @@.*$)");
  std::smatch m;
  if (!std::regex_match(line, m, kHeader)) {
    throw DiffFormatError(line_no, "malformed hunk header '" + line + "'");
  }
  HunkHeader h;
  if (m[2].matched) h.old_count = std::stoul(m[2].str());
  if (m[4].matched) h.new_count = std::stoul(m[4].str());
  return h;
}

std::string strip_prefix(std::string path) {
  if (path.rfind("a/", 0) == 0 || path.rfind("b/", 0) == 0) {
    return path.substr(2);
  }
  return path;
}

}  // namespace

HunkSplit split_commit_into_hunks(std::string_view diff_text,
                                  std::string_view repo) {
  HunkSplit out;
  std::vector<std::string> lines = split_lines(diff_text);
  std::string commit;
  std::string file;

  std::size_t i = 0;
  while (i < lines.size()) {
    const std::string& line = lines[i];
    if (line.rfind("commit ", 0) == 0) {
      commit = line.substr(7);
      auto space = commit.find(' ');
      if (space != std::string::npos) commit.resize(space);
      ++i;
      continue;
    }
    if (line.rfind("diff --git ", 0) == 0) {
      auto b = line.rfind(" b/");
      file = b == std::string::npos ? std::string() : line.substr(b + 3);
      ++i;
      continue;
    }
    if (line.rfind("+++ ", 0) == 0) {
      std::string path = line.substr(4);
      auto tab = path.find('\t');
      if (tab != std::string::npos) path.resize(tab);
      if (path != "/dev/null") file = strip_prefix(path);
      ++i;
      continue;
    }
    if (line.rfind("@@", 0) != 0) {
      ++i;
      continue;
    }

    const std::size_t header_line = i + 1;
    HunkHeader header = parse_hunk_header(line, header_line);
    ++i;
    CodeChange change;
    change.repo = std::string(repo);
    change.commit = commit;
    change.file = file;
    std::size_t old_left = header.old_count;
    std::size_t new_left = header.new_count;
    while ((old_left > 0 || new_left > 0) && i < lines.size()) {
      const std::string& body = lines[i];
      char tag = body.empty() ? ' ' : body[0];
      std::string text = body.empty() ? std::string() : body.substr(1);
      if (tag == '\\') {
        ++i;
        continue;
      }
      if (tag == ' ') {
        if (old_left == 0 || new_left == 0) break;
        --old_left;
        --new_left;
      } else if (tag == '-') {
        if (old_left == 0) break;
        --old_left;
        change.old_lines.push_back(std::move(text));
      } else if (tag == '+') {
        if (new_left == 0) break;
        --new_left;
        change.new_lines.push_back(std::move(text));
      } else {
        break;
      }
      ++i;
    }
    if (old_left > 0 || new_left > 0) {
      throw DiffFormatError(header_line, "hunk body shorter than its header");
    }
    while (i < lines.size() && !lines[i].empty() && lines[i][0] == '\\') ++i;

    if (change.old_lines.empty() && change.new_lines.empty()) continue;
    try {
      validate_change(change);
    } catch (const InvalidChange& e) {
      out.skipped.push_back(SkippedHunk{header_line, file, e.what()});
      continue;
    }
    change.id = static_cast<ChangeId>(out.changes.size());
    out.changes.push_back(std::move(change));
  }
  return out;
}

ChangeId Corpus::append_change(CodeChange change) {
  ParsedChange parsed = validate_change(change);
  ChangeId id = append_unchecked(std::move(change));
  if (cache_trees_) {
    Slot& slot = slots_.back();
    std::call_once(slot.parsed_once, [&] {
      slot.parsed = std::make_shared<const ParsedChange>(std::move(parsed));
    });
  }
  return id;
}

ChangeId Corpus::append_unchecked(CodeChange change) {
  change.id = static_cast<ChangeId>(slots_.size());
  slots_.emplace_back(std::move(change));
  return static_cast<ChangeId>(slots_.size() - 1);
}

std::shared_ptr<const ParsedChange> Corpus::trees(ChangeId id) const {
  const Slot& slot = slots_.at(id);
  auto parse = [&]() -> std::shared_ptr<const ParsedChange> {
    try {
      return std::make_shared<const ParsedChange>(parse_change(slot.change));
    } catch (const Error&) {
      return nullptr;
    }
  };
  if (!cache_trees_) {
    if (slot.parsed) return slot.parsed;
    return parse();
  }
  std::call_once(slot.parsed_once, [&] { slot.parsed = parse(); });
  return slot.parsed;
}

namespace {

std::vector<std::string> string_array(const nlohmann::json& j,
                                      const char* key, std::size_t line_no) {
  if (!j.contains(key)) {
    throw CorpusFormatError(line_no, std::string("missing field '") + key + "'");
  }
  const auto& arr = j.at(key);
  if (!arr.is_array()) {
    throw CorpusFormatError(line_no, std::string("'") + key + "' must be an array");
  }
  std::vector<std::string> out;
  for (const auto& item : arr) {
    if (!item.is_string()) {
      throw CorpusFormatError(line_no,
                              std::string("'") + key + "' must hold strings");
    }
    out.push_back(item.get<std::string>());
  }
  return out;
}

std::string optional_string(const nlohmann::json& j, const char* key,
                            std::size_t line_no) {
  if (!j.contains(key)) return {};
  if (!j.at(key).is_string()) {
    throw CorpusFormatError(line_no, std::string("'") + key + "' must be a string");
  }
  return j.at(key).get<std::string>();
}

}  // namespace

Corpus read_corpus(std::istream& in) {
  Corpus corpus;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw CorpusFormatError(line_no, std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw CorpusFormatError(line_no, "expected an object");
    CodeChange change;
    if (j.contains("id")) {
      if (!j.at("id").is_number_integer() ||
          j.at("id").get<std::int64_t>() != static_cast<std::int64_t>(corpus.size())) {
        throw CorpusFormatError(line_no, "id must equal the record's position (" +
                                             std::to_string(corpus.size()) + ")");
      }
    }
    change.repo = optional_string(j, "repo", line_no);
    change.commit = optional_string(j, "commit", line_no);
    change.file = optional_string(j, "file", line_no);
    change.old_lines = string_array(j, "old", line_no);
    change.new_lines = string_array(j, "new", line_no);
    if (change.old_lines.empty() && change.new_lines.empty()) {
      throw CorpusFormatError(line_no, "both 'old' and 'new' are empty");
    }
    corpus.append_unchecked(std::move(change));
  }
  return corpus;
}

Corpus load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open corpus '" + path.string() + "'");
  return read_corpus(in);
}

std::string to_json_line(const CodeChange& change) {
  nlohmann::json j;
  j["id"] = change.id;
  j["repo"] = change.repo;
  j["commit"] = change.commit;
  j["file"] = change.file;
  j["old"] = change.old_lines;
  j["new"] = change.new_lines;
  return j.dump();
}

void write_corpus(const Corpus& corpus, std::ostream& out) {
  for (ChangeId id = 0; id < corpus.size(); ++id) {
    out << to_json_line(corpus.change(id)) << '\n';
  }
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write corpus '" + path.string() + "'");
  write_corpus(corpus, out);
  if (!out) throw IoError("failed writing corpus '" + path.string() + "'");
}

}  // namespace dsx
