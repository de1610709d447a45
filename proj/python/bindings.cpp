#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "dsx/engine.hpp"
#include "dsx/error.hpp"
#include "dsx/features.hpp"
#include "dsx/index.hpp"
#include "dsx/ingestion.hpp"
#include "dsx/matcher.hpp"
#include "dsx/synth.hpp"

namespace py = pybind11;
using namespace dsx;

namespace {

Query make_query(const std::string& old_text, const std::string& new_text) {
  return Query::from_text(old_text, new_text);
}

py::dict result_dict(const SearchResult& r) {
  py::dict d;
  d["id"] = r.change.id;
  d["rank"] = r.rank;
  d["distance"] = r.distance ? py::cast(*r.distance) : py::none();
  d["old"] = r.change.old_lines;
  d["new"] = r.change.new_lines;
  py::dict b;
  for (const auto& [k, v] : r.bindings) b[py::str(k)] = v;
  d["bindings"] = b;
  return d;
}

}  // namespace

PYBIND11_MODULE(_dsx, m) {
  m.doc() = "Search code changes with query patterns";

  auto& base = py::register_exception<Error>(m, "DsxError");
  py::register_exception<SyntaxError>(m, "ParseError", base.ptr());
  py::register_exception<LexError>(m, "LexError", base.ptr());
  py::register_exception<IndexMismatch>(m, "IndexMismatch", base.ptr());
  static PyObject* query_error =
      py::register_exception<QueryParseError>(m, "QueryParseError", base.ptr()).ptr();
  // Registered last, so tried first: adds side/line/column to the instance.
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const QueryParseError& e) {
      py::object inst = py::reinterpret_borrow<py::object>(query_error)(e.what());
      inst.attr("side") = e.side();
      inst.attr("line") = e.line();
      inst.attr("column") = e.column();
      PyErr_SetObject(query_error, inst.ptr());
    }
  });

  py::class_<CodeChange>(m, "Change")
      .def(py::init([](std::vector<std::string> old_lines, std::vector<std::string> new_lines,
                       std::string repo, std::string commit, std::string file) {
             CodeChange c;
             c.old_lines = std::move(old_lines);
             c.new_lines = std::move(new_lines);
             c.repo = std::move(repo);
             c.commit = std::move(commit);
             c.file = std::move(file);
             return c;
           }),
           py::arg("old"), py::arg("new"), py::arg("repo") = "", py::arg("commit") = "",
           py::arg("file") = "")
      .def_readonly("id", &CodeChange::id)
      .def_readonly("repo", &CodeChange::repo)
      .def_readonly("commit", &CodeChange::commit)
      .def_readonly("file", &CodeChange::file)
      .def_readonly("old", &CodeChange::old_lines)
      .def_readonly("new", &CodeChange::new_lines)
      .def("__eq__", [](const CodeChange& a, const CodeChange& b) { return a == b; })
      .def("__repr__", [](const CodeChange& c) {
        return "<Change " + std::to_string(c.id) + ": " + std::to_string(c.old_lines.size()) +
               " -> " + std::to_string(c.new_lines.size()) + " lines>";
      });

  py::class_<Corpus>(m, "Corpus")
      .def(py::init<>())
      .def_static("load", &load_corpus, py::arg("path"))
      .def_static("synthetic", &synthesize_corpus, py::arg("n"), py::arg("seed") = 1)
      .def_static("from_git_log", [](const std::string& text, const std::string& repo) {
        Corpus c;
        for (auto& ch : split_commit_into_hunks(text, repo).changes) c.append_unchecked(std::move(ch));
        return c;
      }, py::arg("text"), py::arg("repo") = "")
      .def("save", &save_corpus, py::arg("path"))
      .def("append", [](Corpus& c, CodeChange ch) {
        try {
          return c.append_change(std::move(ch));
        } catch (const InvalidChange& e) {
          throw py::value_error(e.what());
        }
      }, py::arg("change"))
      .def("__len__", &Corpus::size)
      .def("__getitem__", [](const Corpus& c, std::size_t i) {
        if (i >= c.size()) throw py::index_error();
        return c.change(static_cast<ChangeId>(i));
      });

  py::class_<VectorIndex>(m, "Index")
      .def_static("build", [](const Corpus& c, std::size_t l) {
        py::gil_scoped_release release;
        return build_index(c, FeatureConfig{l, 1});
      }, py::arg("corpus"), py::arg("l") = 1000)
      .def_static("load", &load_index, py::arg("path"))
      .def("save", &save_index, py::arg("path"))
      .def_property_readonly("length", &VectorIndex::length)
      .def("__len__", &VectorIndex::count)
      .def("retrieve", [](const VectorIndex& idx, const std::string& old_text,
                          const std::string& new_text, std::size_t k) {
        FeatureVector v = featurize_query(make_query(old_text, new_text),
                                          FeatureConfig{idx.length(), 1});
        std::vector<std::pair<ChangeId, double>> out;
        for (const auto& c : retrieve(idx, v, k)) out.emplace_back(c.change_id, c.distance);
        return out;
      }, py::arg("old"), py::arg("new"), py::arg("k") = 5000);

  m.def("search", [](const Corpus& corpus, const VectorIndex& index, const std::string& old_text,
                     const std::string& new_text, std::size_t k, std::size_t max_results,
                     bool exhaustive, std::size_t budget) {
    SearchConfig cfg;
    cfg.k = k;
    cfg.max_results = max_results;
    cfg.search_budget = budget;
    cfg.l = index.length() ? index.length() : cfg.l;
    cfg.mode = exhaustive ? SearchMode::kExhaustive : SearchMode::kIndexed;
    Query q = make_query(old_text, new_text);
    SearchResponse r;
    {
      py::gil_scoped_release release;
      r = search(q, cfg, corpus, index);
    }
    py::list results;
    for (const auto& res : r.results) results.append(result_dict(res));
    py::dict stats;
    stats["retrieved"] = r.stats.retrieved;
    stats["pruned"] = r.stats.pruned;
    stats["matched"] = r.stats.matched;
    stats["budget_exceeded"] = r.stats.budget_exceeded;
    stats["elapsed_ms"] = r.stats.elapsed_ms;
    py::dict out;
    out["results"] = results;
    out["stats"] = stats;
    return out;
  }, py::arg("corpus"), py::arg("index"), py::arg("old"), py::arg("new"),
     py::arg("k") = 5000, py::arg("max_results") = 10, py::arg("exhaustive") = false,
     py::arg("budget") = 1'000'000);

  m.def("matches", [](const CodeChange& change, const std::string& old_text,
                      const std::string& new_text) -> py::object {
    ParsedChange pc = parse_change(change);
    MatchResult r = matches(pc, parse_query(make_query(old_text, new_text)));
    if (!r.matched) return py::none();
    py::dict b;
    for (const auto& [k, v] : binding_texts(pc, *r.witness)) b[py::str(k)] = v;
    return b;
  }, py::arg("change"), py::arg("old"), py::arg("new"),
     "Bindings of the first match as a dict, or None.");

  m.def("prune_by_leaves", [](const CodeChange& change, const std::string& old_text,
                              const std::string& new_text) {
    return prune_by_leaves(change, make_query(old_text, new_text));
  }, py::arg("change"), py::arg("old"), py::arg("new"));

  m.def("featurize_change", [](const CodeChange& change, std::size_t l) {
    return featurize_change(change, FeatureConfig{l, 1}).set_bits();
  }, py::arg("change"), py::arg("l") = 1000);
  m.def("featurize_query", [](const std::string& old_text, const std::string& new_text,
                              std::size_t l) {
    return featurize_query(make_query(old_text, new_text), FeatureConfig{l, 1}).set_bits();
  }, py::arg("old"), py::arg("new"), py::arg("l") = 1000);

  m.def("parse", [](const std::string& text, bool query, bool strict) {
    Snippet s{split_lines(text), query ? SnippetMode::kQuery : SnippetMode::kCode};
    return to_sexpr(parse_snippet(s, ParseOptions{strict}));
  }, py::arg("text"), py::arg("query") = false, py::arg("strict") = false);

  m.def("generate_queries", [](const Corpus& corpus, const std::string& strategy,
                               std::size_t n, std::uint64_t seed) {
    std::vector<std::tuple<std::vector<std::string>, std::vector<std::string>, ChangeId>> out;
    for (auto& g : generate_ground_truth_queries(corpus, parse_strategy(strategy), n, seed)) {
      out.emplace_back(std::move(g.query.old_lines), std::move(g.query.new_lines), g.source);
    }
    return out;
  }, py::arg("corpus"), py::arg("strategy"), py::arg("n"), py::arg("seed") = 1);

  m.def("measure_recall", [](const Corpus& corpus, const VectorIndex& index,
                             const std::vector<std::pair<std::vector<std::string>,
                                                         std::vector<std::string>>>& queries,
                             std::size_t k) {
    std::vector<Query> qs;
    for (const auto& [o, n] : queries) qs.push_back(Query{o, n});
    SearchConfig cfg;
    cfg.k = k;
    cfg.l = index.length();
    RecallReport rep;
    {
      py::gil_scoped_release release;
      rep = measure_recall(qs, corpus, index, cfg);
    }
    py::dict d;
    d["mean_recall"] = rep.mean_recall;
    d["mean_truth"] = rep.mean_truth;
    d["mean_query_chars"] = rep.mean_query_chars;
    d["mean_result_chars"] = rep.mean_result_chars;
    py::list per;
    for (const auto& q : rep.per_query) per.append(py::make_tuple(q.truth, q.found, q.recall));
    d["per_query"] = per;
    return d;
  }, py::arg("corpus"), py::arg("index"), py::arg("queries"), py::arg("k") = 5000);
}
