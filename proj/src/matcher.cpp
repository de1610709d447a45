#include "dsx/matcher.hpp"

#include <algorithm>
#include <string_view>
#include <unordered_set>

namespace dsx {
namespace {

bool category_accepts(Category category, const ParseTree& tree, NodeId n) {
  if (category == Category::kExpr) {
    NodeId p = tree.parent(n);
    return p != kNoNode && tree.is_nonterminal(p, Rule::kExpr);
  }
  if (tree.kind(n) != NodeKind::kTerminal) return false;
  switch (category) {
    case Category::kId: return tree.role(n) == TermRole::kIdentifier;
    case Category::kLt: return tree.role(n) == TermRole::kLiteral;
    case Category::kOp: return tree.role(n) == TermRole::kAssignOp;
    case Category::kBinOp: return tree.role(n) == TermRole::kBinaryOp;
    case Category::kUnOp: return tree.role(n) == TermRole::kUnaryOp;
    case Category::kExpr: break;
  }
  return false;
}

bool is_list_rule(Rule r) { return r == Rule::kBlock || r == Rule::kSnippet; }

// Depth-first search over a persistent stack of pending obligations. Each
// choice point pushes the obligations of one alternative on top of the
// remaining stack and recurses; on failure everything recorded since is
// truncated away.
class Search {
 public:
  Search(const ParsedChange& change, const ParsedQuery& query,
         std::size_t budget)
      : change_(change), query_(query), budget_(budget) {}

  MatchResult run() {
    int head = push(-1, {Op::kAnchor, Side::kNew});
    head = push(head, {Op::kAnchor, Side::kOld});
    MatchResult result;
    result.matched = solve(head);
    result.attempts = attempts_;
    result.budget_exceeded = exhausted_;
    if (result.matched) {
      NodeMapping m;
      m.pairs = std::move(pairs_);
      m.bindings = std::move(bound_);
      m.wildcards = std::move(absorbed_);
      m.anchors = std::move(anchors_);
      result.witness = std::move(m);
    }
    return result;
  }

 private:
  enum class Op : std::uint8_t { kAnchor, kRootSeq, kNode, kSeq };

  struct Obligation {
    Op op;
    Side side;
    NodeId qn = kNoNode;  // query node (or parent, for sequences)
    NodeId cn = kNoNode;  // change node (or parent)
    std::uint32_t qi = 0;
    std::uint32_t ci = 0;
  };

  struct Cell {
    Obligation ob;
    int next;
  };

  struct Mark {
    std::size_t cells, pairs, bound, absorbed, anchors;
  };

  const ParseTree& qtree(Side s) const {
    return s == Side::kOld ? query_.old_tree : query_.new_tree;
  }
  const ParseTree& ctree(Side s) const {
    return s == Side::kOld ? change_.old_tree : change_.new_tree;
  }

  int push(int head, Obligation ob) {
    cells_.push_back({ob, head});
    return static_cast<int>(cells_.size() - 1);
  }

  Mark mark() const {
    return {cells_.size(), pairs_.size(), bound_.size(), absorbed_.size(),
            anchors_.size()};
  }
  void reset(const Mark& m) {
    cells_.resize(m.cells);
    pairs_.resize(m.pairs);
    bound_.resize(m.bound);
    absorbed_.resize(m.absorbed);
    anchors_.resize(m.anchors);
  }

  // Tries one alternative; keeps its records only on success.
  bool attempt(int head, const Mark& m) {
    if (solve(head)) return true;
    reset(m);
    return false;
  }

  bool solve(int head) {
    if (exhausted_) return false;
    if (head < 0) return true;
    Obligation ob = cells_[static_cast<std::size_t>(head)].ob;
    int rest = cells_[static_cast<std::size_t>(head)].next;
    switch (ob.op) {
      case Op::kAnchor: return anchor(ob.side, rest);
      case Op::kRootSeq: return root_seq(ob, rest);
      case Op::kNode: return node(ob, rest);
      case Op::kSeq: return seq(ob, rest);
    }
    return false;
  }

  bool anchor(Side side, int rest) {
    const ParseTree& q = qtree(side);
    const ParseTree& c = ctree(side);
    Mark m = mark();
    if (q.is_empty_marker()) {
      if (!c.is_empty()) return false;
      anchors_.push_back({side, kNoNode});
      return attempt(rest, m);
    }
    if (auto bare = q.bare_expression()) {
      for (NodeId n : c.preorder()) {
        if (!c.is_nonterminal(n, Rule::kExpr)) continue;
        anchors_.push_back({side, n});
        if (attempt(push(rest, {Op::kNode, side, *bare, n}), m)) return true;
        if (exhausted_) return false;
      }
      return false;
    }
    std::size_t needed = 0;
    for (NodeId k : q.children(q.root())) {
      if (q.kind(k) != NodeKind::kWildcard) ++needed;
    }
    for (NodeId n : c.preorder()) {
      if (c.kind(n) != NodeKind::kNonterminal) continue;
      if (c.children(n).size() < needed) continue;
      anchors_.push_back({side, n});
      if (attempt(push(rest, {Op::kRootSeq, side, q.root(), n, 0, 0}), m)) {
        return true;
      }
      if (exhausted_) return false;
    }
    return false;
  }

  // Query statements onto a subsequence of the anchor's children; gaps at
  // this level are free, so wildcards here expand to nothing.
  bool root_seq(const Obligation& ob, int rest) {
    const ParseTree& q = qtree(ob.side);
    const ParseTree& c = ctree(ob.side);
    auto qs = q.children(ob.qn);
    auto cs = c.children(ob.cn);
    std::uint32_t qi = ob.qi;
    Mark m = mark();
    while (qi < qs.size() && q.kind(qs[qi]) == NodeKind::kWildcard) {
      absorbed_.push_back({ob.side, qs[qi], {}});
      ++qi;
    }
    if (qi == qs.size()) return attempt(rest, m);
    Mark inner = mark();
    std::size_t left = 0;
    for (std::size_t i = qi; i < qs.size(); ++i) {
      if (q.kind(qs[i]) != NodeKind::kWildcard) ++left;
    }
    for (std::uint32_t j = ob.ci; j + left <= cs.size(); ++j) {
      int head = push(rest, {Op::kRootSeq, ob.side, ob.qn, ob.cn, qi + 1, j + 1});
      head = push(head, {Op::kNode, ob.side, qs[qi], cs[j]});
      if (attempt(head, inner)) return true;
      if (exhausted_) return false;
    }
    reset(m);
    return false;
  }

  bool node(const Obligation& ob, int rest) {
    if (++attempts_ > budget_) {
      exhausted_ = true;
      return false;
    }
    const ParseTree& q = qtree(ob.side);
    const ParseTree& c = ctree(ob.side);
    NodeId qn = ob.qn;
    NodeId cn = ob.cn;
    Mark m = mark();
    switch (q.kind(qn)) {
      case NodeKind::kPlaceholder: {
        PlaceholderSpec spec = *q.placeholder(qn);
        if (!category_accepts(spec.category, c, cn)) return false;
        if (spec.named()) {
          auto it = std::find_if(bound_.begin(), bound_.end(),
                                 [&](const PlaceholderBinding& b) {
                                   return b.spec == spec;
                                 });
          if (it != bound_.end()) {
            if (!subtrees_equal(ctree(it->side), it->change, c, cn)) {
              return false;
            }
          } else {
            bound_.push_back({spec, ob.side, cn});
          }
        }
        pairs_.push_back({ob.side, qn, cn});
        return attempt(rest, m);
      }
      case NodeKind::kTerminal:
        if (c.kind(cn) != NodeKind::kTerminal || q.label(qn) != c.label(cn)) {
          return false;
        }
        pairs_.push_back({ob.side, qn, cn});
        return attempt(rest, m);
      case NodeKind::kNonterminal:
        if (c.kind(cn) != NodeKind::kNonterminal || q.rule(qn) != c.rule(cn)) {
          return false;
        }
        pairs_.push_back({ob.side, qn, cn});
        return attempt(push(rest, {Op::kSeq, ob.side, qn, cn, 0, 0}), m);
      case NodeKind::kWildcard:
      case NodeKind::kEmptyMarker:
        break;
    }
    return false;
  }

  // Children of a mapped pair, in order. A change child may go unmatched
  // only inside a wildcard's expansion.
  bool seq(const Obligation& ob, int rest) {
    const ParseTree& q = qtree(ob.side);
    const ParseTree& c = ctree(ob.side);
    auto qs = q.children(ob.qn);
    auto cs = c.children(ob.cn);
    Mark m = mark();
    if (ob.qi == qs.size()) {
      if (ob.ci != cs.size()) return false;
      return attempt(rest, m);
    }
    NodeId qk = qs[ob.qi];
    if (q.kind(qk) == NodeKind::kWildcard) {
      std::size_t most = 0;
      if (is_list_rule(q.rule(ob.qn))) {
        while (ob.ci + most < cs.size() &&
               c.kind(cs[ob.ci + most]) == NodeKind::kNonterminal) {
          ++most;
        }
      } else if (ob.ci < cs.size()) {
        NodeId k = cs[ob.ci];
        TermRole r = c.role(k);
        bool single = c.kind(k) == NodeKind::kNonterminal ||
                      (c.kind(k) == NodeKind::kTerminal &&
                       (r == TermRole::kIdentifier || r == TermRole::kLiteral));
        most = single ? 1 : 0;
      }
      for (std::size_t a = 0; a <= most; ++a) {
        WildcardExpansion w{ob.side, qk, {}};
        w.absorbed.assign(cs.begin() + ob.ci, cs.begin() + ob.ci + a);
        absorbed_.push_back(std::move(w));
        int head = push(rest, {Op::kSeq, ob.side, ob.qn, ob.cn, ob.qi + 1,
                               static_cast<std::uint32_t>(ob.ci + a)});
        if (attempt(head, m)) return true;
        if (exhausted_) return false;
      }
      return false;
    }
    if (ob.ci >= cs.size()) return false;
    int head = push(rest, {Op::kSeq, ob.side, ob.qn, ob.cn, ob.qi + 1, ob.ci + 1});
    head = push(head, {Op::kNode, ob.side, qk, cs[ob.ci]});
    return attempt(head, m);
  }

  const ParsedChange& change_;
  const ParsedQuery& query_;
  std::size_t budget_;
  std::size_t attempts_ = 0;
  bool exhausted_ = false;

  std::vector<Cell> cells_;
  std::vector<NodePair> pairs_;
  std::vector<PlaceholderBinding> bound_;
  std::vector<WildcardExpansion> absorbed_;
  std::vector<AnchorPoint> anchors_;
};

bool side_tokens_present(const ParseTree& q, const ParseTree& c) {
  if (q.size() == 0 || q.is_empty_marker()) return true;
  std::unordered_set<std::string_view> have;
  if (c.size() != 0) {
    for (NodeId n : c.leaves(c.root())) have.insert(c.label(n));
  }
  for (NodeId n : q.leaves(q.root())) {
    if (q.kind(n) != NodeKind::kTerminal) continue;
    if (!have.contains(q.label(n))) return false;
  }
  return true;
}

}  // namespace

MatchResult matches(const ParsedChange& change, const ParsedQuery& query,
                    const MatchOptions& options) {
  return Search(change, query, options.budget).run();
}

MatchResult matches(const CodeChange& change, const Query& query,
                    const MatchOptions& options) {
  ParsedChange c = parse_change(change);
  ParsedQuery q = parse_query(query);
  return matches(c, q, options);
}

bool prune_by_leaves(const ParsedChange& change, const ParsedQuery& query) {
  return side_tokens_present(query.old_tree, change.old_tree) &&
         side_tokens_present(query.new_tree, change.new_tree);
}

bool prune_by_leaves(const CodeChange& change, const Query& query) {
  return prune_by_leaves(parse_change(change), parse_query(query));
}

std::vector<std::pair<std::string, std::string>> binding_texts(
    const ParsedChange& change, const NodeMapping& witness) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& b : witness.bindings) {
    const ParseTree& t = b.side == Side::kOld ? change.old_tree : change.new_tree;
    out.emplace_back(b.spec.spelling(), render(t, b.change));
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace dsx
