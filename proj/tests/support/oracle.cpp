#include "oracle.hpp"

#include <functional>
#include <map>
#include <optional>
#include <utility>

namespace dsx::oracle {

T copy(const ParseTree& tree, NodeId n) {
  T t{tree.kind(n), std::string(tree.label(n)), {}};
  for (NodeId c : tree.children(n)) t.kids.push_back(copy(tree, c));
  return t;
}

namespace {

using Key = std::pair<int, std::uint32_t>;  // (category, name)

bool fits(Category cat, const ParseTree& t, NodeId n) {
  if (cat == Category::kExpr) {
    return t.parent(n) != kNoNode && t.kind(t.parent(n)) == NodeKind::kNonterminal &&
           t.rule(t.parent(n)) == Rule::kExpr;
  }
  if (t.kind(n) != NodeKind::kTerminal) return false;
  TermRole want = TermRole::kNone;
  switch (cat) {
    case Category::kId: want = TermRole::kIdentifier; break;
    case Category::kLt: want = TermRole::kLiteral; break;
    case Category::kOp: want = TermRole::kAssignOp; break;
    case Category::kBinOp: want = TermRole::kBinaryOp; break;
    case Category::kUnOp: want = TermRole::kUnaryOp; break;
    case Category::kExpr: break;
  }
  return t.role(n) == want;
}

void add_unique(std::vector<T>& pool, T t) {
  for (const auto& p : pool) {
    if (p == t) return;
  }
  pool.push_back(std::move(t));
}

std::vector<NodeId> all_nodes(const ParseTree& t) {
  if (t.size() == 0) return {};
  return t.preorder();
}

bool is_list(const ParseTree& t, NodeId n) {
  return t.kind(n) == NodeKind::kNonterminal &&
         (t.rule(n) == Rule::kBlock || t.rule(n) == Rule::kSnippet);
}

struct SidePools {
  std::vector<T> by_category[6];
  std::vector<T> statements;   // for wildcards among statements
  std::vector<T> expressions;  // for a wildcard in expression position
  std::size_t max_run = 0;     // longest child list
};

SidePools pools_for(const ParseTree& c) {
  SidePools p;
  for (NodeId n : all_nodes(c)) {
    p.max_run = std::max(p.max_run, c.children(n).size());
    for (int cat = 0; cat < 6; ++cat) {
      if (fits(static_cast<Category>(cat), c, n)) add_unique(p.by_category[cat], copy(c, n));
    }
    NodeId par = c.parent(n);
    if (par != kNoNode && is_list(c, par) && c.kind(n) == NodeKind::kNonterminal) {
      add_unique(p.statements, copy(c, n));
    }
    bool absorbable = c.kind(n) == NodeKind::kNonterminal ||
                      (c.kind(n) == NodeKind::kTerminal &&
                       (c.role(n) == TermRole::kIdentifier ||
                        c.role(n) == TermRole::kLiteral));
    if (absorbable && n != c.root()) add_unique(p.expressions, copy(c, n));
  }
  return p;
}

using Seq = std::vector<T>;
using Sink = std::function<bool(Seq&)>;  // true = stop

class Expander {
 public:
  Expander(const ParseTree& q, const SidePools& pools,
           const std::map<Key, T>& env, std::size_t& budget)
      : q_(q), pools_(pools), env_(env), budget_(budget) {}

  bool node(NodeId n, const Sink& k) {
    switch (q_.kind(n)) {
      case NodeKind::kTerminal: {
        Seq s{T{NodeKind::kTerminal, std::string(q_.label(n)), {}}};
        return k(s);
      }
      case NodeKind::kPlaceholder: {
        auto spec = *q_.placeholder(n);
        if (spec.name) {
          Seq s{env_.at({static_cast<int>(spec.category), *spec.name})};
          return k(s);
        }
        for (const T& v : pools_.by_category[static_cast<int>(spec.category)]) {
          Seq s{v};
          if (k(s)) return true;
        }
        return false;
      }
      case NodeKind::kWildcard: {
        NodeId par = q_.parent(n);
        if (is_list(q_, par)) return runs({}, k);
        Seq none;
        if (k(none)) return true;
        for (const T& v : pools_.expressions) {
          Seq s{v};
          if (k(s)) return true;
        }
        return false;
      }
      case NodeKind::kNonterminal: {
        Seq acc;
        std::string label(q_.label(n));
        return children(n, 0, acc, [&](Seq& kids) {
          Seq s{T{NodeKind::kNonterminal, label, kids}};
          return k(s);
        });
      }
      case NodeKind::kEmptyMarker:
        break;
    }
    return false;
  }

  // Expansions of children[i..] appended to acc.
  bool children(NodeId parent, std::size_t i, Seq& acc, const Sink& k) {
    auto kids = q_.children(parent);
    if (i == kids.size()) {
      if (++count_ > budget_) {
        gave_up_ = true;
        return true;
      }
      return k(acc);
    }
    return node(kids[i], [&](Seq& part) {
      std::size_t mark = acc.size();
      acc.insert(acc.end(), part.begin(), part.end());
      bool stop = children(parent, i + 1, acc, k);
      acc.resize(mark);
      return stop;
    });
  }

  bool gave_up() const { return gave_up_; }

 private:
  // Every sequence of 0..max_run statements from the pool.
  bool runs(Seq prefix, const Sink& k) {
    if (k(prefix)) return true;
    if (prefix.size() >= pools_.max_run) return false;
    for (const T& v : pools_.statements) {
      Seq next = prefix;
      next.push_back(v);
      if (runs(std::move(next), k)) return true;
    }
    return false;
  }

  const ParseTree& q_;
  const SidePools& pools_;
  const std::map<Key, T>& env_;
  std::size_t& budget_;
  std::size_t count_ = 0;
  bool gave_up_ = false;
};

bool subsequence(const Seq& s, const std::vector<T>& of) {
  std::size_t j = 0;
  for (const T& x : s) {
    while (j < of.size() && !(of[j] == x)) ++j;
    if (j == of.size()) return false;
    ++j;
  }
  return true;
}

// Is some expansion of the query side contained in the change side?
bool side_contained(const ParseTree& q, const ParseTree& c,
                    const SidePools& pools, const std::map<Key, T>& env,
                    std::size_t& budget, bool& gave_up) {
  if (q.is_empty_marker()) return c.is_empty();
  std::vector<T> hosts;       // children lists, one T per nonterminal
  std::vector<T> expr_nodes;  // every `expr` subtree
  for (NodeId n : all_nodes(c)) {
    if (c.kind(n) != NodeKind::kNonterminal) continue;
    T t = copy(c, n);
    if (c.rule(n) == Rule::kExpr) expr_nodes.push_back(t);
    hosts.push_back(std::move(t));
  }
  Expander ex(q, pools, env, budget);
  bool found = false;
  if (auto bare = q.bare_expression()) {
    ex.node(*bare, [&](Seq& s) {
      for (const T& e : expr_nodes) {
        if (s.size() == 1 && s[0] == e) return found = true;
      }
      return false;
    });
  } else {
    Seq acc;
    ex.children(q.root(), 0, acc, [&](Seq& s) {
      for (const T& h : hosts) {
        if (subsequence(s, h.kids)) return found = true;
      }
      return false;
    });
  }
  gave_up = gave_up || ex.gave_up();
  return found;
}

void collect_keys(const ParseTree& q, std::vector<Key>& keys) {
  for (NodeId n : all_nodes(q)) {
    if (q.kind(n) != NodeKind::kPlaceholder) continue;
    auto spec = *q.placeholder(n);
    if (!spec.name) continue;
    Key k{static_cast<int>(spec.category), *spec.name};
    if (std::find(keys.begin(), keys.end(), k) == keys.end()) keys.push_back(k);
  }
}

}  // namespace

bool matches(const ParsedChange& change, const ParsedQuery& query,
             std::size_t cap, bool* gave_up_out) {
  SidePools old_pools = pools_for(change.old_tree);
  SidePools new_pools = pools_for(change.new_tree);
  std::vector<Key> keys;
  collect_keys(query.old_tree, keys);
  collect_keys(query.new_tree, keys);

  std::vector<std::vector<T>> values;
  for (const Key& k : keys) {
    std::vector<T> v = old_pools.by_category[k.first];
    for (const T& t : new_pools.by_category[k.first]) add_unique(v, t);
    if (v.empty()) return false;
    values.push_back(std::move(v));
  }

  std::size_t budget = cap;
  bool gave_up = false;
  std::map<Key, T> env;
  std::function<bool(std::size_t)> assign = [&](std::size_t i) -> bool {
    if (gave_up) return false;
    if (i == keys.size()) {
      return side_contained(query.old_tree, change.old_tree, old_pools, env,
                            budget, gave_up) &&
             side_contained(query.new_tree, change.new_tree, new_pools, env,
                            budget, gave_up);
    }
    for (const T& v : values[i]) {
      env[keys[i]] = v;
      if (assign(i + 1)) return true;
    }
    env.erase(keys[i]);
    return false;
  };
  bool result = assign(0);
  if (gave_up_out) *gave_up_out = gave_up;
  return result && !gave_up;
}

namespace {

struct Substituter {
  const ParseTree& q;
  const ParseTree& c;
  std::map<NodeId, NodeId> placeholder_to;          // query node -> change node
  std::map<NodeId, std::vector<NodeId>> wildcard_to;  // query node -> change nodes
  std::string error;

  Seq expand(NodeId n) {
    switch (q.kind(n)) {
      case NodeKind::kPlaceholder: {
        auto it = placeholder_to.find(n);
        if (it == placeholder_to.end()) {
          error = "placeholder without a mapping";
          return {};
        }
        if (!fits(q.placeholder(n)->category, c, it->second)) {
          error = "placeholder bound outside its category";
        }
        return {copy(c, it->second)};
      }
      case NodeKind::kWildcard: {
        Seq out;
        auto it = wildcard_to.find(n);
        if (it != wildcard_to.end()) {
          for (NodeId x : it->second) out.push_back(copy(c, x));
        }
        return out;
      }
      case NodeKind::kNonterminal: {
        T t{NodeKind::kNonterminal, std::string(q.label(n)), {}};
        for (NodeId k : q.children(n)) {
          Seq part = expand(k);
          t.kids.insert(t.kids.end(), part.begin(), part.end());
        }
        return {t};
      }
      default:
        return {T{q.kind(n), std::string(q.label(n)), {}}};
    }
  }
};

}  // namespace

std::string check_witness(const ParsedChange& change, const ParsedQuery& query,
                          const NodeMapping& w) {
  // Named bindings must agree everywhere, across sides.
  std::map<Key, std::pair<const ParseTree*, NodeId>> seen;
  for (int s = 0; s < 2; ++s) {
    Side side = s == 0 ? Side::kOld : Side::kNew;
    const ParseTree& q = s == 0 ? query.old_tree : query.new_tree;
    const ParseTree& c = s == 0 ? change.old_tree : change.new_tree;
    for (const auto& p : w.pairs) {
      if (p.side != side || q.kind(p.query) != NodeKind::kPlaceholder) continue;
      auto spec = *q.placeholder(p.query);
      if (!spec.name) continue;
      Key k{static_cast<int>(spec.category), *spec.name};
      auto it = seen.find(k);
      if (it == seen.end()) {
        seen[k] = {&c, p.change};
      } else if (!(copy(*it->second.first, it->second.second) == copy(c, p.change))) {
        return "named placeholder " + spec.spelling() + " bound inconsistently";
      }
    }
  }

  for (int s = 0; s < 2; ++s) {
    Side side = s == 0 ? Side::kOld : Side::kNew;
    const ParseTree& q = s == 0 ? query.old_tree : query.new_tree;
    const ParseTree& c = s == 0 ? change.old_tree : change.new_tree;
    std::optional<NodeId> anchor;
    bool has_anchor = false;
    for (const auto& a : w.anchors) {
      if (a.side == side) {
        anchor = a.change;
        has_anchor = true;
      }
    }
    if (!has_anchor) return "no anchor recorded";
    if (q.is_empty_marker()) {
      if (!c.is_empty()) return "'_' side against non-empty code";
      continue;
    }
    Substituter sub{q, c, {}, {}, {}};
    for (const auto& p : w.pairs) {
      if (p.side == side && q.kind(p.query) == NodeKind::kPlaceholder) {
        sub.placeholder_to[p.query] = p.change;
      }
    }
    for (const auto& x : w.wildcards) {
      if (x.side == side) sub.wildcard_to[x.wildcard] = x.absorbed;
    }
    if (*anchor == kNoNode) return "missing anchor node";
    if (auto bare = q.bare_expression()) {
      Seq e = sub.expand(*bare);
      if (!sub.error.empty()) return sub.error;
      if (e.size() != 1 || !(e[0] == copy(c, *anchor))) {
        return "expanded expression differs from the anchor";
      }
      continue;
    }
    Seq seq;
    for (NodeId k : q.children(q.root())) {
      Seq part = sub.expand(k);
      seq.insert(seq.end(), part.begin(), part.end());
    }
    if (!sub.error.empty()) return sub.error;
    if (!subsequence(seq, copy(c, *anchor).kids)) {
      return "expanded statements are not contained at the anchor";
    }
  }
  return {};
}

}  // namespace dsx::oracle
