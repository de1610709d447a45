#include "dsx/features.hpp"

#include <bit>

#include "dsx/error.hpp"

namespace dsx {

void FeatureConfig::validate() const {
  if (length == 0 || length % 4 != 0) {
    throw ConfigError("feature vector length must be a positive multiple of 4, got " +
                      std::to_string(length));
  }
  if (depth < 1) throw ConfigError("triangle depth must be at least 1");
}

std::size_t FeatureVector::popcount() const {
  std::size_t n = 0;
  for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

std::vector<std::size_t> FeatureVector::set_bits() const {
  std::vector<std::size_t> out;
  for (std::size_t w = 0; w < words_.size(); ++w) {
    std::uint64_t bits = words_[w];
    while (bits != 0) {
      out.push_back(w * 64 + static_cast<std::size_t>(std::countr_zero(bits)));
      bits &= bits - 1;
    }
  }
  return out;
}

bool FeatureVector::subset_of(const FeatureVector& other) const {
  if (other.words_.size() != words_.size()) return false;
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if ((words_[i] & ~other.words_[i]) != 0) return false;
  }
  return true;
}

std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::size_t hash_into_segment(const Feature& feature,
                              std::size_t segment_length) {
  std::uint64_t h = 0;
  for (const auto& part : feature.parts) h += fnv1a64(part);
  return static_cast<std::size_t>(h % segment_length);
}

namespace {

// Descendants of `node` down to `depth` levels, in preorder, node first.
void triangle_nodes(const ParseTree& tree, NodeId node, int depth,
                    std::vector<NodeId>& out) {
  out.push_back(node);
  if (depth == 0) return;
  for (NodeId c : tree.children(node)) triangle_nodes(tree, c, depth - 1, out);
}

// Calls emit(kind, nodes) for every feature of the tree whose nodes are all
// accepted by keep(node).
template <typename Keep, typename Emit>
void visit_features(const ParseTree& tree, int depth, Keep keep, Emit emit) {
  if (tree.size() == 0 || tree.is_empty() || tree.is_empty_marker()) return;
  std::vector<NodeId> parts;
  for (NodeId n : tree.preorder()) {
    if (keep(n)) {
      parts.assign(1, n);
      emit(FeatureKind::kNode, parts);
    }
    if (tree.children(n).empty()) continue;
    parts.clear();
    triangle_nodes(tree, n, depth, parts);
    bool all = true;
    for (NodeId p : parts) all = all && keep(p);
    if (all) emit(FeatureKind::kTriangle, parts);
  }
}

struct QueryKeep {
  const ParseTree* tree;
  NodeId bare_wrapper = kNoNode;

  explicit QueryKeep(const ParseTree& t) : tree(&t) {
    if (t.size() != 0 && t.bare_expression()) {
      bare_wrapper = t.parent(*t.bare_expression());
    }
  }
  bool operator()(NodeId n) const {
    if (n == tree->root() || n == bare_wrapper) return false;
    NodeKind k = tree->kind(n);
    return k == NodeKind::kNonterminal || k == NodeKind::kTerminal;
  }
};

// Hashes the tree's features into its two segments of `v`.
template <typename Keep>
void hash_side(const ParseTree& tree, Side side, const FeatureConfig& config,
               Keep keep, FeatureVector& v) {
  const std::size_t seg = config.segment_length();
  const std::size_t node_base = side == Side::kOld ? 0 : seg;
  const std::size_t tri_base = side == Side::kOld ? 2 * seg : 3 * seg;
  std::vector<std::uint64_t> node_hash(tree.size());
  for (NodeId n = 0; n < tree.size(); ++n) node_hash[n] = fnv1a64(tree.label(n));
  visit_features(tree, config.depth, keep,
                 [&](FeatureKind kind, const std::vector<NodeId>& parts) {
                   std::uint64_t h = 0;
                   for (NodeId p : parts) h += node_hash[p];
                   std::size_t base =
                       kind == FeatureKind::kNode ? node_base : tri_base;
                   v.set(base + static_cast<std::size_t>(h % seg));
                 });
}

template <typename Keep>
std::vector<Feature> collect(const ParseTree& tree, Side side, int depth,
                             Keep keep) {
  std::vector<Feature> out;
  visit_features(tree, depth, keep,
                 [&](FeatureKind kind, const std::vector<NodeId>& parts) {
                   Feature f{kind, side, {}};
                   for (NodeId p : parts) f.parts.emplace_back(tree.label(p));
                   out.push_back(std::move(f));
                 });
  return out;
}

}  // namespace

std::vector<Feature> extract_features(const ParseTree& tree, Side side,
                                      int depth) {
  return collect(tree, side, depth, [](NodeId) { return true; });
}

std::vector<Feature> query_features(const ParseTree& tree, Side side,
                                    int depth) {
  return collect(tree, side, depth, QueryKeep(tree));
}

FeatureVector featurize_change(const ParsedChange& change,
                               const FeatureConfig& config) {
  config.validate();
  FeatureVector v(config.length);
  auto all = [](NodeId) { return true; };
  hash_side(change.old_tree, Side::kOld, config, all, v);
  hash_side(change.new_tree, Side::kNew, config, all, v);
  return v;
}

FeatureVector featurize_change(const CodeChange& change,
                               const FeatureConfig& config) {
  return featurize_change(parse_change(change), config);
}

FeatureVector featurize_query(const ParsedQuery& query,
                              const FeatureConfig& config) {
  config.validate();
  FeatureVector v(config.length);
  hash_side(query.old_tree, Side::kOld, config, QueryKeep(query.old_tree), v);
  hash_side(query.new_tree, Side::kNew, config, QueryKeep(query.new_tree), v);
  return v;
}

FeatureVector featurize_query(const Query& query,
                              const FeatureConfig& config) {
  return featurize_query(parse_query(query), config);
}

}  // namespace dsx
