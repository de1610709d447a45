#pragma once

// Parse trees -> fixed-size binary feature vectors.
//
// A change side yields node features (one per node) and parse-tree
// triangles (one per internal node: the node plus its descendants up to a
// depth). Features are hashed into a vector split into four equal
// segments: [old-node | new-node | old-triangle | new-triangle].

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "dsx/grammar.hpp"
#include "dsx/ingestion.hpp"
#include "dsx/query.hpp"

namespace dsx {

enum class FeatureKind : std::uint8_t { kNode, kTriangle };

struct Feature {
  FeatureKind kind = FeatureKind::kNode;
  Side side = Side::kOld;
  // Node string representations; a triangle lists the parent first.
  std::vector<std::string> parts;
};

struct FeatureConfig {
  std::size_t length = 1000;  // l; must be a positive multiple of 4
  int depth = 1;              // triangle depth

  std::size_t segment_length() const { return length / 4; }
  // Throws ConfigError.
  void validate() const;
};

class FeatureVector {
 public:
  FeatureVector() = default;
  explicit FeatureVector(std::size_t length)
      : length_(length), words_((length + 63) / 64, 0) {}

  std::size_t length() const { return length_; }
  void set(std::size_t bit) { words_[bit / 64] |= std::uint64_t{1} << (bit % 64); }
  bool test(std::size_t bit) const {
    return (words_[bit / 64] >> (bit % 64)) & 1u;
  }
  std::size_t popcount() const;
  std::vector<std::size_t> set_bits() const;
  const std::vector<std::uint64_t>& words() const { return words_; }
  std::vector<std::uint64_t>& words() { return words_; }

  // Every set bit of *this is also set in `other`.
  bool subset_of(const FeatureVector& other) const;

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;

 private:
  std::size_t length_ = 0;
  std::vector<std::uint64_t> words_;
};

std::uint64_t fnv1a64(std::string_view text);

// Sum of the FNV-1a hashes of the parts (wrapping), modulo the segment
// length.
std::size_t hash_into_segment(const Feature& feature,
                              std::size_t segment_length);

// All node and triangle features of one side. An empty side yields none.
std::vector<Feature> extract_features(const ParseTree& tree, Side side,
                                      int depth = 1);

FeatureVector featurize_change(const ParsedChange& change,
                               const FeatureConfig& config = {});
// Parses the change first; propagates parse errors.
FeatureVector featurize_change(const CodeChange& change,
                               const FeatureConfig& config = {});

// Like featurize_change, but features touching a placeholder, wildcard,
// `_`, or the anchoring root of a query side are dropped.
FeatureVector featurize_query(const ParsedQuery& query,
                              const FeatureConfig& config = {});
FeatureVector featurize_query(const Query& query,
                              const FeatureConfig& config = {});

// Features that featurize_query keeps, as strings (for inspection).
std::vector<Feature> query_features(const ParseTree& tree, Side side,
                                    int depth = 1);

}  // namespace dsx
