#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "dsx/features.hpp"
#include "dsx/ingestion.hpp"

namespace dsx {

struct Candidate {
  ChangeId change_id = 0;
  double distance = 0.0;  // L2 to the scaled query

  friend bool operator==(const Candidate&, const Candidate&) = default;
};

// Bit-packed feature vectors of a corpus, in id order. Retrieval is an
// exact flat scan.
class VectorIndex {
 public:
  VectorIndex() = default;
  explicit VectorIndex(std::size_t length);

  std::size_t length() const { return length_; }
  std::size_t count() const { return popcounts_.size(); }
  std::size_t words_per_vector() const { return words_; }

  void add(const FeatureVector& v);
  FeatureVector vector(std::size_t i) const;
  std::span<const std::uint64_t> row(std::size_t i) const {
    return {bits_.data() + i * words_, words_};
  }

  // Ids of changes that failed to featurize at build time (stored as zero
  // vectors so ids stay aligned with the corpus).
  const std::vector<ChangeId>& skipped() const { return skipped_; }
  void mark_skipped(ChangeId id) { skipped_.push_back(id); }

  friend bool operator==(const VectorIndex& a, const VectorIndex& b) {
    return a.length_ == b.length_ && a.bits_ == b.bits_;
  }

 private:
  std::size_t length_ = 0;
  std::size_t words_ = 0;
  std::vector<std::uint64_t> bits_;
  std::vector<std::uint32_t> popcounts_;
  std::vector<ChangeId> skipped_;
};

// Featurizes every change (in parallel when threads > 1) in id order.
VectorIndex build_index(const Corpus& corpus, const FeatureConfig& config = {},
                        unsigned threads = 0);

// The min(k, count) vectors nearest to query * (l/2 + 1) under L2, sorted
// by (distance, id). Throws LengthMismatch / ConfigError.
std::vector<Candidate> retrieve(const VectorIndex& index,
                                const FeatureVector& query, std::size_t k);

double query_scale(std::size_t length);

// File layout (little-endian): "DSIX", u32 version = 1, u32 l, u64 count,
// then count records of ceil(l/8) bytes, bit i at byte i/8, bit i%8.
void write_index(const VectorIndex& index, std::ostream& out);
VectorIndex read_index(std::istream& in);
void save_index(const VectorIndex& index, const std::filesystem::path& path);
VectorIndex load_index(const std::filesystem::path& path);

}  // namespace dsx
