#pragma once

// Seeded generator of MiniLang hunks that look like small real edits:
// a few statements drawn from skewed name pools, then one or two edits
// (argument swaps, renamed callees, changed literals, inserted or removed
// statements, ...).

#include <cstdint>
#include <vector>

#include "dsx/ingestion.hpp"

namespace dsx {

// Every returned change satisfies the CodeChange invariants; ids are
// 0..n-1. Identical (n, seed) give identical output.
std::vector<CodeChange> synthesize_changes(std::size_t n, std::uint64_t seed);
Corpus synthesize_corpus(std::size_t n, std::uint64_t seed);

}  // namespace dsx
