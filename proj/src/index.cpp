#include "dsx/index.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>
#include <thread>

#include "dsx/error.hpp"

namespace dsx {

VectorIndex::VectorIndex(std::size_t length)
    : length_(length), words_((length + 63) / 64) {}

void VectorIndex::add(const FeatureVector& v) {
  if (v.length() != length_) {
    throw LengthMismatch("vector length " + std::to_string(v.length()) +
                         " does not match index length " +
                         std::to_string(length_));
  }
  bits_.insert(bits_.end(), v.words().begin(), v.words().end());
  popcounts_.push_back(static_cast<std::uint32_t>(v.popcount()));
}

FeatureVector VectorIndex::vector(std::size_t i) const {
  FeatureVector v(length_);
  auto r = row(i);
  std::copy(r.begin(), r.end(), v.words().begin());
  return v;
}

VectorIndex build_index(const Corpus& corpus, const FeatureConfig& config,
                        unsigned threads) {
  config.validate();
  const std::size_t n = corpus.size();
  std::vector<FeatureVector> vectors(n);
  std::vector<char> failed(n, 0);
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t id = begin; id < end; ++id) {
      auto trees = corpus.trees(static_cast<ChangeId>(id));
      if (!trees) {
        failed[id] = 1;
        vectors[id] = FeatureVector(config.length);
        continue;
      }
      vectors[id] = featurize_change(*trees, config);
    }
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  if (threads <= 1 || n < 1024) {
    work(0, n);
  } else {
    std::vector<std::jthread> pool;
    std::size_t chunk = (n + threads - 1) / threads;
    for (std::size_t begin = 0; begin < n; begin += chunk) {
      pool.emplace_back(work, begin, std::min(n, begin + chunk));
    }
  }
  VectorIndex index(config.length);
  for (std::size_t id = 0; id < n; ++id) {
    index.add(vectors[id]);
    if (failed[id]) index.mark_skipped(static_cast<ChangeId>(id));
  }
  return index;
}

double query_scale(std::size_t length) {
  return static_cast<double>(length) / 2.0 + 1.0;
}

std::vector<Candidate> retrieve(const VectorIndex& index,
                                const FeatureVector& query, std::size_t k) {
  if (k == 0) throw ConfigError("k must be at least 1");
  if (query.length() != index.length()) {
    throw LengthMismatch("query length " + std::to_string(query.length()) +
                         " does not match index length " +
                         std::to_string(index.length()));
  }
  // |s - p|^2 with s = m*q and binary p expands to
  // m^2 |q| - 2m |q & p| + |p|; every term is exact in a double.
  const double m = query_scale(index.length());
  const double base = m * m * static_cast<double>(query.popcount());
  const auto& q = query.words();
  const std::size_t words = index.words_per_vector();

  struct Scored {
    double squared;
    ChangeId id;
  };
  std::vector<Scored> scored(index.count());
  for (std::size_t i = 0; i < index.count(); ++i) {
    auto row = index.row(i);
    std::size_t shared = 0;
    std::size_t ones = 0;
    for (std::size_t w = 0; w < words; ++w) {
      shared += static_cast<std::size_t>(std::popcount(q[w] & row[w]));
      ones += static_cast<std::size_t>(std::popcount(row[w]));
    }
    scored[i] = {base - 2.0 * m * static_cast<double>(shared) +
                     static_cast<double>(ones),
                 static_cast<ChangeId>(i)};
  }
  auto less = [](const Scored& a, const Scored& b) {
    return a.squared < b.squared || (a.squared == b.squared && a.id < b.id);
  };
  const std::size_t take = std::min(k, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(take),
                    scored.end(), less);
  std::vector<Candidate> out;
  out.reserve(take);
  for (std::size_t i = 0; i < take; ++i) {
    out.push_back({scored[i].id, std::sqrt(std::max(0.0, scored[i].squared))});
  }
  return out;
}

namespace {

constexpr std::array<char, 4> kMagic = {'D', 'S', 'I', 'X'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put_le(std::ostream& out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.put(static_cast<char>((value >> (8 * i)) & 0xff));
  }
}

template <typename T>
T get_le(std::istream& in) {
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    int c = in.get();
    if (c == std::char_traits<char>::eof()) {
      throw IndexFormatError("truncated index header");
    }
    value |= static_cast<T>(static_cast<unsigned char>(c)) << (8 * i);
  }
  return value;
}

}  // namespace

void write_index(const VectorIndex& index, std::ostream& out) {
  out.write(kMagic.data(), kMagic.size());
  put_le<std::uint32_t>(out, kVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(index.length()));
  put_le<std::uint64_t>(out, index.count());
  const std::size_t record_bytes = (index.length() + 7) / 8;
  std::vector<char> record(record_bytes);
  for (std::size_t i = 0; i < index.count(); ++i) {
    auto row = index.row(i);
    for (std::size_t b = 0; b < record_bytes; ++b) {
      record[b] = static_cast<char>((row[b / 8] >> (8 * (b % 8))) & 0xff);
    }
    out.write(record.data(), static_cast<std::streamsize>(record_bytes));
  }
}

VectorIndex read_index(std::istream& in) {
  std::array<char, 4> magic{};
  in.read(magic.data(), magic.size());
  if (in.gcount() != 4 || magic != kMagic) {
    throw IndexFormatError("bad magic; not a DSIX index");
  }
  auto version = get_le<std::uint32_t>(in);
  if (version != kVersion) {
    throw IndexFormatError("unsupported index version " + std::to_string(version));
  }
  auto length = get_le<std::uint32_t>(in);
  auto count = get_le<std::uint64_t>(in);
  if (length == 0) throw IndexFormatError("zero vector length");
  const std::size_t record_bytes = (length + 7) / 8;
  VectorIndex index(length);
  std::vector<char> record(record_bytes);
  for (std::uint64_t i = 0; i < count; ++i) {
    in.read(record.data(), static_cast<std::streamsize>(record_bytes));
    if (static_cast<std::size_t>(in.gcount()) != record_bytes) {
      throw IndexFormatError("truncated index body at record " + std::to_string(i));
    }
    FeatureVector v(length);
    for (std::size_t b = 0; b < record_bytes; ++b) {
      v.words()[b / 8] |= static_cast<std::uint64_t>(
                              static_cast<unsigned char>(record[b]))
                          << (8 * (b % 8));
    }
    if (length % 64 != 0) {
      // Bits past l must be clear.
      std::uint64_t tail = v.words().back() >> (length % 64);
      if (tail != 0) throw IndexFormatError("padding bits set in record " + std::to_string(i));
    }
    index.add(v);
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw IndexFormatError("trailing bytes after index body");
  }
  return index;
}

void save_index(const VectorIndex& index, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write index '" + path.string() + "'");
  write_index(index, out);
  if (!out) throw IoError("failed writing index '" + path.string() + "'");
}

VectorIndex load_index(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open index '" + path.string() + "'");
  return read_index(in);
}

}  // namespace dsx
