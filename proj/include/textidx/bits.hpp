#pragma once
// Bit-level substrate: plain bit vector with rank/select, packed fixed-width
// integer array, per-chunk unary symbol counters, alphabet statistics, two
// symbol-sequence representations, and a block-decomposed range-extreme
// (RMQ) index. Everything here is immutable after construction.
//
// Convention note: the raw bit vector uses the classical half-open rank
// (rank1(i) = ones in [0, i)) and 1-based select. Symbol sequences use the
// inclusive rank convention (rank(a, i) = occurrences in [0..i], and
// rank(a, -1) = 0) shared by the whole library.

#include <bit>
#include <cstddef>
#include <memory>
#include <vector>

#include "textidx/common.hpp"

namespace textidx {

// Symbol storage shared between a sequence's directories; kept once per
// sequence no matter how many indexes are layered over it.
using shared_seq = std::shared_ptr<const std::vector<u32>>;

inline shared_seq make_shared_seq(std::vector<u32> v) {
  return std::make_shared<const std::vector<u32>>(std::move(v));
}

inline u64 low_mask(u32 k) { return k >= 64 ? ~0ull : (1ull << k) - 1; }

// 0-based position of the r-th (1-based) set bit of x; r <= popcount(x).
inline u32 select_in_word(u64 x, u32 r) {
  for (u32 i = 1; i < r; ++i) x &= x - 1;
  return static_cast<u32>(std::countr_zero(x));
}

// ---------------------------------------------------------------------------
// bit_vector: immutable bits + rank/select. Directory: one u32 cumulative
// count per 128-bit block (25% overhead); rank reads the directory plus at
// most two masked words.
class bit_vector {
 public:
  class builder {
   public:
    void push_back(bool bit) {
      if (n_ % 64 == 0) words_.push_back(0);
      if (bit) words_.back() |= 1ull << (n_ % 64);
      ++n_;
    }
    void append_run(bool bit, u64 count) {
      for (u64 i = 0; i < count; ++i) push_back(bit);
    }
    bit_vector build() { return bit_vector(std::move(words_), n_); }

   private:
    std::vector<u64> words_;
    u64 n_ = 0;
  };

  bit_vector() = default;
  bit_vector(std::vector<u64> words, u64 n);
  explicit bit_vector(const std::vector<bool>& bits);

  u64 size() const { return n_; }
  u64 ones() const { return ones_; }
  u64 zeros() const { return n_ - ones_; }

  bool get(u64 i) const {
    TI_REQUIRE(i < n_, "bit_vector::get out of range");
    return (words_[i >> 6] >> (i & 63)) & 1;
  }

  // Ones in [0, i), i <= size().
  u64 rank1(u64 i) const {
    TI_REQUIRE(i <= n_, "bit_vector::rank1 out of range");
    const u64 b = i >> 7;
    u64 r = dir_[b];
    const u64 w = b << 1;
    const u32 rem = static_cast<u32>(i & 127);
    if (rem == 0) return r;
    if (rem <= 64) return r + std::popcount(words_[w] & low_mask(rem));
    return r + std::popcount(words_[w]) +
           std::popcount(words_[w + 1] & low_mask(rem - 64));
  }

  u64 rank0(u64 i) const { return i - rank1(i); }

  // Position of the k-th one / zero, 1-based k.
  u64 select1(u64 k) const;
  u64 select0(u64 k) const;

  const std::vector<u64>& words() const { return words_; }

 private:
  void build_directory();

  std::vector<u64> words_;
  std::vector<u32> dir_;  // ones before each 128-bit block, plus a final entry
  u64 n_ = 0;
  u64 ones_ = 0;
};

// ---------------------------------------------------------------------------
// packed_int_array: n fixed-width (1..64 bit) integers, bit-packed.
class packed_int_array {
 public:
  packed_int_array() = default;
  packed_int_array(u64 n, u32 width);
  packed_int_array(std::vector<u64> words, u64 n, u32 width);

  u64 size() const { return n_; }
  u32 width() const { return width_; }

  u64 get(u64 i) const {
    TI_REQUIRE(i < n_, "packed_int_array::get out of range");
    const u64 bit = i * width_;
    const u64 w = bit >> 6;
    const u32 off = static_cast<u32>(bit & 63);
    u64 v = words_[w] >> off;
    if (off + width_ > 64) v |= words_[w + 1] << (64 - off);
    return v & low_mask(width_);
  }

  void set(u64 i, u64 v);

  const std::vector<u64>& words() const { return words_; }

 private:
  std::vector<u64> words_;
  u64 n_ = 0;
  u32 width_ = 0;
};

// ---------------------------------------------------------------------------
// chunk_counts: for each symbol, per-chunk occurrence counts stored in unary
// (1^count 0 per chunk), all symbols concatenated into one bit vector.
// prefix(a, c) (occurrences of a in chunks [0, c)) costs one select0.
class chunk_counts {
 public:
  class builder {
   public:
    builder(u32 sigma, u64 chunks);
    // Append the count for the next (symbol, chunk) cell, symbol-major.
    void add(u64 count);
    chunk_counts build();

   private:
    u32 sigma_;
    u64 chunks_;
    u64 added_ = 0;
    bit_vector::builder bits_;
  };

  chunk_counts() = default;

  u32 sigma() const { return sigma_; }
  u64 chunks() const { return chunks_; }

  // Occurrences of a in chunks [0, c), c <= chunks().
  u64 prefix(u32 a, u64 c) const;
  // Total occurrences of a.
  u64 total(u32 a) const;

 private:
  friend class builder;
  bit_vector bits_;
  std::vector<u64> start_;  // segment start bit of each symbol, sigma+1 entries
  u32 sigma_ = 0;
  u64 chunks_ = 0;
};

// ---------------------------------------------------------------------------
// alphabet_stats: per-symbol counts and exclusive prefix sums (acc), the
// bucket boundaries of sorted-row space.
class alphabet_stats {
 public:
  alphabet_stats() = default;
  alphabet_stats(const std::vector<u32>& seq, u32 sigma);
  explicit alphabet_stats(std::vector<u64> counts);

  u32 sigma() const { return static_cast<u32>(counts_.size()); }
  u64 total() const { return acc_.empty() ? 0 : acc_.back(); }
  u64 count(u32 a) const { return counts_[a]; }
  // Rows strictly before bucket a (non-decreasing; acc(sigma) = total).
  u64 acc(u32 a) const { return acc_[a]; }
  // Symbol whose bucket contains row v: acc(a) <= v < acc(a + 1).
  u32 bucket_of(u64 v) const;

 private:
  std::vector<u64> counts_;
  std::vector<u64> acc_;  // sigma + 1 entries
};

namespace detail {
// CSR layout of per-symbol occurrence positions (ascending within a symbol).
struct position_csr {
  std::vector<u32> positions;  // size n
  std::vector<u64> start;      // sigma + 1 offsets into positions
  void build(const std::vector<u32>& seq, u32 sigma);
};
}  // namespace detail

// ---------------------------------------------------------------------------
// small_alphabet_seq: sequence over a small alphabet. access O(1); rank =
// one chunked-prefix lookup plus a bounded in-chunk scan; select O(1) from
// per-symbol position lists. Designed for sigma up to polylog(n); rank scan
// length is ~max(64, sigma).
class small_alphabet_seq {
 public:
  small_alphabet_seq() = default;
  small_alphabet_seq(shared_seq seq, u32 sigma);

  u64 size() const { return seq_->size(); }
  u32 sigma() const { return sigma_; }
  u32 access(u64 i) const {
    TI_REQUIRE(i < seq_->size(), "small_alphabet_seq::access out of range");
    return (*seq_)[i];
  }
  // Inclusive rank: occurrences of a in [0..i]; i = -1 allowed.
  u64 rank(u32 a, i64 i) const;
  // Position of the k-th occurrence of a, 1-based.
  u64 select(u32 a, u64 k) const;
  u64 count(u32 a) const { return csr_.start[a + 1] - csr_.start[a]; }
  const alphabet_stats& stats() const { return stats_; }
  const shared_seq& data() const { return seq_; }

 private:
  shared_seq seq_;
  u32 sigma_ = 0;
  u64 chunk_ = 0;
  chunk_counts cc_;
  detail::position_csr csr_;
  alphabet_stats stats_;
};

// ---------------------------------------------------------------------------
// general_seq: sequence over an arbitrary alphabet. access/select O(1);
// rank is a binary search over the symbol's position list (the documented
// slower general rank).
class general_seq {
 public:
  general_seq() = default;
  general_seq(shared_seq seq, u32 sigma);

  u64 size() const { return seq_->size(); }
  u32 sigma() const { return sigma_; }
  u32 access(u64 i) const {
    TI_REQUIRE(i < seq_->size(), "general_seq::access out of range");
    return (*seq_)[i];
  }
  u64 rank(u32 a, i64 i) const;  // inclusive
  u64 select(u32 a, u64 k) const;
  u64 count(u32 a) const { return csr_.start[a + 1] - csr_.start[a]; }
  const alphabet_stats& stats() const { return stats_; }
  const shared_seq& data() const { return seq_; }

 private:
  shared_seq seq_;
  u32 sigma_ = 0;
  detail::position_csr csr_;
  alphabet_stats stats_;
};

// ---------------------------------------------------------------------------
// rmq_index: position of the minimum (or maximum) value in a range. Blocks
// of ~32 values keep per-block extrema; a sparse table over block extrema
// answers the middle part; block edges are scanned. Ties break to the
// leftmost position. Owns its values.
class rmq_index {
 public:
  enum class kind { min, max };

  rmq_index() = default;
  rmq_index(std::vector<u32> values, kind k);

  std::size_t size() const { return values_.size(); }
  u32 value(std::size_t i) const { return values_[i]; }
  // Position attaining the extreme in [l, r] (leftmost on ties).
  std::size_t query(std::size_t l, std::size_t r) const;

 private:
  bool better(std::size_t a, std::size_t b) const;
  std::size_t scan(std::size_t l, std::size_t r) const;

  std::vector<u32> values_;
  kind kind_ = kind::min;
  std::size_t block_ = 32;
  std::vector<u32> block_pos_;            // extreme position per block
  std::vector<std::vector<u32>> table_;   // sparse table over block extrema
};

}  // namespace textidx
