#pragma once
// Static sequence answering batches of inclusive rank queries in amortized
// constant time per query. The sequence is cut into chunks of sigma symbols;
// each chunk keeps its occurrence positions grouped by symbol, boundaries of
// every group of ~log^2(n) same-symbol occurrences are collected into a
// sorted merge array, and per-chunk prefix counts come from unary chunk
// counters. A query batch is distributed to chunks, sorted, merged against
// the boundary array, and finished with one short binary search per query.
//
// For alphabets below the sigma >= log^4(n) regime a plain small-alphabet
// sequence answers queries directly; `mode` can force either structure.

#include <vector>

#include "textidx/bits.hpp"
#include "textidx/common.hpp"

namespace textidx {

class static_batch_seq {
 public:
  enum class mode { automatic, chunked, small_alphabet };

  struct query {
    u32 symbol;
    u64 pos;  // inclusive rank position
  };

  struct batch_stats {
    u64 merge_steps = 0;     // boundary-array advances during merges
    u64 merge_bound = 0;     // sum over chunk batches of |boundaries| + v
    u64 probes = 0;          // binary-search probes inside groups
    u64 out_of_range = 0;    // queries answered with the error marker
    u64 chunk_batches = 0;   // chunks that received at least one query
    u64 comparison_sorted = 0;
    u64 radix_sorted = 0;
  };

  struct build_info {
    mode used = mode::automatic;
    u64 chunks = 0;
    u64 group_cap = 0;   // max occurrences per group (log^2 n)
    u64 boundaries = 0;  // total sampled group boundaries
  };

  static_batch_seq() = default;
  static_batch_seq(shared_seq seq, u32 sigma, mode m = mode::automatic);

  u64 size() const { return seq_ ? seq_->size() : 0; }
  u32 sigma() const { return sigma_; }
  const build_info& info() const { return info_; }

  // Inclusive ranks, aligned with queries; -1 marks an invalid query
  // (symbol or position out of range). Read-only and thread-safe.
  std::vector<i64> batch_rank(const std::vector<query>& queries,
                              batch_stats* stats = nullptr) const;

 private:
  void build_chunked();
  void chunk_batch(u64 chunk, std::vector<std::pair<u32, u32>>& qs,
                   const std::vector<u32>& order, std::vector<i64>& answers,
                   batch_stats& st) const;

  shared_seq seq_;
  u32 sigma_ = 0;
  build_info info_;

  // Chunked representation.
  u64 chunk_size_ = 0;           // = sigma
  u64 chunks_ = 0;
  std::vector<u16> rpos_;        // chunk-relative positions, (chunk, symbol)-major
  std::vector<u32> sym_start_;   // chunks * (sigma + 1) offsets into rpos_
  std::vector<u32> bkey_;        // boundary keys (symbol << 16 | rel position)
  std::vector<u32> bidx_;        // boundary index into rpos_
  std::vector<u32> bstart_;      // per-chunk offsets into bkey_/bidx_
  chunk_counts counts_;

  // Fallback representation.
  small_alphabet_seq plain_;
};

}  // namespace textidx
