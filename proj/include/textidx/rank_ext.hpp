#pragma once
// Rank extensions over an immutable symbol sequence:
//  - partial_rank_index: inclusive rank of seq[i] among its own symbol in
//    O(1) probes, via per-symbol position buckets addressed through binary
//    trie prefixes; O(log log) auxiliary bits per position.
//  - range_distinct_index: report the distinct symbols of any range, each
//    with its leftmost/rightmost in-range occurrence, in-range frequency and
//    before-range frequency, in output-proportional work; plus an O(1)
//    uniform-range test.
//  - small_interval_rank_index: ranks at the leftmost/rightmost occurrence
//    of a symbol within a narrow interval (width <= 2 log^2 sigma).
// All three are immutable after construction; concurrent reads are safe
// (range_distinct takes caller-owned scratch to stay const).

#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "textidx/bits.hpp"
#include "textidx/common.hpp"

namespace textidx {

class partial_rank_index {
 public:
  struct build_info {
    u64 chunks = 0;
    u64 bucketed_sets = 0;  // per-chunk symbol sets that were split
    u64 buckets = 0;        // buckets across all split sets
    u64 aux_bits = 0;       // packed codes + directories + global counters
  };

  partial_rank_index() = default;
  partial_rank_index(shared_seq seq, u32 sigma);

  u64 size() const { return seq_ ? seq_->size() : 0; }
  u32 sigma() const { return sigma_; }
  const shared_seq& data() const { return seq_; }
  const build_info& info() const { return info_; }

  // Inclusive rank of seq[i] among positions [0, i]. probes (optional)
  // accumulates directory binary-search steps.
  u64 rank(u64 i, u64* probes = nullptr) const;

 private:
  struct dir_entry {
    u64 key;     // trie node id * sigma + symbol
    u32 bucket;  // bucket index within the symbol's position set
  };
  struct chunk_dir {
    std::vector<dir_entry> entries;  // sorted by key
  };

  shared_seq seq_;
  u32 sigma_ = 0;
  u64 chunk_width_ = 0;  // sigma, except when the sequence is shorter
  u32 wbits_ = 1;        // bit width of in-chunk positions
  u64 bucket_len_ = 1;   // L = floor(log2 chunk_width)^2
  u32 lbits_ = 1;        // bits for the stored prefix length (+1; 0 = null)
  u32 rbits_ = 1;        // bits for the in-bucket rank
  packed_int_array codes_;
  std::vector<chunk_dir> dirs_;
  chunk_counts counts_;
  build_info info_;
};

using shared_partial_rank = std::shared_ptr<const partial_rank_index>;

struct distinct_entry {
  u32 symbol;
  u64 leftmost;   // leftmost occurrence inside the queried range
  u64 rightmost;  // rightmost occurrence inside the queried range
  u64 freq;       // occurrences inside the range
  u64 before;     // occurrences strictly before the range
};

class range_distinct_index {
 public:
  // Caller-owned workspace: reused across queries so reporting stays
  // proportional to the output after the first call.
  struct scratch {
    std::vector<u32> slot;
    std::vector<u64> stamp;
    u64 epoch = 0;
  };
  struct query_stats {
    u64 rmq_calls = 0;
    u64 probes = 0;  // partial-rank directory probes
  };

  range_distinct_index() = default;
  // Builds its own partial-rank index unless one over the same sequence is
  // supplied.
  range_distinct_index(shared_seq seq, u32 sigma,
                       shared_partial_rank pr = nullptr);

  u64 size() const { return seq_ ? seq_->size() : 0; }
  u32 sigma() const { return sigma_; }
  const shared_partial_rank& partial() const { return pr_; }

  // Distinct symbols of seq[i..j] (inclusive), one entry per symbol in
  // leftmost-discovery order.
  std::vector<distinct_entry> range_distinct(u64 i, u64 j,
                                             scratch* sc = nullptr,
                                             query_stats* st = nullptr) const;

  // True iff seq[i..j] repeats a single symbol; two partial ranks.
  bool is_uniform_range(u64 i, u64 j) const;

 private:
  shared_seq seq_;
  u32 sigma_ = 0;
  shared_partial_rank pr_;
  rmq_index prev_min_;  // over (previous occurrence + 1), 0 = none
  rmq_index next_max_;  // over next occurrence, size() = none
};

class small_interval_rank_index {
 public:
  // group_width = 0 selects the default floor(log2 sigma)^2 (floored at 1);
  // callers with their own locality budget may pass an explicit width.
  small_interval_rank_index() = default;
  small_interval_rank_index(shared_seq seq, u32 sigma,
                            shared_partial_rank pr = nullptr,
                            u64 group_width = 0);

  u64 size() const { return seq_ ? seq_->size() : 0; }
  u32 sigma() const { return sigma_; }
  u64 group_width() const { return width_; }
  u64 interval_limit() const { return 2 * width_; }  // max allowed j - i
  const shared_partial_rank& partial() const { return pr_; }

  // Ranks at the leftmost and rightmost occurrence of `symbol` within
  // seq[i..j]; nullopt when the symbol does not occur there. Requires
  // j - i <= interval_limit().
  std::optional<std::pair<u64, u64>> interval_rank(u32 symbol, u64 i, u64 j,
                                                   u64* probes = nullptr) const;

 private:
  // Largest in-group position p in [lo, hi] with seq[p] == symbol, else -1.
  i64 rightmost_in_group(u64 g, u32 symbol, u64 lo, u64 hi,
                         u64* probes) const;
  i64 leftmost_in_group(u64 g, u32 symbol, u64 lo, u64 hi, u64* probes) const;

  shared_seq seq_;
  u32 sigma_ = 0;
  u64 width_ = 1;  // group width, floor(log2 sigma)^2 floored at 1
  shared_partial_rank pr_;
  std::vector<u64> sym_start_;    // group -> slice of gsyms_/off_start_
  std::vector<u32> gsyms_;        // distinct symbols per group, sorted
  std::vector<u64> off_start_;    // (group, symbol) -> slice of offsets_
  packed_int_array offsets_;      // in-group offsets, position order
};

}  // namespace textidx
