#pragma once
// Dynamic sequence with batched inclusive rank queries and batched
// insertions, amortized O(1) work per item. The sequence is cut into chunks
// of Theta(sigma) symbols. Each chunk stores its symbols in a linked list of
// small fixed-capacity blocks; block order is mirrored by strictly
// increasing labels from a labeled_list, so label comparisons replace
// position arithmetic that insertions would invalidate. Every occurrence
// owns a pair (symbol, block); per-symbol pairs are cut into groups with
// prefix counts. A rank query resolves to
//   (in-block count) + (pairs before the group) + (pairs in the group whose
//   block label is below the query block's label),
// plus a per-symbol chunk prefix from a global unary directory that is
// rebuilt after every insert batch.
//
// Insertions address FINAL positions: index k in the batch refers to the
// sequence as it looks after the whole batch is applied, and positions must
// be strictly increasing. Oversized blocks split into even pieces, oversized
// chunks are rebuilt into fresh chunks, oversized groups split; labels for
// new blocks come from one labeled_list batch per chunk.

#include <vector>

#include "textidx/bits.hpp"
#include "textidx/common.hpp"
#include "textidx/list_label.hpp"

namespace textidx {

// Precomputed answers to "inclusive count of symbol a in block positions
// [0, i]" for every possible block content, indexed by a base-sigma content
// code. Built only when the full table stays small; otherwise callers scan
// the block directly (identical answers).
class block_rank_table {
 public:
  block_rank_table() = default;
  block_rank_table(u32 sigma, u32 block_cap);

  bool available() const { return avail_; }
  u32 sigma() const { return sigma_; }
  u32 block_cap() const { return cap_; }

  // Content code of a block: sum over j of syms[j] * sigma^j.
  u64 code_of(const u32* syms, u32 len) const;
  u32 rank(u64 code, u32 symbol, u32 offset) const {
    return tbl_[(code * sigma_ + symbol) * cap_ + offset];
  }

 private:
  u32 sigma_ = 0;
  u32 cap_ = 0;
  bool avail_ = false;
  std::vector<u8> tbl_;
};

class dyn_batch_seq {
 public:
  struct query {
    u32 symbol;
    u64 pos;  // inclusive rank position
  };
  struct insert_op {
    u64 pos;  // final (post-batch) position, strictly increasing
    u32 symbol;
  };

  struct batch_stats {
    u64 merge_steps = 0;   // directory/group pointer advances
    u64 merge_bound = 0;   // sum over chunk batches of groups + queries
    u64 probes = 0;        // in-group binary-search probes
    u64 out_of_range = 0;  // queries answered with the error marker
    u64 chunk_batches = 0;
  };

  struct life_stats {
    u64 inserted = 0;      // symbols inserted over the lifetime
    u64 new_blocks = 0;    // blocks created by block splits
    u64 block_splits = 0;  // block split events
    u64 chunk_splits = 0;  // chunk rebuild events
    u64 group_splits = 0;  // group split events
    u64 relabeled = 0;     // old blocks whose label changed
    u64 label_reinits = 0; // labeled_list global relabels
  };

  dyn_batch_seq() = default;
  // capacity_hint sizes blocks, groups and label universes; it defaults to
  // the initial length and only affects constants, never correctness.
  dyn_batch_seq(const std::vector<u32>& seq, u32 sigma, u64 capacity_hint = 0);

  u64 size() const { return size_; }
  u32 sigma() const { return sigma_; }
  u64 chunk_count() const { return chunks_.size(); }
  u64 block_capacity() const { return cap_; }   // hard per-block limit
  u64 block_fill() const { return half_; }      // build/split piece target
  u64 group_capacity() const { return group_cap_; }
  u64 initial_blocks() const { return initial_blocks_; }
  const life_stats& lifetime() const { return life_; }
  const block_rank_table& table() const { return tbl_; }

  // Inclusive ranks aligned with queries; -1 marks an invalid query.
  // Read-only and safe to call concurrently between insert batches.
  std::vector<i64> batch_rank(const std::vector<query>& queries,
                              batch_stats* stats = nullptr) const;

  void batch_insert(const std::vector<insert_op>& batch);

  std::vector<u32> readout() const;

  // Recomputes every structural invariant from scratch and throws on any
  // violation. O(n); intended for tests.
  void check_invariants() const;

 private:
  static constexpr u32 npos = ~u32{0};

  struct pair_rec {
    u32 symbol;
    u32 block;
  };
  struct group {
    std::vector<u32> ids;  // pair ids in position order (labels non-decreasing)
    u64 before = 0;        // pairs of this symbol in earlier groups
  };
  struct sym_entry {
    u32 symbol;
    std::vector<group> groups;
  };
  struct block_rec {
    u32 next = npos;
    u32 label_handle = 0;
    u32 psize = 0;  // symbols in preceding blocks of the chunk
    u32 size = 0;
  };
  struct chunk {
    std::vector<u32> syms;     // slab; block b occupies [b*cap, b*cap+size)
    std::vector<u32> pair_of;  // pair id per stored symbol (parallel slab)
    std::vector<block_rec> blocks;
    u32 head = 0;
    labeled_list labels{1, 1};
    std::vector<pair_rec> pairs;   // stable ids, never reordered
    std::vector<sym_entry> dir;    // sorted by symbol
    std::vector<u32> counts;       // per-symbol occurrence counts
    u64 group_total = 0;
    u64 total = 0;
  };

  struct qrec {
    u32 rel;   // chunk-relative inclusive position
    u32 sym;
    u32 slot;  // caller-defined output slot
  };
  struct ins_rec {
    u64 q;    // chunk-relative pre-insertion position
    u32 sym;
    u32 id;   // chunk-local batch index
  };

  chunk build_chunk(const u32* data, u64 len) const;
  void build_chunks(const u32* data, u64 len);  // replaces chunks_
  void rebuild_globals();
  u64 block_label(const chunk& c, u32 b) const {
    return c.labels.label(c.blocks[b].label_handle);
  }
  u64 pair_label(const chunk& c, u32 id) const {
    return block_label(c, c.pairs[id].block);
  }
  u32 block_rank1(const chunk& c, u32 b, u32 symbol, u32 offset) const;
  // Chunk-local inclusive ranks; writes out[q.slot] for every entry.
  void rank_in_chunk(const chunk& c, std::vector<qrec>& qs,
                     std::vector<i64>& out, batch_stats& st) const;
  // Applies one chunk's share of an insert batch; if the chunk outgrows 4
  // sigma it is rebuilt into `replacement` pieces (otherwise left in place).
  void insert_in_chunk(chunk& c, std::vector<ins_rec>& ins,
                       std::vector<chunk>& replacement);

  u32 sigma_ = 0;
  u64 size_ = 0;
  u64 cap_ = 1;
  u64 half_ = 1;
  u64 group_cap_ = 4;
  u64 universe_ = 1;
  u64 chunk_target_ = 3;  // build size ~3 sigma, hard limit 4 sigma
  u64 initial_blocks_ = 0;
  block_rank_table tbl_;
  std::vector<chunk> chunks_;
  std::vector<u64> chunk_start_;  // size chunks_+1
  chunk_counts counts_;
  life_stats life_;
};

}  // namespace textidx
