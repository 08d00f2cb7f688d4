#pragma once
// Suffix tree topology over a Burrows-Wheeler transform.
//
// The tree is stored as a balanced-parentheses string (nodes are identified
// by the position of their opening parenthesis) with block-level excess
// directories for navigation. It is built without ever materializing the
// suffix array: starting from the root interval, Weiner links (backward
// steps) driven by range-distinct queries enumerate the suffix-array
// interval and child decomposition of every internal node exactly once.
//
// On top of the topology sit two sparse dictionaries that make repeated
// downward navigation and Weiner-link computation cheap: node_marking
// classifies nodes as heavy (>= d leaf descendants, d = floor(log2 n)) and
// stores heavy-child directories for the few nodes that need them, and
// weiner_link_index does the same for heavy Weiner links plus a
// boundary-local rank structure on the BWT. Lookups that fall outside every
// fast path (the "difficult" cases) fall back to a general rank query; any
// root-to-descendant or Weiner-chain run hits at most one such case.

#include <utility>
#include <vector>

#include "textidx/bits.hpp"
#include "textidx/common.hpp"
#include "textidx/rank_ext.hpp"

namespace textidx {

// Balanced-parentheses tree. Positions index the parenthesis string; every
// node is named by the position of its '('. Navigation uses block excess
// minima plus a block-level range-minimum directory, so single operations
// cost one or two block scans.
class bp_tree {
 public:
  bp_tree() = default;
  explicit bp_tree(bit_vector bits);

  u64 size_bits() const { return bits_.size(); }
  u64 node_count() const { return bits_.ones(); }
  u64 leaf_count() const { return leaf_total_; }
  const bit_vector& bits() const { return bits_; }

  bool is_open(u64 i) const { return bits_.get(i); }
  bool is_leaf(u64 v) const;
  // Excess (opens minus closes) of the prefix [0, i).
  i64 excess(u64 i) const {
    return 2 * static_cast<i64>(bits_.rank1(i)) - static_cast<i64>(i);
  }

  u64 find_close(u64 v) const;   // matching ')' of the '(' at v
  i64 parent(u64 v) const;       // -1 for the root
  u64 lca(u64 u, u64 v) const;
  i64 first_child(u64 v) const;  // -1 for leaves
  i64 next_sibling(u64 v) const;
  u64 degree(u64 v) const;       // child count, by walking
  i64 child(u64 v, u64 i) const; // i-th child (0-based), by walking

  u64 leaf_rank(u64 i) const;    // leaves opening strictly before i
  u64 leaf_select(u64 k) const;  // position of the k-th leaf, k >= 1
  u64 leftmost_leaf(u64 v) const;
  u64 rightmost_leaf(u64 v) const;
  // Internal (non-leaf) nodes opening strictly before i.
  u64 internal_rank(u64 i) const { return bits_.rank1(i) - leaf_rank(i); }

 private:
  static constexpr u64 kBlock = 256;  // bits per directory block

  u64 block_count() const { return (bits_.size() + kBlock - 1) / kBlock; }
  // First position >= from with excess(pos + 1) == target, else -1.
  i64 fwd_search(u64 from, i64 target) const;
  // Last position <= upto with excess(pos) == target, else -1.
  i64 bwd_search(u64 upto, i64 target) const;
  // Leftmost position in [i, j] minimizing excess(pos + 1).
  u64 min_excess_pos(u64 i, u64 j) const;

  bit_vector bits_;
  std::vector<u32> block_min_;   // per block: min excess(i + 1), i in block
  rmq_index block_rmq_;
  std::vector<u32> leaf_dir_;    // leaves before each block
  u64 leaf_total_ = 0;
};

// Suffix tree topology with the interval enumeration retained: for every
// internal node (indexed by internal rank in parenthesis order) its
// suffix-array interval and its child decomposition (edge first symbols and
// child sub-interval starts). Leaves are the n suffixes in lexicographic
// order.
class suffix_topology {
 public:
  // bwt must be the transform of a 0-terminated text: exactly one 0.
  suffix_topology(shared_seq bwt, u32 sigma);

  u64 size() const { return bwt_->size(); }           // text length n
  u32 sigma() const { return sigma_; }
  const bp_tree& tree() const { return bp_; }
  const shared_seq& bwt() const { return bwt_; }
  const alphabet_stats& acc() const { return acc_; }
  const shared_partial_rank& partial() const { return pr_; }
  const range_distinct_index& distinct() const { return rd_; }
  u64 root() const { return 0; }
  u64 internal_count() const { return nodes_.size(); }

  // Node <-> suffix-array interval. Intervals are inclusive leaf ranks.
  std::pair<u64, u64> interval(u64 v) const;
  u64 leaves(u64 v) const;
  u64 node_of(u64 l, u64 r) const;  // deepest node spanning exactly [l, r]
  u64 leaf_node(u64 k) const { return bp_.leaf_select(k + 1); }

  struct children_view {
    u64 l, r;           // the node's own interval
    u32 count;          // number of children
    const u32* labels;  // edge first symbols, ascending
    const u32* starts;  // child sub-interval start rows (child i ends at
                        // starts[i + 1] - 1, the last child at r)
  };
  children_view children(u64 v) const;  // v must be an internal node
  // Same record addressed by internal rank (parenthesis order).
  children_view children_by_rank(u64 internal_idx) const;
  // Child whose edge starts with `a` as an index into children(v), or -1.
  i64 child_index(u64 v, u32 a) const;
  std::pair<u64, u64> child_interval(const children_view& cv, u32 i) const;

 private:
  struct enum_node {
    u32 l, r;
    u32 off, cnt;  // slice of clabel_/cstart_
  };

  shared_seq bwt_;
  u32 sigma_ = 0;
  alphabet_stats acc_;
  shared_partial_rank pr_;
  range_distinct_index rd_;
  bp_tree bp_;
  std::vector<enum_node> nodes_;  // by internal rank
  std::vector<u32> clabel_;
  std::vector<u32> cstart_;
};

// Instrumentation for navigation fast/slow paths. A "difficult" step is a
// lookup whose result is a light node reached from a heavy one; such steps
// are the only ones allowed to cost more than a dictionary probe, and any
// single downward or Weiner-link run contains at most one of them.
struct nav_stats {
  u64 difficult = 0;
  u64 dict_hits = 0;    // answered from a heavy-child / heavy-link dictionary
  u64 stored_hits = 0;  // answered from a stored unique heavy child / link
  u64 slow_ranks = 0;   // general rank fallbacks (Weiner links only)
};

// Heavy/special node marking with child dictionaries, threshold
// d = floor(log2 n) (floored at 1).
class node_marking {
 public:
  explicit node_marking(const suffix_topology& topo);

  u64 threshold() const { return d_; }
  bool is_heavy(u64 internal_idx) const { return heavy_.get(internal_idx); }
  bool is_special(u64 internal_idx) const { return special_.get(internal_idx); }
  u64 special_count() const { return specials_.size(); }
  u64 dict_entries() const { return d_label_.size(); }
  u64 stored_links() const { return stored_src_.size(); }

  // Child of v (internal, by parenthesis position) whose edge starts with a;
  // -1 when absent. Dictionary paths are tried first; the instrumentation
  // records which one answered.
  i64 child_by_label(const suffix_topology& topo, u64 v, u32 a,
                     nav_stats* st = nullptr) const;

 private:
  u64 d_ = 1;
  bit_vector heavy_;    // per internal rank
  bit_vector special_;
  std::vector<u32> specials_;   // internal ranks of special nodes, ascending
  std::vector<u32> d_off_;      // specials_ -> slice of d_label_/d_target_
  std::vector<u32> d_label_;    // heavy-child edge symbols
  std::vector<u32> d_target_;   // heavy-child parenthesis positions
  std::vector<u32> stored_src_;    // non-special nodes with > d children and
  std::vector<u32> stored_label_;  // exactly one heavy child
  std::vector<u32> stored_target_;
};

// Weiner-link computation: wlink(v, a) is the node whose interval is the
// backward-search image of v's interval under a. Heavy links from w-special
// sources and unique heavy links are stored; everything else is computed
// from boundary-local occurrence searches on the BWT, falling back to one
// general rank per difficult link.
class weiner_link_index {
 public:
  explicit weiner_link_index(const suffix_topology& topo);

  u64 threshold() const { return d_; }
  u64 wspecial_count() const { return specials_.size(); }
  u64 stored_links() const { return wd_label_.size() + uniq_src_.size(); }

  // Target node of wlink(v, a), or -1 when a does not occur in v's interval.
  i64 weiner_link(const suffix_topology& topo, u64 v, u32 a,
                  nav_stats* st = nullptr) const;

 private:
  u64 d_ = 1;
  u64 window_ = 1;  // boundary search span, d^2
  small_interval_rank_index si_;  // group width 4 d^2
  general_seq gs_;                // slow-path rank
  std::vector<u32> specials_;  // w-special internal ranks, ascending
  std::vector<u32> wd_off_;
  std::vector<u32> wd_label_;
  std::vector<u32> wd_target_;
  std::vector<u32> uniq_src_;   // internal ranks with a unique heavy link
  std::vector<u32> uniq_label_;
  std::vector<u32> uniq_target_;
};

// Interval state of a text factor W: [fl, fr] is the suffix-array interval
// of W in the forward text, [rl, rr] the interval of reversed W in the
// reverse text.
struct interval_pair {
  u64 fl, fr;
  u64 rl, rr;
};

struct extend_stats {
  u64 uniform = 0;  // steps taken via the single-symbol shortcut
  nav_stats child;
  nav_stats wlink;
};

// Appends symbols[0..count) to the factor tracked by `state`, updating both
// intervals after every symbol. Returns the number of symbols applied; the
// run stops early when the extended factor no longer occurs, leaving the
// state at the longest extension reached. topo/marking belong to the
// forward text, rtopo/rwl to the reverse text.
u64 extend_right_run(const suffix_topology& topo, const node_marking& marking,
                     const suffix_topology& rtopo,
                     const weiner_link_index& rwl, interval_pair& state,
                     const u32* symbols, u64 count,
                     extend_stats* st = nullptr);

}  // namespace textidx
