#pragma once
// Permuted LCP array (per text position, the longest common prefix with the
// lexicographically preceding suffix) built from a forward/reverse suffix
// topology pair in three stages: anchor positions every few steps are fixed
// by bounded direct comparison, interior positions are filled left to right
// by many concurrent jobs whose general rank queries are pooled and answered
// in batches, and whatever the pooled stage abandons is finished by direct
// comparison. Each job carries the exact interval pair of the prefix shared
// with the predecessor, which keeps every contraction/extension step exact.

#include <vector>

#include "textidx/batch_static.hpp"
#include "textidx/bits.hpp"
#include "textidx/common.hpp"
#include "textidx/topology.hpp"

namespace textidx {

// Distance between anchored positions: floor(log_sigma n) scaled by
// ceil(log2 ceil(log2 max(sigma, 4))), both factors floored at 1.
u64 plcp_anchor_spacing(u64 n, u32 sigma);

struct plcp_stats {
  u64 spacing = 0;
  u64 capacity = 0;            // pooled-query flush size
  u64 anchors = 0;             // values fixed in stage 1
  u64 stage2_values = 0;       // values fixed by the batched scheduler
  u64 stage3_values = 0;       // values fixed by the final direct stage
  u64 jobs_spawned = 0;
  u64 jobs_finished = 0;
  u64 jobs_abandoned = 0;
  u64 sched_steps = 0;         // scheduler dispatches
  u64 uniform_steps = 0;       // extensions via the single-follower shortcut
  u64 child_steps = 0;         // extensions resolved through a child lookup
  u64 pooled_l = 0;            // queries pooled on the child-label sequence
  u64 pooled_b = 0;            // queries pooled on the reverse transform
  u64 flushes_l = 0;
  u64 flushes_b = 0;
  u64 singleton_flushes = 0;   // flushes carrying a single query
  u64 undersized_flushes = 0;  // flushes below capacity
  u64 pool_peak = 0;           // largest flushed batch
  u64 live_peak = 0;           // in-flight jobs when the scheduler starts
  u64 stage1_scan = 0;         // matched symbol comparisons in stage 1
  u64 stage3_scan = 0;         // matched symbol comparisons in stage 3
  u64 chain_contracts = 0;     // interval ops while seeding anchor states
  u64 chain_extends = 0;
  u64 sum_inc = 0;             // sum of positive value increments
};

class plcp_builder {
 public:
  // text must end with its single 0 sentinel; topo/rtopo are the suffix
  // topologies of the text and of its reverse (content reversed, sentinel
  // kept last). pool_capacity overrides the flush size when nonzero; the
  // default is n / floor(log2 n)^2, floored at 1.
  plcp_builder(const std::vector<u32>& text, const suffix_topology& topo,
               const suffix_topology& rtopo, u64 pool_capacity = 0);

  u64 size() const { return n_; }
  u64 spacing() const { return spacing_; }
  u64 capacity() const { return cap_; }

  // Row of suffix p+1 given the row of suffix p, whose first symbol is c.
  u64 psi(u64 row, u32 c) const;
  // Row of suffix p-1 given the row of suffix p.
  u64 lf(u64 row) const;

  // Interval pair of W given the pair of cW (len = |cW|). len <= 1 yields
  // the empty-factor pair. cW's pair must be exact and cW right-maximal
  // (at least two occurrences with two distinct following symbols).
  interval_pair contract_left(const interval_pair& s, u64 len, u32 c) const;

  // Appends content symbol a to the tracked factor, updating both sides;
  // returns false (state untouched) when the extension does not occur.
  bool extend_right(interval_pair& s, u32 a) const;

  std::vector<u32> run(plcp_stats* stats = nullptr);

 private:
  struct job;

  void stage1(std::vector<u32>& out, const std::vector<u64>& row_of,
              const bit_vector& marks, const std::vector<u32>& mark_pos,
              std::vector<interval_pair>& seeds, plcp_stats& st) const;
  void stage2(std::vector<u32>& out, const std::vector<u64>& row_of,
              const std::vector<interval_pair>& seeds, plcp_stats& st) const;
  void stage3(std::vector<u32>& out, const std::vector<u64>& row_of,
              const bit_vector& marks, const std::vector<u32>& mark_pos,
              plcp_stats& st) const;

  const std::vector<u32>& text_;
  const suffix_topology& topo_;
  const suffix_topology& rtopo_;
  u64 n_ = 0;
  u32 sigma_ = 0;
  u64 spacing_ = 1;
  u64 cap_ = 1;
  general_seq gs_b_;   // forward transform: psi via select
  general_seq gs_rb_;  // reverse transform: unpooled extension ranks
  shared_seq labels_;  // child edge symbols of all internal nodes, by rank
  std::vector<u64> label_off_;  // label slice start per internal rank
  general_seq gs_l_;            // select over labels_
  static_batch_seq batch_l_;    // pooled ranks over labels_
  static_batch_seq batch_rb_;   // pooled ranks over the reverse transform
};

// One-call wrapper around plcp_builder::run.
std::vector<u32> build_plcp(const std::vector<u32>& text,
                            const suffix_topology& topo,
                            const suffix_topology& rtopo,
                            plcp_stats* stats = nullptr);

// 2n-bit store of a permuted LCP array: value[i] + 2i is strictly increasing
// (successive values drop by at most 1), so marking those sums in a bit
// vector recovers any value with one select.
class plcp_bits {
 public:
  plcp_bits() = default;
  explicit plcp_bits(const std::vector<u32>& plcp);

  u64 size() const { return n_; }
  u64 size_bits() const { return bits_.size(); }
  u32 get(u64 i) const;
  std::vector<u32> decode() const;
  const bit_vector& bits() const { return bits_; }

 private:
  u64 n_ = 0;
  bit_vector bits_;
};

}  // namespace textidx
