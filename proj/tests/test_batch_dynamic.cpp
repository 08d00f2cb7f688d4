// Dynamic batched-rank sequence against oracles: array-replay references for
// inserts, counting sweeps for ranks, plus lifetime accounting (block splits
// amortized by inserts, chunk/group splits, relabel volume).
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include "test_util.hpp"
#include "textidx/batch_dynamic.hpp"
#include "textidx/oracle.hpp"

using namespace textidx;
using testutil::random_seq;
using testutil::txt;

namespace {

using dyn = dyn_batch_seq;

std::vector<std::pair<u32, u64>> as_pairs(const std::vector<dyn::query>& qs) {
  std::vector<std::pair<u32, u64>> out;
  out.reserve(qs.size());
  for (const auto& q : qs) out.emplace_back(q.symbol, q.pos);
  return out;
}

// Naive inclusive block rank used to cross-check the precomputed table.
u32 naive_block_rank(const std::vector<u32>& block, u32 a, u32 i) {
  u32 r = 0;
  for (u32 j = 0; j <= i; ++j) r += block[j] == a;
  return r;
}

void table_exhaustive() {
  const std::pair<u32, u32> shapes[] = {{2, 5}, {3, 3}, {4, 2}, {5, 4}};
  for (const auto& [sigma, cap] : shapes) {
    block_rank_table tbl(sigma, cap);
    T_CHECK(tbl.available());
    T_EQ(tbl.sigma(), sigma);
    T_EQ(tbl.block_cap(), cap);
    // Enumerate every possible block content of every length up to cap.
    std::vector<u32> block(cap, 0);
    u64 codes = 1;
    for (u32 j = 0; j < cap; ++j) codes *= sigma;
    for (u64 code = 0; code < codes; ++code) {
      u64 rest = code;
      for (u32 j = 0; j < cap; ++j) {
        block[j] = static_cast<u32>(rest % sigma);
        rest /= sigma;
      }
      if (tbl.code_of(block.data(), cap) != code) {
        T_EQ(tbl.code_of(block.data(), cap), code);
        break;
      }
      bool ok = true;
      for (u32 a = 0; a < sigma && ok; ++a)
        for (u32 i = 0; i < cap && ok; ++i)
          ok = tbl.rank(code, a, i) == naive_block_rank(block, a, i);
      if (!ok) {
        T_CHECK(ok);
        break;
      }
    }
    T_CHECK(true);  // full (sigma, cap) enumeration agreed with the scan
  }
  // Shorter blocks reuse the same code space: unused tail slots read as
  // symbol 0 but rank never looks past the block's own length.
  {
    block_rank_table tbl(3, 4);
    const std::vector<u32> part = {2, 0, 1};
    const u64 code = tbl.code_of(part.data(), 3);
    for (u32 a = 0; a < 3; ++a)
      for (u32 i = 0; i < 3; ++i)
        T_EQ(tbl.rank(code, a, i), naive_block_rank(part, a, i));
  }
  T_CHECK(!block_rank_table(65536, 16).available());
  T_CHECK(!block_rank_table(2, 24).available());  // 2^24 codes, table too big
  T_THROWS(block_rank_table(0, 4), std::invalid_argument);
}

void build_shapes() {
  {
    dyn d(std::vector<u32>{}, 8);
    T_EQ(d.size(), 0u);
    T_EQ(d.chunk_count(), 0u);
    T_CHECK(d.readout().empty());
    const auto ans = d.batch_rank({{0, 0}, {7, 0}, {3, 99}});
    for (i64 a : ans) T_EQ(a, -1);
    d.check_invariants();
  }
  {
    // 3 sigma symbols fit one chunk; 4 sigma + 1 must produce two.
    std::mt19937_64 rng(7);
    const auto one = random_seq(rng, 24, 8);
    dyn d1(one, 8);
    T_EQ(d1.chunk_count(), 1u);
    T_CHECK(d1.readout() == one);
    d1.check_invariants();
    const auto two = random_seq(rng, 33, 8);
    dyn d2(two, 8);
    T_EQ(d2.chunk_count(), 2u);
    T_CHECK(d2.readout() == two);
    d2.check_invariants();
    T_CHECK(d2.initial_blocks() >= d2.chunk_count());
  }
  {
    // Large capacity hints raise the block capacity and enable the table.
    std::mt19937_64 rng(8);
    const auto s = random_seq(rng, 500, 2);
    dyn d(s, 2, u64{1} << 40);
    T_EQ(d.block_capacity(), 10u);
    T_EQ(d.block_fill(), 5u);
    T_CHECK(d.table().available());
    T_CHECK(d.readout() == s);
    d.check_invariants();
  }
}

void small_example() {
  const auto raw = txt("abracadabra");
  dyn d(raw, 5);
  T_EQ(d.size(), raw.size());
  d.check_invariants();
  std::vector<dyn::query> qs;
  for (u32 a = 0; a < 5; ++a)
    for (u64 i = 0; i < raw.size(); ++i) qs.push_back({a, i});
  dyn::batch_stats st;
  const auto got = d.batch_rank(qs, &st);
  const auto want = oracle::rank_bulk(raw, 5, as_pairs(qs));
  T_CHECK(got == want);
  T_CHECK(st.merge_steps <= st.merge_bound);
  T_EQ(st.out_of_range, 0u);
  // Inclusive rank of 'a' at position 6 of "abracadabra" is 3.
  T_EQ(d.batch_rank({{raw[0], 6}})[0], 3);
}

void single_inserts() {
  dyn d(std::vector<u32>{}, 4);
  d.batch_insert({{0, 2}});
  T_EQ(d.size(), 1u);
  T_CHECK(d.readout() == std::vector<u32>{2});
  T_EQ(d.batch_rank({{2, 0}})[0], 1);
  d.check_invariants();
  // Final positions 0 and 2 around the existing symbol.
  d.batch_insert({{0, 1}, {2, 3}});
  T_CHECK(d.readout() == (std::vector<u32>{1, 2, 3}));
  d.check_invariants();
  // Append at the very end.
  d.batch_insert({{3, 0}});
  T_CHECK(d.readout() == (std::vector<u32>{1, 2, 3, 0}));
  const auto ans = d.batch_rank({{0, 3}, {1, 3}, {2, 3}, {3, 3}});
  T_CHECK(ans == (std::vector<i64>{1, 1, 1, 1}));
  d.check_invariants();
}

// Replays random insert batches against a plain array and compares readouts,
// ranks and lifetime accounting.
void random_interleavings(u32 sigma, std::size_t n0, u64 hint, int batches,
                          std::size_t max_batch, u64 seed) {
  std::mt19937_64 rng(seed);
  std::vector<u32> ref = random_seq(rng, n0, sigma);
  dyn d(ref, sigma, hint);
  T_CHECK(d.readout() == ref);
  const u64 probe_cap = ceil_log2(2 * d.group_capacity()) + 1;
  for (int b = 0; b < batches; ++b) {
    const std::size_t m = 1 + rng() % max_batch;
    // Non-decreasing pre-positions in [0, size] map to strictly increasing
    // final positions pos = q + k.
    std::vector<u64> pre(m);
    for (auto& q : pre) q = rng() % (ref.size() + 1);
    std::sort(pre.begin(), pre.end());
    std::vector<dyn::insert_op> ops(m);
    std::vector<std::pair<u64, u32>> ref_ops(m);
    for (std::size_t k = 0; k < m; ++k) {
      const u32 sym = static_cast<u32>(rng() % sigma);
      ops[k] = {pre[k] + k, sym};
      ref_ops[k] = {pre[k] + k, sym};
    }
    d.batch_insert(ops);
    ref = oracle::splice_insert(ref, ref_ops);
    T_EQ(d.size(), ref.size());
    if (d.readout() != ref) {
      T_CHECK(d.readout() == ref);
      return;
    }
    std::vector<dyn::query> qs;
    const std::size_t nq = 200;
    for (std::size_t i = 0; i < nq; ++i) {
      if (i % 16 == 15) {
        qs.push_back({sigma + static_cast<u32>(rng() % 3), rng() % ref.size()});
      } else if (i % 16 == 14) {
        qs.push_back({static_cast<u32>(rng() % sigma),
                      ref.size() + rng() % 10});
      } else {
        qs.push_back({static_cast<u32>(rng() % sigma), rng() % ref.size()});
      }
    }
    dyn::batch_stats st;
    const auto got = d.batch_rank(qs, &st);
    const auto want = oracle::rank_bulk(ref, sigma, as_pairs(qs));
    if (got != want) {
      T_CHECK(got == want);
      return;
    }
    T_CHECK(st.merge_steps <= st.merge_bound);
    T_CHECK(st.probes <= nq * probe_cap);
    if (b % 5 == 4 || b + 1 == batches) d.check_invariants();
  }
  const auto& life = d.lifetime();
  T_EQ(life.inserted, ref.size() - n0);
  // Every block created by a split is paid for by at least block_fill()
  // inserted symbols (splits cut into even pieces no smaller than the fill).
  T_CHECK(life.new_blocks * d.block_fill() <= life.inserted);
  if (life.label_reinits == 0)
    T_CHECK(life.relabeled <= 3 * life.new_blocks);
}

void split_pressure() {
  // Tiny alphabet: chunks cap at 8 symbols, so growth forces chunk rebuilds;
  // a large hint gives capacity-10 blocks and the precomputed rank table.
  std::mt19937_64 rng(21);
  std::vector<u32> ref = random_seq(rng, 10, 2);
  dyn d(ref, 2, u64{1} << 40);
  for (int b = 0; b < 30; ++b) {
    const std::size_t m = 1 + rng() % 400;
    std::vector<u64> pre(m);
    for (auto& q : pre) q = rng() % (ref.size() + 1);
    std::sort(pre.begin(), pre.end());
    std::vector<dyn::insert_op> ops(m);
    std::vector<std::pair<u64, u32>> ref_ops(m);
    for (std::size_t k = 0; k < m; ++k) {
      const u32 sym = static_cast<u32>(rng() % 2);
      ops[k] = {pre[k] + k, sym};
      ref_ops[k] = {pre[k] + k, sym};
    }
    d.batch_insert(ops);
    ref = oracle::splice_insert(ref, ref_ops);
  }
  T_CHECK(d.readout() == ref);
  d.check_invariants();
  const auto& life = d.lifetime();
  T_CHECK(life.chunk_splits >= 1);
  T_CHECK(life.block_splits >= 1);
  T_CHECK(d.chunk_count() >= ref.size() / 8);
  T_CHECK(life.new_blocks * d.block_fill() <= life.inserted);
  // Ranks across chunk boundaries after heavy splitting.
  std::vector<dyn::query> qs;
  for (u64 i = 0; i < ref.size(); i += 37) qs.push_back({i % 2 == 0, i});
  const auto got = d.batch_rank(qs);
  T_CHECK(got == oracle::rank_bulk(ref, 2, as_pairs(qs)));
}

void group_split_scenario() {
  // Small hint keeps group capacity at lg^2(64) = 36. Repeated prefix
  // inserts of one symbol funnel into the first group of the first chunk
  // until it exceeds twice the capacity and splits.
  std::vector<u32> ref(100, 0);
  dyn d(ref, 32, 64);
  T_EQ(d.group_capacity(), 36u);
  for (int b = 0; b < 2; ++b) {
    std::vector<dyn::insert_op> ops(30);
    std::vector<std::pair<u64, u32>> ref_ops(30);
    for (u64 k = 0; k < 30; ++k) {
      ops[k] = {k, 0};
      ref_ops[k] = {k, 0};
    }
    d.batch_insert(ops);
    ref = oracle::splice_insert(ref, ref_ops);
    d.check_invariants();
  }
  T_CHECK(d.readout() == ref);
  T_CHECK(d.lifetime().group_splits >= 1);
  T_EQ(d.batch_rank({{0, d.size() - 1}})[0], static_cast<i64>(ref.size()));
}

void totals_at_last_position() {
  std::mt19937_64 rng(33);
  const u32 sigma = 64;
  const auto s = random_seq(rng, 4000, sigma);
  dyn d(s, sigma);
  std::vector<u64> want(sigma, 0);
  for (u32 v : s) ++want[v];
  std::vector<dyn::query> qs;
  for (u32 a = 0; a < sigma; ++a) qs.push_back({a, s.size() - 1});
  const auto got = d.batch_rank(qs);
  for (u32 a = 0; a < sigma; ++a) T_EQ(got[a], static_cast<i64>(want[a]));
}

void error_cases() {
  T_THROWS(dyn(std::vector<u32>{0, 1, 4}, 4), std::invalid_argument);
  T_THROWS(dyn(std::vector<u32>{}, 0), std::invalid_argument);
  T_THROWS(dyn(std::vector<u32>{}, u32{1} << 25), std::invalid_argument);
  dyn d(std::vector<u32>{0, 1, 2, 3}, 4);
  T_THROWS(d.batch_insert({{1, 0}, {1, 0}}), std::invalid_argument);
  T_THROWS(d.batch_insert({{2, 1}, {1, 1}}), std::invalid_argument);
  T_THROWS(d.batch_insert({{0, 4}}), std::invalid_argument);
  T_THROWS(d.batch_insert({{6, 0}}), std::invalid_argument);
  // Failed batches must not touch the sequence.
  T_CHECK(d.readout() == (std::vector<u32>{0, 1, 2, 3}));
  T_EQ(d.lifetime().inserted, 0u);
  d.check_invariants();
  dyn empty;
  T_EQ(empty.size(), 0u);
  T_CHECK(empty.batch_rank({{0, 0}}).at(0) == -1);
}

}  // namespace

int main() {
  table_exhaustive();
  build_shapes();
  small_example();
  single_inserts();
  // Growth from empty, mid-size alphabet, large alphabet, degenerate sigma=1.
  random_interleavings(4, 0, 20000, 25, 1500, 101);
  random_interleavings(16, 1000, 30000, 20, 2000, 102);
  random_interleavings(256, 5000, 40000, 12, 3000, 103);
  random_interleavings(1, 5, 4096, 8, 300, 104);
  split_pressure();
  group_split_scenario();
  totals_at_last_position();
  error_cases();
  return testutil::finish("test_batch_dynamic");
}
