// Bit-level substrate checks against direct counting.

#include "textidx/bits.hpp"

#include <algorithm>

#include "test_util.hpp"
#include "textidx/oracle.hpp"

using namespace textidx;

namespace {

void bit_vector_matches_direct_counts() {
  std::mt19937_64 rng(101);
  for (std::size_t n : {1u, 2u, 63u, 64u, 65u, 127u, 128u, 129u, 1000u, 5000u}) {
    std::vector<bool> bits(n);
    for (std::size_t i = 0; i < n; ++i) bits[i] = rng() % 3 == 0;
    const bit_vector bv(bits);
    T_EQ(bv.size(), n);
    u64 ones = 0;
    bool rank_ok = true, get_ok = true;
    for (std::size_t i = 0; i < n; ++i) {
      rank_ok &= bv.rank1(i) == ones;
      rank_ok &= bv.rank0(i) == i - ones;
      get_ok &= bv.get(i) == static_cast<bool>(bits[i]);
      ones += bits[i];
    }
    rank_ok &= bv.rank1(n) == ones;
    T_CHECK(rank_ok);
    T_CHECK(get_ok);
    T_EQ(bv.ones(), ones);
    bool select_ok = true;
    u64 seen1 = 0, seen0 = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (bits[i])
        select_ok &= bv.select1(++seen1) == i;
      else
        select_ok &= bv.select0(++seen0) == i;
    }
    T_CHECK(select_ok);
    T_THROWS(bv.select1(bv.ones() + 1), std::invalid_argument);
    T_THROWS(bv.select0(bv.zeros() + 1), std::invalid_argument);
    T_THROWS(bv.rank1(n + 1), std::invalid_argument);
    // Words round-trip reconstructs identical behavior.
    const bit_vector bv2(bv.words(), bv.size());
    T_EQ(bv2.ones(), bv.ones());
    if (n > 2) T_EQ(bv2.rank1(n / 2), bv.rank1(n / 2));
  }
  // All-ones and all-zeros edge cases.
  const bit_vector ones_vec(std::vector<bool>(200, true));
  T_EQ(ones_vec.rank1(200), 200u);
  T_EQ(ones_vec.select1(200), 199u);
  const bit_vector zeros_vec(std::vector<bool>(200, false));
  T_EQ(zeros_vec.select0(200), 199u);
}

void builder_matches_vector_ctor() {
  std::mt19937_64 rng(7);
  bit_vector::builder b;
  std::vector<bool> ref;
  for (int run = 0; run < 50; ++run) {
    const bool bit = rng() & 1;
    const u64 len = rng() % 70;
    b.append_run(bit, len);
    for (u64 i = 0; i < len; ++i) ref.push_back(bit);
  }
  const bit_vector a = b.build();
  const bit_vector c(ref);
  T_EQ(a.size(), c.size());
  bool same = true;
  for (u64 i = 0; i < a.size(); ++i) same &= a.get(i) == c.get(i);
  T_CHECK(same);
}

void packed_array_round_trips() {
  std::mt19937_64 rng(11);
  for (u32 width : {1u, 5u, 7u, 16u, 31u, 32u, 33u, 63u, 64u}) {
    const u64 n = 257;
    packed_int_array a(n, width);
    std::vector<u64> ref(n, 0);
    for (int round = 0; round < 2000; ++round) {
      const u64 i = rng() % n;
      const u64 v = rng() & low_mask(width);
      a.set(i, v);
      ref[i] = v;
    }
    bool same = true;
    for (u64 i = 0; i < n; ++i) same &= a.get(i) == ref[i];
    T_CHECK(same);
    const packed_int_array b(a.words(), n, width);
    bool same2 = true;
    for (u64 i = 0; i < n; ++i) same2 &= b.get(i) == ref[i];
    T_CHECK(same2);
  }
}

void chunk_counts_prefix_sums() {
  std::mt19937_64 rng(13);
  const u32 sigma = 9;
  const u64 chunks = 17;
  std::vector<std::vector<u64>> cells(sigma, std::vector<u64>(chunks));
  chunk_counts::builder b(sigma, chunks);
  for (u32 a = 0; a < sigma; ++a)
    for (u64 c = 0; c < chunks; ++c) {
      cells[a][c] = rng() % 6;
      if (a == 3) cells[a][c] = 0;  // a symbol that never occurs
      b.add(cells[a][c]);
    }
  const chunk_counts cc = b.build();
  bool ok = true;
  for (u32 a = 0; a < sigma; ++a) {
    u64 acc = 0;
    ok &= cc.prefix(a, 0) == 0;
    for (u64 c = 0; c < chunks; ++c) {
      acc += cells[a][c];
      ok &= cc.prefix(a, c + 1) == acc;
    }
    ok &= cc.total(a) == acc;
  }
  T_CHECK(ok);
}

void alphabet_stats_buckets() {
  std::mt19937_64 rng(17);
  const auto s = testutil::random_seq(rng, 400, 11);
  alphabet_stats st(s, 11);
  T_EQ(st.total(), 400u);
  T_EQ(st.acc(0), 0u);
  bool ok = true;
  for (u32 a = 0; a < 11; ++a) {
    ok &= st.count(a) == oracle::rank(s, a, 399);
    ok &= st.acc(a + 1) == st.acc(a) + st.count(a);
  }
  T_CHECK(ok);
  // bucket_of inverts acc, including around empty buckets.
  alphabet_stats holes(std::vector<u64>{3, 0, 0, 2, 1});
  T_EQ(holes.bucket_of(0), 0u);
  T_EQ(holes.bucket_of(2), 0u);
  T_EQ(holes.bucket_of(3), 3u);
  T_EQ(holes.bucket_of(4), 3u);
  T_EQ(holes.bucket_of(5), 4u);
  T_THROWS(holes.bucket_of(6), std::invalid_argument);
}

template <class Seq>
void check_seq_against_oracle(const Seq& s, const std::vector<u32>& ref,
                              u32 sigma, std::mt19937_64& rng) {
  const std::size_t n = ref.size();
  T_EQ(s.size(), n);
  bool ok = true;
  for (std::size_t i = 0; i < n; ++i) ok &= s.access(i) == ref[i];
  T_CHECK(ok);
  ok = true;
  for (int round = 0; round < 300; ++round) {
    const u32 a = rng() % sigma;
    const i64 i = static_cast<i64>(rng() % (n + 1)) - 1;
    ok &= s.rank(a, i) == oracle::rank(ref, a, i);
  }
  ok &= s.rank(0, static_cast<i64>(n) - 1) == oracle::rank(ref, 0, static_cast<i64>(n) - 1);
  T_CHECK(ok);
  ok = true;
  for (u32 a = 0; a < sigma; ++a) {
    ok &= s.count(a) == oracle::rank(ref, a, static_cast<i64>(n) - 1);
    const u64 c = s.count(a);
    for (u64 k = 1; k <= c; k += 1 + c / 20)
      ok &= s.select(a, k) == oracle::select(ref, a, k);
  }
  T_CHECK(ok);
  T_THROWS(s.rank(sigma, 0), std::invalid_argument);
}

void sequences_match_oracle() {
  std::mt19937_64 rng(19);
  for (u32 sigma : {1u, 2u, 5u, 64u, 300u}) {
    for (std::size_t n : {1u, 65u, 1000u, 4097u}) {
      const auto ref = testutil::random_seq(rng, n, sigma);
      const small_alphabet_seq sa(make_shared_seq(ref), sigma);
      check_seq_against_oracle(sa, ref, sigma, rng);
      const general_seq gs(make_shared_seq(ref), sigma);
      check_seq_against_oracle(gs, ref, sigma, rng);
    }
  }
}

void rmq_matches_scan() {
  std::mt19937_64 rng(23);
  // Exhaustive on a small array.
  {
    std::vector<u32> v(97);
    for (auto& x : v) x = rng() % 10;  // many ties
    const rmq_index mn(v, rmq_index::kind::min);
    const rmq_index mx(v, rmq_index::kind::max);
    bool ok = true;
    for (std::size_t l = 0; l < v.size(); ++l) {
      for (std::size_t r = l; r < v.size(); ++r) {
        std::size_t bmin = l, bmax = l;
        for (std::size_t i = l; i <= r; ++i) {
          if (v[i] < v[bmin]) bmin = i;
          if (v[i] > v[bmax]) bmax = i;
        }
        ok &= mn.query(l, r) == bmin;
        ok &= mx.query(l, r) == bmax;
      }
    }
    T_CHECK(ok);
  }
  // Random ranges across block boundaries on a larger array.
  {
    std::vector<u32> v(20000);
    for (auto& x : v) x = rng() % 1000;
    const rmq_index mn(v, rmq_index::kind::min);
    bool ok = true;
    for (int round = 0; round < 2000; ++round) {
      std::size_t l = rng() % v.size();
      std::size_t r = l + rng() % (v.size() - l);
      std::size_t best = l;
      for (std::size_t i = l; i <= r; ++i)
        if (v[i] < v[best]) best = i;
      ok &= mn.query(l, r) == best;
    }
    T_CHECK(ok);
  }
}

}  // namespace

int main() {
  bit_vector_matches_direct_counts();
  builder_matches_vector_ctor();
  packed_array_round_trips();
  chunk_counts_prefix_sums();
  alphabet_stats_buckets();
  sequences_match_oracle();
  rmq_matches_scan();
  return testutil::finish("test_bits");
}
