// Tests for the permuted LCP module: anchor spacing arithmetic, the psi/lf
// row maps, single contraction and extension steps against brute-force
// interval pairs, full builds against the oracle across golden, random,
// periodic, and exhaustively enumerated tiny texts, pooled-vs-direct
// equivalence under forced pool capacities, scheduler statistics, and the
// 2n-bit serialized form.

#include "textidx/plcp.hpp"

#include <algorithm>
#include <cstdio>
#include <random>
#include <stdexcept>
#include <vector>

#include "test_util.hpp"
#include "textidx/oracle.hpp"
#include "textidx/topology.hpp"

using namespace textidx;

namespace {

suffix_topology make_topo(const std::vector<u32>& text) {
  const u32 sigma = *std::max_element(text.begin(), text.end()) + 1;
  return suffix_topology(make_shared_seq(oracle::bwt(text)), sigma);
}

std::vector<u32> reverse_text(const std::vector<u32>& text) {
  std::vector<u32> r(text.begin(), text.end() - 1);
  std::reverse(r.begin(), r.end());
  r.push_back(0);
  return r;
}

// Inclusive row range of suffixes starting with p, {-1, -1} when absent.
std::pair<i64, i64> pattern_rows(const std::vector<u32>& txt,
                                 const std::vector<u32>& s, const u32* p,
                                 u64 len) {
  i64 lo = -1, hi = -1;
  for (u64 row = 0; row < s.size(); ++row) {
    if (s[row] + len > txt.size()) continue;
    bool ok = true;
    for (u64 k = 0; ok && k < len; ++k) ok = txt[s[row] + k] == p[k];
    if (!ok) continue;
    if (lo < 0) lo = static_cast<i64>(row);
    hi = static_cast<i64>(row);
  }
  return {lo, hi};
}

interval_pair state_for(const std::vector<u32>& text,
                        const std::vector<u32>& rtext,
                        const std::vector<u32>& sa,
                        const std::vector<u32>& rsa, const u32* pat, u64 len) {
  if (len == 0)
    return {0, text.size() - 1, 0, rtext.size() - 1};
  std::vector<u32> rev(pat, pat + len);
  std::reverse(rev.begin(), rev.end());
  const auto f = pattern_rows(text, sa, pat, len);
  const auto r = pattern_rows(rtext, rsa, rev.data(), len);
  T_CHECK(f.first >= 0 && r.first >= 0);
  return {static_cast<u64>(f.first), static_cast<u64>(f.second),
          static_cast<u64>(r.first), static_cast<u64>(r.second)};
}

bool same_pair(const interval_pair& a, const interval_pair& b) {
  return a.fl == b.fl && a.fr == b.fr && a.rl == b.rl && a.rr == b.rr;
}

void spacing_values() {
  T_EQ(plcp_anchor_spacing(1, 5), u64{1});
  T_EQ(plcp_anchor_spacing(2, 2), u64{1});
  T_EQ(plcp_anchor_spacing(3, 2), u64{1});
  T_EQ(plcp_anchor_spacing(1000, 2), u64{9});    // floor(log2 1000) * 1
  T_EQ(plcp_anchor_spacing(1000, 16), u64{4});   // floor(log16 1000) * 2
  T_EQ(plcp_anchor_spacing(100000, 64), u64{6}); // floor(log64 1e5) * 3
  T_EQ(plcp_anchor_spacing(4, 1000), u64{4});    // 1 * ceil(log2 10)
}

void psi_lf_golden() {
  const auto text = testutil::txt("abracadabra$");
  const auto rtext = reverse_text(text);
  const suffix_topology topo = make_topo(text);
  const suffix_topology rtopo = make_topo(rtext);
  const plcp_builder b(text, topo, rtopo);
  const auto sa = oracle::suffix_array(text);
  const u64 n = text.size();
  std::vector<u64> isa(n);
  for (u64 r = 0; r < n; ++r) isa[sa[r]] = r;
  for (u64 i = 0; i + 1 < n; ++i) {
    T_EQ(b.psi(isa[i], text[i]), isa[i + 1]);
    T_EQ(b.lf(isa[i + 1]), isa[i]);
  }
  // Both maps wrap around at the text ends.
  T_EQ(b.psi(isa[n - 1], 0), isa[0]);
  T_EQ(b.lf(isa[0]), isa[n - 1]);
}

void contract_golden() {
  const auto text = testutil::txt("abracadabra$");
  const auto rtext = reverse_text(text);
  const suffix_topology topo = make_topo(text);
  const suffix_topology rtopo = make_topo(rtext);
  const plcp_builder b(text, topo, rtopo);
  const auto sa = oracle::suffix_array(text);
  const auto rsa = oracle::suffix_array(rtext);

  // "bra" -> "ra": rows of "ra" are the last two, reverse side is "ar".
  const u32 bra[] = {2, 5, 1};
  const interval_pair s_bra = state_for(text, rtext, sa, rsa, bra, 3);
  const interval_pair got_ra = b.contract_left(s_bra, 3, 2);
  T_CHECK(got_ra.fl == 10 && got_ra.fr == 11);
  T_CHECK(same_pair(got_ra, state_for(text, rtext, sa, rsa, bra + 1, 2)));

  // "abra" -> "bra": rows 6..7.
  const u32 abra[] = {1, 2, 5, 1};
  const interval_pair s_abra = state_for(text, rtext, sa, rsa, abra, 4);
  const interval_pair got_bra = b.contract_left(s_abra, 4, 1);
  T_CHECK(got_bra.fl == 6 && got_bra.fr == 7);
  T_CHECK(same_pair(got_bra, s_bra));

  // Length <= 1 collapses to the empty factor.
  const u32 a[] = {1};
  const interval_pair s_a = state_for(text, rtext, sa, rsa, a, 1);
  const interval_pair full{0, 11, 0, 11};
  T_CHECK(same_pair(b.contract_left(s_a, 1, 1), full));
  T_CHECK(same_pair(b.contract_left(full, 0, 3), full));
}

// Right-maximal factors arise as the longest common prefix of two suffixes;
// contracting their first symbol must land on the brute-force pair of the
// remainder.
void contract_random_text(const std::vector<u32>& text, std::mt19937_64& rng,
                          u64 trials) {
  const auto rtext = reverse_text(text);
  const suffix_topology topo = make_topo(text);
  const suffix_topology rtopo = make_topo(rtext);
  const plcp_builder b(text, topo, rtopo);
  const auto sa = oracle::suffix_array(text);
  const auto rsa = oracle::suffix_array(rtext);
  const u64 n = text.size();
  for (u64 t = 0; t < trials; ++t) {
    const u64 p = rng() % n;
    const u64 q = rng() % n;
    if (p == q) continue;
    const u64 len = oracle::lcp_of_suffixes(text, p, q);
    if (len < 2) continue;
    const interval_pair s = state_for(text, rtext, sa, rsa, text.data() + p, len);
    const interval_pair got = b.contract_left(s, len, text[p]);
    const interval_pair want =
        state_for(text, rtext, sa, rsa, text.data() + p + 1, len - 1);
    T_CHECK(same_pair(got, want));
  }
}

void contract_random() {
  std::mt19937_64 rng(0x9e3779b97f4a7c15ull);
  contract_random_text(testutil::txt("abracadabra$"), rng, 120);
  contract_random_text(testutil::txt("mississippi$"), rng, 120);
  contract_random_text(testutil::random_text(rng, 200, 3), rng, 200);
  contract_random_text(testutil::random_text(rng, 300, 4), rng, 200);
  contract_random_text(testutil::random_text(rng, 150, 26), rng, 200);
  contract_random_text(testutil::periodic_text(120, 3), rng, 200);
  contract_random_text(testutil::periodic_text(90, 1), rng, 120);
}

void extend_golden() {
  const auto text = testutil::txt("abracadabra$");
  const auto rtext = reverse_text(text);
  const suffix_topology topo = make_topo(text);
  const suffix_topology rtopo = make_topo(rtext);
  const plcp_builder b(text, topo, rtopo);
  const auto sa = oracle::suffix_array(text);
  const auto rsa = oracle::suffix_array(rtext);

  // Empty factor + 'a': all rows starting with 'a'.
  interval_pair st{0, 11, 0, 11};
  T_CHECK(b.extend_right(st, 1));
  T_CHECK(st.fl == 1 && st.fr == 5);
  const u32 a[] = {1};
  T_CHECK(same_pair(st, state_for(text, rtext, sa, rsa, a, 1)));

  // "abra" + 'c' shrinks to the single "abrac..." row.
  const u32 abra[] = {1, 2, 5, 1};
  interval_pair s_abra = state_for(text, rtext, sa, rsa, abra, 4);
  T_CHECK(b.extend_right(s_abra, 3));
  T_CHECK(s_abra.fl == s_abra.fr);
  const u32 abrac[] = {1, 2, 5, 1, 3};
  T_CHECK(same_pair(s_abra, state_for(text, rtext, sa, rsa, abrac, 5)));

  // "abra" + 'b' does not occur: reports false, state untouched.
  interval_pair s2 = state_for(text, rtext, sa, rsa, abra, 4);
  const interval_pair before = s2;
  T_CHECK(!b.extend_right(s2, 2));
  T_CHECK(same_pair(s2, before));
}

void extend_random_text(const std::vector<u32>& text, std::mt19937_64& rng,
                        u64 trials) {
  const auto rtext = reverse_text(text);
  const suffix_topology topo = make_topo(text);
  const suffix_topology rtopo = make_topo(rtext);
  const plcp_builder b(text, topo, rtopo);
  const auto sa = oracle::suffix_array(text);
  const auto rsa = oracle::suffix_array(rtext);
  const u32 sigma = *std::max_element(text.begin(), text.end()) + 1;
  const u64 n = text.size();
  for (u64 t = 0; t < trials; ++t) {
    const u64 p = rng() % (n - 1);
    const u64 maxlen = (n - 1) - p;
    const u64 j = rng() % maxlen;  // factor T[p..p+j), next symbol is content
    interval_pair st = state_for(text, rtext, sa, rsa, text.data() + p, j);
    const interval_pair at_j = st;
    // The true next symbol always extends.
    T_CHECK(b.extend_right(st, text[p + j]));
    const interval_pair want =
        state_for(text, rtext, sa, rsa, text.data() + p, j + 1);
    T_CHECK(same_pair(st, want));
    // A symbol whose extension is absent reports false and leaves the state.
    for (u32 c = 1; c < sigma; ++c) {
      std::vector<u32> probe(text.data() + p, text.data() + p + j);
      probe.push_back(c);
      if (pattern_rows(text, sa, probe.data(), j + 1).first >= 0) continue;
      interval_pair miss = at_j;
      T_CHECK(!b.extend_right(miss, c));
      T_CHECK(same_pair(miss, at_j));
      break;
    }
  }
}

void extend_random() {
  std::mt19937_64 rng(0x8ae4b1c2d3f05968ull);
  extend_random_text(testutil::txt("abracadabra$"), rng, 120);
  extend_random_text(testutil::random_text(rng, 200, 3), rng, 200);
  extend_random_text(testutil::random_text(rng, 200, 26), rng, 200);
  extend_random_text(testutil::periodic_text(100, 4), rng, 150);
}

// Full build against the oracle plus the scheduler/pool bookkeeping
// guarantees the structure advertises.
void check_build(const std::vector<u32>& text, u64 cap = 0) {
  const auto rtext = reverse_text(text);
  const suffix_topology topo = make_topo(text);
  const suffix_topology rtopo = make_topo(rtext);
  plcp_builder b(text, topo, rtopo, cap);
  plcp_stats st;
  const std::vector<u32> got = b.run(&st);
  T_EQ(got, oracle::plcp(text));
  const u64 n = text.size();
  T_EQ(st.spacing, b.spacing());
  T_EQ(st.capacity, b.capacity());
  T_EQ(st.anchors + st.stage2_values + st.stage3_values, n);
  T_EQ(st.undersized_flushes, u64{0});
  if (b.capacity() >= 2) T_EQ(st.singleton_flushes, u64{0});
  T_CHECK(st.pool_peak <= b.capacity());
  T_CHECK(st.live_peak <= n / b.spacing() + 2);
  const u64 lg = std::max<u32>(floor_log2(std::max<u64>(n, 2)), 1);
  T_CHECK(st.stage3_values * lg <= 2 * n);
  for (u64 i = 0; i + 1 < n; ++i)
    T_CHECK(got[i] <= got[i + 1] + 1);
}

void build_golden() {
  const auto text = testutil::txt("abracadabra$");
  const auto rtext = reverse_text(text);
  const suffix_topology topo = make_topo(text);
  const suffix_topology rtopo = make_topo(rtext);
  const std::vector<u32> got = build_plcp(text, topo, rtopo);
  T_EQ(got, oracle::plcp(text));
  T_EQ(got[0], u32{4});  // "abra" is shared with the preceding "abra$..."

  check_build(testutil::txt("$"));
  check_build(testutil::txt("a$"));
  check_build(testutil::txt("ab$"));
  check_build(testutil::txt("aa$"));
  check_build(testutil::txt("banana$"));
  check_build(testutil::txt("mississippi$"));
  check_build(testutil::periodic_text(400, 1));
}

void build_random() {
  std::mt19937_64 rng(0x243f6a8885a308d3ull);
  const u32 sigmas[] = {2, 3, 4, 16, 26};
  const u64 sizes[] = {50, 300, 1000, 3000};
  for (u64 n : sizes)
    for (u32 s : sigmas) check_build(testutil::random_text(rng, n, s));
  check_build(testutil::periodic_text(2000, 3));
  check_build(testutil::periodic_text(1024, 1));
  check_build(testutil::periodic_text(3000, 7));
  check_build(testutil::random_text(rng, 20000, 2));
  check_build(testutil::random_text(rng, 20000, 16));
}

void build_tiny_exhaustive() {
  // Every binary-content text up to n = 9 and ternary up to n = 6; covers
  // the degenerate spacings, skipped scheduler, and capacity-1 pools.
  for (u64 n = 2; n <= 9; ++n) {
    const u64 m = n - 1;
    for (u64 mask = 0; mask < (u64{1} << m); ++mask) {
      std::vector<u32> text(n);
      for (u64 i = 0; i < m; ++i) text[i] = 1 + ((mask >> i) & 1);
      text[n - 1] = 0;
      check_build(text);
    }
  }
  for (u64 n = 2; n <= 6; ++n) {
    const u64 m = n - 1;
    u64 count = 1;
    for (u64 i = 0; i < m; ++i) count *= 3;
    for (u64 code = 0; code < count; ++code) {
      std::vector<u32> text(n);
      u64 c = code;
      for (u64 i = 0; i < m; ++i) {
        text[i] = 1 + static_cast<u32>(c % 3);
        c /= 3;
      }
      text[n - 1] = 0;
      check_build(text);
    }
  }
}

void capacity_override() {
  // Forcing tiny pool capacities reroutes almost every step through the
  // batched path in minimal flushes; results must not move.
  std::mt19937_64 rng(0x452821e638d01377ull);
  const auto t1 = testutil::random_text(rng, 1500, 4);
  check_build(t1, 1);
  check_build(t1, 2);
  check_build(t1, 7);
  const auto t2 = testutil::periodic_text(1200, 5);
  check_build(t2, 1);
  check_build(t2, 3);
}

void bits_roundtrip() {
  std::mt19937_64 rng(0xb5470917929fcbe2ull);
  const auto p1 = oracle::plcp(testutil::txt("abracadabra$"));
  const plcp_bits pb1(p1);
  T_EQ(pb1.size(), u64{12});
  T_EQ(pb1.get(0), u32{4});
  T_EQ(pb1.decode(), p1);
  T_CHECK(pb1.size_bits() <= 2 * 12 - 1);

  const auto text = testutil::random_text(rng, 1000, 4);
  const auto p2 = oracle::plcp(text);
  const plcp_bits pb2(p2);
  T_EQ(pb2.decode(), p2);
  T_CHECK(pb2.size_bits() <= 2 * 1000 - 1);
  for (u64 t = 0; t < 50; ++t) {
    const u64 i = rng() % 1000;
    T_EQ(pb2.get(i), p2[i]);
  }

  const plcp_bits single(std::vector<u32>{0});
  T_EQ(single.size_bits(), u64{1});
  T_EQ(single.get(0), u32{0});

  const plcp_bits empty(std::vector<u32>{});
  T_EQ(empty.size(), u64{0});
  T_EQ(empty.decode(), std::vector<u32>{});

  // Values may drop by at most 1 from one position to the next.
  T_THROWS(plcp_bits(std::vector<u32>{3, 1}), std::invalid_argument);
}

void error_contracts() {
  const auto text = testutil::txt("abracadabra$");
  const auto rtext = reverse_text(text);
  const suffix_topology topo = make_topo(text);
  const suffix_topology rtopo = make_topo(rtext);
  const plcp_builder b(text, topo, rtopo);
  const auto sa = oracle::suffix_array(text);
  const auto rsa = oracle::suffix_array(rtext);

  T_THROWS(b.psi(0, 1), std::invalid_argument);   // row 0 is in bucket 0
  T_THROWS(b.psi(5, 9), std::invalid_argument);   // symbol out of range
  T_THROWS(b.lf(12), std::invalid_argument);

  interval_pair full{0, 11, 0, 11};
  T_THROWS(b.extend_right(full, 0), std::invalid_argument);  // sentinel
  T_THROWS(b.extend_right(full, 6), std::invalid_argument);  // >= sigma

  // Contraction symbol must own the bucket containing the interval.
  const u32 ab[] = {1, 2};
  const interval_pair s_ab = state_for(text, rtext, sa, rsa, ab, 2);
  T_THROWS(b.contract_left(s_ab, 2, 2), std::invalid_argument);
  // A singleton interval cannot be a repeated factor.
  const u32 abrac[] = {1, 2, 5, 1, 3};
  const interval_pair s1 = state_for(text, rtext, sa, rsa, abrac, 5);
  T_THROWS(b.contract_left(s1, 5, 1), std::invalid_argument);

  // Builder input checks: sentinel and matching topologies.
  const auto small = testutil::txt("ab$");
  const suffix_topology small_topo = make_topo(small);
  const std::vector<u32> no_sentinel{1, 2, 1};
  T_THROWS(plcp_builder(no_sentinel, small_topo, small_topo),
           std::invalid_argument);
  T_THROWS(plcp_builder(text, topo, small_topo), std::invalid_argument);
}

}  // namespace

int main() {
  spacing_values();
  psi_lf_golden();
  contract_golden();
  contract_random();
  extend_golden();
  extend_random();
  build_golden();
  build_random();
  build_tiny_exhaustive();
  capacity_override();
  bits_roundtrip();
  error_contracts();
  return testutil::finish("test_plcp");
}
