// Tests for the Burrows-Wheeler module: the suffix-array fallback, the
// slice padding, the incremental slice builder (checked step by step against
// a brute-force projection), and the public build entry point.

#include "textidx/bwt.hpp"

#include <cstdio>
#include <random>
#include <stdexcept>
#include <vector>

#include "test_util.hpp"
#include "textidx/oracle.hpp"

using namespace textidx;

namespace {

// Drives the slice builder over `text` with the given slice width and checks
// every intermediate merged list against the suffixes of the padded text:
// after step j the list must hold, in suffix order, the preceding symbols of
// exactly the suffixes whose start position has class <= j (the class of
// start k is delta - 1 - k mod delta).
void drive_and_check(const std::vector<u32>& text, u32 sigma, u64 delta) {
  const auto pt = pad_for_slices(text, sigma, delta);
  const auto& p = pt.text;
  const u64 np = p.size();
  const auto psa = oracle::suffix_array(p);
  const auto pbwt = oracle::bwt(p);
  auto upto = [&](u64 j) {
    std::vector<u32> want;
    for (u64 k = 0; k < np; ++k)
      if (delta - 1 - psa[k] % delta <= j) want.push_back(pbwt[k]);
    return want;
  };

  slice_bwt_builder sb(pt);
  T_CHECK(sb.slice_count() == np / delta);
  sb.run_steps01();
  T_CHECK(sb.current() == upto(1));
  for (u32 j = 2; j < delta; ++j) {
    sb.run_step(j);
    T_CHECK(sb.current() == upto(j));
  }
  T_CHECK(sb.size() == np);
  T_CHECK(sb.current() == pbwt);
}

void sa_basics() {
  {
    const std::vector<u32> t{1, 1, 0};
    const std::vector<u32> want{2, 1, 0};
    T_CHECK(linear_suffix_array(t) == want);
  }
  {
    const std::vector<u32> t{0};
    T_CHECK(linear_suffix_array(t) == std::vector<u32>{0});
  }
  {
    const auto t = testutil::txt("abracadabra$");
    const std::vector<u32> want{11, 10, 7, 0, 3, 5, 8, 1, 4, 6, 9, 2};
    T_CHECK(linear_suffix_array(t) == want);
    T_CHECK(linear_suffix_array(t) == oracle::suffix_array(t));
  }
}

void sa_random() {
  std::mt19937_64 rng(0xb3175a01);
  const struct { std::size_t n; u32 sigma; } shapes[] = {
      {2, 2}, {3, 2}, {10, 4}, {57, 3},       {100, 2},
      {777, 2}, {1000, 16}, {5000, 200}, {50000, 4},
  };
  for (const auto& sh : shapes) {
    const auto t = testutil::random_text(rng, sh.n, sh.sigma);
    T_CHECK(linear_suffix_array(t) == oracle::suffix_array(t));
  }
  for (u32 period : {1u, 2u, 3u, 7u}) {
    const auto t = testutil::periodic_text(1024, period);
    T_CHECK(linear_suffix_array(t) == oracle::suffix_array(t));
  }
  // Exhaustive over short ternary texts: every content string over {1, 2}.
  for (u32 len = 1; len <= 8; ++len) {
    for (u32 mask = 0; mask < (1u << (len - 1)); ++mask) {
      std::vector<u32> t(len);
      for (u32 i = 0; i + 1 < len; ++i) t[i] = 1 + (mask >> i & 1);
      t[len - 1] = 0;
      T_CHECK(linear_suffix_array(t) == oracle::suffix_array(t));
    }
  }
}

void sa_errors() {
  T_THROWS(linear_suffix_array({}), std::invalid_argument);
  T_THROWS(linear_suffix_array({1, 2}), std::invalid_argument);
  T_THROWS(linear_suffix_array({1, 0, 2, 0}), std::invalid_argument);
  T_THROWS(linear_suffix_array({0, 1}), std::invalid_argument);
}

void pad_structure() {
  for (std::size_t n : {2u, 3u, 7u, 12u, 40u}) {
    for (u64 delta : {2u, 3u, 5u}) {
      const auto t = testutil::periodic_text(n, 2);
      const auto pt = pad_for_slices(t, 3, delta);
      T_CHECK(pt.delta == delta);
      T_CHECK(pt.pad >= delta && pt.pad < 2 * delta);
      T_CHECK(pt.text.size() == n + pt.pad);
      T_CHECK(pt.text.size() % delta == 0);
      T_CHECK(pt.sigma == 3 + pt.pad);
      for (std::size_t i = 0; i < n; ++i)
        T_CHECK(pt.text[i] == t[i] + pt.pad);
      for (u64 x = 0; x < pt.pad; ++x)
        T_CHECK(pt.text[n + x] == pt.pad - 1 - x);
    }
  }
  T_THROWS(pad_for_slices(testutil::txt("ab$"), 3, 1), std::invalid_argument);
  T_THROWS(pad_for_slices({0}, 1, 2), std::invalid_argument);
  T_THROWS(pad_for_slices({1, 2}, 3, 2), std::invalid_argument);
}

void slice_small_texts() {
  for (u64 delta : {2u, 3u, 4u, 5u})
    drive_and_check(testutil::txt("abracadabra$"), 6, delta);
  // Period-matching-width shapes where a truncated or wrapped meta-symbol
  // comparison would misorder suffixes without the padding guarantees.
  for (u64 delta : {2u, 3u, 4u}) {
    drive_and_check(testutil::txt("ababab" "c$"), 4, delta);
    drive_and_check(testutil::txt("bacabac$"), 4, delta);
  }
  // Exhaustive short binary-content texts per width.
  for (u32 len = 2; len <= 7; ++len) {
    for (u32 mask = 0; mask < (1u << (len - 1)); ++mask) {
      std::vector<u32> t(len);
      for (u32 i = 0; i + 1 < len; ++i) t[i] = 1 + (mask >> i & 1);
      t[len - 1] = 0;
      for (u64 delta : {2u, 3u, 4u, 5u}) drive_and_check(t, 3, delta);
    }
  }
}

void slice_random_replay() {
  std::mt19937_64 rng(0x5eedb417);
  for (u32 sigma : {2u, 3u, 5u}) {
    for (int trial = 0; trial < 40; ++trial) {
      const std::size_t n =
          2 + static_cast<std::size_t>(rng() % 60);
      const u64 delta = 2 + rng() % 4;
      drive_and_check(testutil::random_text(rng, n, sigma), sigma, delta);
    }
  }
  drive_and_check(testutil::periodic_text(30, 1), 2, 3);   // unary content
  drive_and_check(testutil::periodic_text(64, 4), 5, 4);   // period == width
  drive_and_check(testutil::random_text(rng, 2, 2), 2, 5); // minimum text
}

void slice_step_order() {
  const auto pt = pad_for_slices(testutil::txt("abracadabra$"), 6, 3);
  slice_bwt_builder sb(pt);
  T_CHECK(sb.next_step() == 0);
  T_THROWS(sb.run_step(2), std::logic_error);
  sb.run_steps01();
  T_CHECK(sb.next_step() == 2);
  T_THROWS(sb.run_steps01(), std::logic_error);
  T_THROWS(sb.run_step(3), std::logic_error);

  // run_remaining picks up after manual steps and reports the tail.
  bwt_trace tr;
  const auto b = sb.run_remaining(&tr);
  T_CHECK(b == oracle::bwt(pt.text));
  T_CHECK(tr.steps.size() == 1);
  T_CHECK(tr.steps[0].step == 2);
  T_CHECK(tr.steps[0].batch == sb.slice_count());
  T_CHECK(tr.steps[0].seq_size == pt.text.size());

  // And from scratch it reports every step.
  slice_bwt_builder sb2(pt);
  bwt_trace tr2;
  T_CHECK(sb2.run_remaining(&tr2) == b);
  T_CHECK(tr2.steps.size() == 2);
  T_CHECK(tr2.steps[0].step == 1);
  T_CHECK(tr2.steps[0].batch == 2 * sb2.slice_count());
  T_CHECK(tr2.steps[0].seq_size == 2 * sb2.slice_count());
  T_CHECK(tr2.steps[1].step == 2);
}

void build_golden() {
  {
    const auto t = testutil::txt("abracadabra$");
    const std::vector<u32> want{1, 5, 4, 0, 5, 3, 1, 1, 1, 1, 2, 2};
    T_CHECK(build_bwt(t, 6) == want);
    T_CHECK(oracle::bwt(t) == want);
  }
  {
    const auto t = testutil::txt("banana$");
    const std::vector<u32> want{1, 3, 3, 2, 0, 1, 1};
    T_CHECK(build_bwt(t, 4) == want);
  }
  T_CHECK(build_bwt({0}, 1) == std::vector<u32>{0});
  T_CHECK(build_bwt({1, 0}, 2) == (std::vector<u32>{1, 0}));
}

void build_random() {
  std::mt19937_64 rng(0xb3a7c0de);
  const struct { std::size_t n; u32 sigma; bool sliced; } shapes[] = {
      {15, 2, false},     // one below the width-4 threshold
      {16, 2, true},      // exactly at it
      {100, 2, true},     {1000, 2, true},  {4096, 2, true},
      {100000, 2, true},  // wide grams force the multi-pass meta sort
      {255, 4, false},    {256, 4, true},   {2000, 4, true},
      {70000, 16, true},  {500, 64, false}, {5000, 64, false},
  };
  for (const auto& sh : shapes) {
    const auto t = testutil::random_text(rng, sh.n, sh.sigma);
    bwt_trace tr;
    const auto b = build_bwt(t, sh.sigma, &tr);
    T_CHECK(b == oracle::bwt(t));
    T_CHECK(tr.sliced == sh.sliced);
    if (!sh.sliced) {
      T_CHECK(tr.steps.empty());
      continue;
    }
    T_CHECK(tr.delta >= 4);
    T_CHECK(tr.pad >= tr.delta && tr.pad < 2 * tr.delta);
    T_CHECK(tr.padded_n == sh.n + tr.pad);
    T_CHECK(tr.padded_n % tr.delta == 0);
    T_CHECK(tr.padded_sigma == sh.sigma + tr.pad);
    T_CHECK(tr.steps.size() == tr.delta - 1);
    const u64 m = tr.padded_n / tr.delta;
    T_CHECK(tr.steps[0].step == 1);
    T_CHECK(tr.steps[0].batch == 2 * m);
    T_CHECK(tr.steps[0].seq_size == 2 * m);
    for (u64 s = 1; s < tr.steps.size(); ++s) {
      T_CHECK(tr.steps[s].step == s + 1);
      T_CHECK(tr.steps[s].batch == m);
      T_CHECK(tr.steps[s].seq_size == (s + 2) * m);
    }
    T_CHECK(tr.steps.back().seq_size == tr.padded_n);
  }
  {
    const auto t = testutil::periodic_text(2000, 3);
    T_CHECK(build_bwt(t, 4) == oracle::bwt(t));
  }
  {
    const auto t = testutil::periodic_text(3000, 1);  // unary content
    bwt_trace tr;
    T_CHECK(build_bwt(t, 2, &tr) == oracle::bwt(t));
    T_CHECK(tr.sliced);
  }
}

void build_errors() {
  T_THROWS(build_bwt({}, 2), std::invalid_argument);
  T_THROWS(build_bwt({1, 2}, 3), std::invalid_argument);     // no sentinel
  T_THROWS(build_bwt({1, 0, 2, 0}, 3), std::invalid_argument);
  T_THROWS(build_bwt({5, 0}, 4), std::invalid_argument);     // symbol >= sigma
  T_THROWS(build_bwt({1, 0}, 0), std::invalid_argument);
}

}  // namespace

int main() {
  sa_basics();
  sa_random();
  sa_errors();
  pad_structure();
  slice_small_texts();
  slice_random_replay();
  slice_step_order();
  build_golden();
  build_random();
  build_errors();
  return testutil::finish("test_bwt");
}
