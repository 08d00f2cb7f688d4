#pragma once
// Brute-force reference implementations used as ground truth by the tests.
// Deliberately simple, definition-shaped code; do not use at scale.

#include <cstddef>
#include <string>
#include <vector>

#include "textidx/common.hpp"

namespace textidx::oracle {

// Suffix array by comparison sort. Text must end with a unique sentinel 0.
std::vector<u32> suffix_array(const std::vector<u32>& text);

// Burrows-Wheeler transform via the suffix array: bwt[i] = text before
// suffix sa[i] (cyclically).
std::vector<u32> bwt(const std::vector<u32>& text);

// Inclusive rank: occurrences of a in seq[0..i]. rank(seq, a, -1) = 0.
u64 rank(const std::vector<u32>& seq, u32 a, i64 i);

// Position of the k-th occurrence of a (k >= 1); requires k <= total count.
std::size_t select(const std::vector<u32>& seq, u32 a, u64 k);

// Inclusive rank of seq[i] among its own symbol: rank(seq, seq[i], i).
u64 partial_rank(const std::vector<u32>& seq, std::size_t i);

// partial_rank for every position, one O(n + sigma) pass (bulk form for
// acceptance sweeps).
std::vector<u64> partial_rank_all(const std::vector<u32>& seq);

// Inclusive rank for many (symbol, position) queries by one counting sweep
// over seq (bulk form for large oracle comparisons). sigma is the declared
// alphabet size; symbols >= sigma and positions >= |seq| yield -1, matching
// the batch structures' error marker.
std::vector<i64> rank_bulk(const std::vector<u32>& seq, u32 sigma,
                           const std::vector<std::pair<u32, u64>>& queries);

// Reference batched insertion. inserts[k] = (pos, symbol) where pos is the
// FINAL position in the spliced result; positions must be strictly
// increasing and land inside the result sequence.
std::vector<u32> splice_insert(
    const std::vector<u32>& base,
    const std::vector<std::pair<u64, u32>>& inserts);

// Permuted LCP array: plcp[i] = length of the longest common prefix between
// suffix i and the suffix lexicographically preceding it (0 for the smallest
// suffix). Position-order scan reusing the classical overlap property; agrees
// with the pure per-position definition (cross-checked in tests).
std::vector<u32> plcp(const std::vector<u32>& text);

// Longest common prefix length of suffixes i and j by direct comparison.
u64 lcp_of_suffixes(const std::vector<u32>& text, std::size_t i, std::size_t j);

// Balanced-parentheses encoding of the suffix tree of text, children in
// increasing symbol order, via recursive grouping of suffixes.
std::string suffix_tree_bp(const std::vector<u32>& text);

// All starting positions of pattern in text, ascending.
std::vector<std::size_t> occurrences(const std::vector<u32>& text,
                                     const std::vector<u32>& pattern);

struct distinct_entry {
  u32 symbol;
  std::size_t leftmost;   // first position of symbol in [i, j]
  std::size_t rightmost;  // last position of symbol in [i, j]
  u64 freq;               // occurrences of symbol in [i, j]
  u64 before;             // occurrences of symbol in [0, i)
};

// Distinct symbols of seq[i..j] with leftmost/rightmost positions, in-range
// frequency and before-range count, sorted by symbol.
std::vector<distinct_entry> range_distinct(const std::vector<u32>& seq,
                                           std::size_t i, std::size_t j);

}  // namespace textidx::oracle
