#include "textidx/oracle.hpp"

#include <algorithm>
#include <cstring>
#include <map>
#include <numeric>

namespace textidx::oracle {

std::vector<u32> suffix_array(const std::vector<u32>& text) {
  const u32 sigma = validate_text(text);
  const std::size_t n = text.size();
  std::vector<u32> sa(n);
  std::iota(sa.begin(), sa.end(), 0u);
  if (sigma <= 256) {
    // Byte fast path: with a unique sentinel no suffix is a prefix of
    // another, so memcmp over min length always decides.
    std::vector<unsigned char> bytes(n);
    for (std::size_t i = 0; i < n; ++i) bytes[i] = static_cast<unsigned char>(text[i]);
    const unsigned char* p = bytes.data();
    std::sort(sa.begin(), sa.end(), [&](u32 x, u32 y) {
      if (x == y) return false;
      const std::size_t len = n - std::max(x, y);
      const int c = std::memcmp(p + x, p + y, len);
      if (c != 0) return c < 0;
      return x > y;  // unreachable with a unique sentinel; kept for safety
    });
  } else {
    const u32* p = text.data();
    std::sort(sa.begin(), sa.end(), [&](u32 x, u32 y) {
      if (x == y) return false;
      const std::size_t len = n - std::max(x, y);
      std::size_t k = 0;
      while (k < len && p[x + k] == p[y + k]) ++k;
      if (k < len) return p[x + k] < p[y + k];
      return x > y;  // unreachable with a unique sentinel; kept for safety
    });
  }
  return sa;
}

std::vector<u32> bwt(const std::vector<u32>& text) {
  const std::vector<u32> sa = suffix_array(text);
  const std::size_t n = text.size();
  std::vector<u32> out(n);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = sa[i] == 0 ? text[n - 1] : text[sa[i] - 1];
  return out;
}

u64 rank(const std::vector<u32>& seq, u32 a, i64 i) {
  TI_REQUIRE(i >= -1 && i < static_cast<i64>(seq.size()), "rank position out of range");
  u64 r = 0;
  for (i64 k = 0; k <= i; ++k)
    if (seq[k] == a) ++r;
  return r;
}

std::size_t select(const std::vector<u32>& seq, u32 a, u64 k) {
  TI_REQUIRE(k >= 1, "select is 1-based");
  u64 seen = 0;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (seq[i] == a && ++seen == k) return i;
  }
  check_failed("input", __FILE__, __LINE__, "select: fewer than k occurrences");
}

u64 partial_rank(const std::vector<u32>& seq, std::size_t i) {
  TI_REQUIRE(i < seq.size(), "partial_rank position out of range");
  return rank(seq, seq[i], static_cast<i64>(i));
}

std::vector<u64> partial_rank_all(const std::vector<u32>& seq) {
  std::vector<u64> counts(sigma_of(seq), 0);
  std::vector<u64> out(seq.size());
  for (std::size_t i = 0; i < seq.size(); ++i) out[i] = ++counts[seq[i]];
  return out;
}

std::vector<i64> rank_bulk(const std::vector<u32>& seq, u32 sigma,
                           const std::vector<std::pair<u32, u64>>& queries) {
  std::vector<i64> out(queries.size(), -1);
  // Visit queries in position order while sweeping the sequence once.
  std::vector<u32> order(queries.size());
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(), [&](u32 x, u32 y) {
    return queries[x].second < queries[y].second;
  });
  std::vector<u64> counts(std::max(sigma, sigma_of(seq)), 0);
  std::size_t k = 0;
  for (std::size_t i = 0; i < seq.size() && k < order.size(); ++i) {
    ++counts[seq[i]];
    while (k < order.size() && queries[order[k]].second == i) {
      const auto& q = queries[order[k]];
      if (q.first < sigma) out[order[k]] = static_cast<i64>(counts[q.first]);
      ++k;
    }
  }
  return out;
}

std::vector<u32> splice_insert(
    const std::vector<u32>& base,
    const std::vector<std::pair<u64, u32>>& inserts) {
  const std::size_t n = base.size() + inserts.size();
  std::vector<u32> out;
  out.reserve(n);
  std::size_t k = 0;
  std::size_t bi = 0;
  for (std::size_t p = 0; p < n; ++p) {
    if (k < inserts.size() && inserts[k].first == p) {
      TI_REQUIRE(k == 0 || inserts[k].first > inserts[k - 1].first,
                 "splice_insert: positions must be strictly increasing");
      out.push_back(inserts[k].second);
      ++k;
    } else {
      TI_REQUIRE(bi < base.size(), "splice_insert: position out of range");
      out.push_back(base[bi++]);
    }
  }
  TI_REQUIRE(k == inserts.size(), "splice_insert: position out of range");
  return out;
}

u64 lcp_of_suffixes(const std::vector<u32>& text, std::size_t i, std::size_t j) {
  TI_REQUIRE(i < text.size() && j < text.size(), "suffix index out of range");
  const std::size_t n = text.size();
  u64 l = 0;
  while (i + l < n && j + l < n && text[i + l] == text[j + l]) ++l;
  return l;
}

std::vector<u32> plcp(const std::vector<u32>& text) {
  const std::vector<u32> sa = suffix_array(text);
  const std::size_t n = text.size();
  std::vector<u32> isa(n);
  for (std::size_t r = 0; r < n; ++r) isa[sa[r]] = static_cast<u32>(r);
  std::vector<u32> out(n, 0);
  // plcp[i+1] >= plcp[i] - 1, so carrying the overlap keeps the total
  // comparison work linear while matching the per-position definition.
  std::size_t h = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const u32 r = isa[i];
    if (r == 0) {
      h = 0;
      out[i] = 0;
      continue;
    }
    const std::size_t j = sa[r - 1];
    while (i + h < n && j + h < n && text[i + h] == text[j + h]) ++h;
    out[i] = static_cast<u32>(h);
    if (h > 0) --h;
  }
  return out;
}

namespace {

void bp_rec(const std::vector<u32>& text, const std::vector<u32>& suffixes,
            std::size_t base_depth, bool is_root, std::string& out) {
  const std::size_t n = text.size();
  if (!is_root && suffixes.size() == 1) {
    out += "()";
    return;
  }
  // Extend the common prefix of the group starting from the parent's depth.
  std::size_t d = base_depth;
  if (!is_root) {
    for (;;) {
      const std::size_t first = suffixes[0] + d;
      if (first >= n) break;
      const u32 c = text[first];
      bool all_equal = true;
      for (u32 s : suffixes) {
        if (s + d >= n || text[s + d] != c) {
          all_equal = false;
          break;
        }
      }
      if (!all_equal) break;
      ++d;
    }
  }
  // Partition by the symbol right after the common prefix. With a unique
  // sentinel no suffix in a group of size >= 2 can end at depth d.
  std::map<u32, std::vector<u32>> children;
  for (u32 s : suffixes) {
    TI_CHECK(s + d < n, "suffix tree grouping ran past a suffix end");
    children[text[s + d]].push_back(s);
  }
  out += '(';
  for (auto& [sym, group] : children) {
    (void)sym;
    bp_rec(text, group, d, false, out);
  }
  out += ')';
}

}  // namespace

std::string suffix_tree_bp(const std::vector<u32>& text) {
  validate_text(text);
  std::vector<u32> all(text.size());
  std::iota(all.begin(), all.end(), 0u);
  std::string out;
  bp_rec(text, all, 0, true, out);
  return out;
}

std::vector<std::size_t> occurrences(const std::vector<u32>& text,
                                     const std::vector<u32>& pattern) {
  std::vector<std::size_t> out;
  if (pattern.empty() || pattern.size() > text.size()) return out;
  const std::size_t m = pattern.size();
  for (std::size_t p = 0; p + m <= text.size(); ++p) {
    if (std::equal(pattern.begin(), pattern.end(), text.begin() + p))
      out.push_back(p);
  }
  return out;
}

std::vector<distinct_entry> range_distinct(const std::vector<u32>& seq,
                                           std::size_t i, std::size_t j) {
  TI_REQUIRE(i <= j && j < seq.size(), "range_distinct interval out of range");
  std::map<u32, distinct_entry> found;
  for (std::size_t p = i; p <= j; ++p) {
    const u32 c = seq[p];
    auto it = found.find(c);
    if (it == found.end()) {
      found.emplace(c, distinct_entry{c, p, p, 1, 0});
    } else {
      it->second.rightmost = p;
      ++it->second.freq;
    }
  }
  for (std::size_t p = 0; p < i; ++p) {
    auto it = found.find(seq[p]);
    if (it != found.end()) ++it->second.before;
  }
  std::vector<distinct_entry> out;
  out.reserve(found.size());
  for (auto& [sym, e] : found) {
    (void)sym;
    out.push_back(e);
  }
  return out;
}

}  // namespace textidx::oracle
