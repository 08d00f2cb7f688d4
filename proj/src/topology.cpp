#include "textidx/topology.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <limits>
#include <memory>

namespace textidx {

namespace {

// Per-byte excess tables, LSB-first to match the bit_vector word layout.
struct excess_tables {
  std::array<signed char, 256> total{};
  std::array<signed char, 256> min_prefix{};  // min excess after 1..8 bits
};

constexpr excess_tables make_excess_tables() {
  excess_tables t{};
  for (u32 b = 0; b < 256; ++b) {
    int e = 0;
    int mn = 8;
    for (u32 k = 0; k < 8; ++k) {
      e += ((b >> k) & 1) ? 1 : -1;
      mn = e < mn ? e : mn;
    }
    t.total[b] = static_cast<signed char>(e);
    t.min_prefix[b] = static_cast<signed char>(mn);
  }
  return t;
}

constexpr excess_tables k_exc = make_excess_tables();

// First position in [from, end) whose consuming step brings the running
// excess (entering value e) to target, else -1; e is left at the excess
// after the scanned prefix. The byte fast path relies on excess moving in
// unit steps: a byte whose minimum prefix excess stays above target cannot
// contain a hit.
i64 scan_excess_fwd(const bit_vector& bv, u64 from, u64 end, i64& e,
                    i64 target) {
  const std::vector<u64>& w = bv.words();
  u64 i = from;
  for (; i < end && (i & 7) != 0; ++i) {
    e += bv.get(i) ? 1 : -1;
    if (e == target) return static_cast<i64>(i);
  }
  for (; i + 8 <= end; i += 8) {
    const u32 b = static_cast<u32>((w[i >> 6] >> (i & 63)) & 0xFF);
    if (e + k_exc.min_prefix[b] <= target) {
      for (u64 k = 0; k < 8; ++k) {
        e += ((b >> k) & 1) ? 1 : -1;
        if (e == target) return static_cast<i64>(i + k);
      }
      TI_CHECK(false, "bp_tree: forward excess search lost its crossing");
    }
    e += k_exc.total[b];
  }
  for (; i < end; ++i) {
    e += bv.get(i) ? 1 : -1;
    if (e == target) return static_cast<i64>(i);
  }
  return -1;
}

// Last position in [from, end) whose consuming step brings the running
// excess (entering value e at from) to target, else -1.
i64 scan_excess_last(const bit_vector& bv, u64 from, u64 end, i64 e,
                     i64 target) {
  i64 best = -1;
  for (u64 i = from; i < end; ++i) {
    e += bv.get(i) ? 1 : -1;
    if (e == target) best = static_cast<i64>(i);
  }
  return best;
}

// Leftmost block in [lo, hi] whose minimum is <= t, else -1.
i64 first_block_le(const rmq_index& rmq, u64 lo, u64 hi, u32 t) {
  if (lo > hi || rmq.value(rmq.query(lo, hi)) > t) return -1;
  while (lo < hi) {
    const u64 mid = lo + (hi - lo) / 2;
    if (rmq.value(rmq.query(lo, mid)) <= t)
      hi = mid;
    else
      lo = mid + 1;
  }
  return static_cast<i64>(lo);
}

// Rightmost block in [lo, hi] whose minimum is <= t, else -1.
i64 last_block_le(const rmq_index& rmq, u64 lo, u64 hi, u32 t) {
  if (lo > hi || rmq.value(rmq.query(lo, hi)) > t) return -1;
  while (lo < hi) {
    const u64 mid = lo + (hi - lo + 1) / 2;
    if (rmq.value(rmq.query(mid, hi)) <= t)
      lo = mid;
    else
      hi = mid - 1;
  }
  return static_cast<i64>(lo);
}

// Word of leaf-pattern bits ("()" starting at each position) for word wi.
u64 leaf_pattern_word(const std::vector<u64>& w, u64 wi) {
  const u64 cur = w[wi];
  const u64 nxt = wi + 1 < w.size() ? w[wi + 1] : 0;
  return cur & ~((cur >> 1) | (nxt << 63));
}

}  // namespace

// ---------------------------------------------------------------------------
// bp_tree

bp_tree::bp_tree(bit_vector bits) : bits_(std::move(bits)) {
  const u64 n = bits_.size();
  TI_REQUIRE(n >= 2 && n % 2 == 0, "bp_tree: parenthesis count must be even");
  TI_REQUIRE(n < (u64{1} << 32), "bp_tree: too many parentheses");
  const u64 nb = block_count();
  block_min_.resize(nb);
  leaf_dir_.resize(nb);
  i64 e = 0;
  u64 leaves = 0;
  for (u64 b = 0; b < nb; ++b) {
    leaf_dir_[b] = static_cast<u32>(leaves);
    const u64 end = std::min(n, (b + 1) * kBlock);
    i64 mn = std::numeric_limits<i64>::max();
    for (u64 i = b * kBlock; i < end; ++i) {
      const bool open = bits_.get(i);
      e += open ? 1 : -1;
      mn = std::min(mn, e);
      TI_REQUIRE(e >= (i + 1 == n ? 0 : 1),
                 "bp_tree: parentheses do not form one balanced tree");
      if (open && i + 1 < n && !bits_.get(i + 1)) ++leaves;
    }
    block_min_[b] = static_cast<u32>(mn);
  }
  TI_REQUIRE(e == 0, "bp_tree: parentheses are unbalanced");
  leaf_total_ = leaves;
  block_rmq_ = rmq_index(block_min_, rmq_index::kind::min);
}

bool bp_tree::is_leaf(u64 v) const {
  TI_REQUIRE(v < bits_.size() && bits_.get(v), "bp_tree::is_leaf: not a node");
  return !bits_.get(v + 1);
}

i64 bp_tree::fwd_search(u64 from, i64 target) const {
  TI_CHECK(target >= 0, "bp_tree: negative forward search target");
  const u64 n = bits_.size();
  i64 e = excess(from);
  const u64 bend = std::min(n, (from / kBlock + 1) * kBlock);
  const i64 hit = scan_excess_fwd(bits_, from, bend, e, target);
  if (hit >= 0) return hit;
  const u64 b0 = from / kBlock + 1;
  if (b0 >= block_count()) return -1;
  const i64 fb =
      first_block_le(block_rmq_, b0, block_count() - 1, static_cast<u32>(target));
  if (fb < 0) return -1;
  const u64 bs = static_cast<u64>(fb) * kBlock;
  i64 be = excess(bs);
  const i64 pos = scan_excess_fwd(bits_, bs, std::min(n, bs + kBlock), be, target);
  TI_CHECK(pos >= 0, "bp_tree: forward search missed its block");
  return pos;
}

i64 bp_tree::bwd_search(u64 upto, i64 target) const {
  TI_CHECK(target >= 0, "bp_tree: negative backward search target");
  // Recast as the largest i <= upto - 1 with excess(i + 1) == target; the
  // answer is then i + 1. excess(0) == 0 covers the remaining j == 0 case.
  if (upto > 0) {
    const u64 ihi = upto - 1;
    const u64 b = ihi / kBlock;
    i64 best =
        scan_excess_last(bits_, b * kBlock, ihi + 1, excess(b * kBlock), target);
    if (best >= 0) return best + 1;
    if (b > 0) {
      const i64 lb = last_block_le(block_rmq_, 0, b - 1, static_cast<u32>(target));
      if (lb >= 0) {
        const u64 bs = static_cast<u64>(lb) * kBlock;
        best = scan_excess_last(bits_, bs, std::min(bits_.size(), bs + kBlock),
                                excess(bs), target);
        TI_CHECK(best >= 0, "bp_tree: backward search missed its block");
        return best + 1;
      }
    }
  }
  return target == 0 ? 0 : -1;
}

u64 bp_tree::min_excess_pos(u64 i, u64 j) const {
  TI_REQUIRE(i <= j && j < bits_.size(), "bp_tree: bad excess range");
  u64 best_pos = i;
  i64 best = std::numeric_limits<i64>::max();
  auto scan = [&](u64 a, u64 b) {  // positions [a, b)
    i64 e = excess(a);
    for (u64 p = a; p < b; ++p) {
      e += bits_.get(p) ? 1 : -1;
      if (e < best) {
        best = e;
        best_pos = p;
      }
    }
  };
  const u64 bi = i / kBlock;
  const u64 bj = j / kBlock;
  if (bi == bj) {
    scan(i, j + 1);
    return best_pos;
  }
  scan(i, (bi + 1) * kBlock);
  if (bi + 1 <= bj - 1) {
    const u64 qb = block_rmq_.query(bi + 1, bj - 1);
    if (static_cast<i64>(block_min_[qb]) < best)
      scan(qb * kBlock, (qb + 1) * kBlock);
  }
  scan(bj * kBlock, j + 1);
  return best_pos;
}

u64 bp_tree::find_close(u64 v) const {
  TI_REQUIRE(v < bits_.size() && bits_.get(v), "bp_tree::find_close: not a node");
  if (!bits_.get(v + 1)) return v + 1;  // leaf
  const i64 c = fwd_search(v, excess(v));
  TI_CHECK(c > static_cast<i64>(v), "bp_tree: unmatched parenthesis");
  return static_cast<u64>(c);
}

i64 bp_tree::parent(u64 v) const {
  TI_REQUIRE(v < bits_.size() && bits_.get(v), "bp_tree::parent: not a node");
  if (v == 0) return -1;
  const i64 p = bwd_search(v - 1, excess(v) - 1);
  TI_CHECK(p >= 0, "bp_tree: node without a parent");
  return p;
}

u64 bp_tree::lca(u64 u, u64 v) const {
  TI_REQUIRE(u < bits_.size() && v < bits_.size() && bits_.get(u) && bits_.get(v),
             "bp_tree::lca: not nodes");
  if (u > v) std::swap(u, v);
  if (u == v) return u;
  if (v < find_close(u)) return u;  // v inside u's subtree
  // The leftmost excess minimum between the two opens is the close of the
  // last subtree of the answer that precedes v; the next position opens a
  // child of the answer (or is v itself).
  const u64 m = min_excess_pos(u, v - 1);
  const u64 w = m + 1;
  TI_CHECK(bits_.get(w), "bp_tree: excess minimum not followed by an open");
  const i64 p = parent(w);
  TI_CHECK(p >= 0, "bp_tree: range minimum escaped the root");
  return static_cast<u64>(p);
}

i64 bp_tree::first_child(u64 v) const {
  return is_leaf(v) ? -1 : static_cast<i64>(v + 1);
}

i64 bp_tree::next_sibling(u64 v) const {
  const u64 c = find_close(v);
  if (c + 1 >= bits_.size() || !bits_.get(c + 1)) return -1;
  return static_cast<i64>(c + 1);
}

u64 bp_tree::degree(u64 v) const {
  u64 n = 0;
  for (i64 c = first_child(v); c >= 0; c = next_sibling(static_cast<u64>(c)))
    ++n;
  return n;
}

i64 bp_tree::child(u64 v, u64 i) const {
  i64 c = first_child(v);
  for (u64 k = 0; k < i && c >= 0; ++k) c = next_sibling(static_cast<u64>(c));
  return c;
}

u64 bp_tree::leaf_rank(u64 i) const {
  TI_REQUIRE(i <= bits_.size(), "bp_tree::leaf_rank out of range");
  const u64 b = i / kBlock;
  if (b >= block_count()) return leaf_total_;
  u64 cnt = leaf_dir_[b];
  const std::vector<u64>& w = bits_.words();
  u64 p = b * kBlock;
  for (; p + 64 <= i; p += 64)
    cnt += static_cast<u64>(std::popcount(leaf_pattern_word(w, p >> 6)));
  if (p < i)
    cnt += static_cast<u64>(std::popcount(
        leaf_pattern_word(w, p >> 6) & low_mask(static_cast<u32>(i - p))));
  return cnt;
}

u64 bp_tree::leaf_select(u64 k) const {
  TI_REQUIRE(k >= 1 && k <= leaf_total_, "bp_tree::leaf_select out of range");
  u64 lo = 0;
  u64 hi = block_count() - 1;
  while (lo < hi) {  // last block with leaf_dir_ < k
    const u64 mid = lo + (hi - lo + 1) / 2;
    if (leaf_dir_[mid] < k)
      lo = mid;
    else
      hi = mid - 1;
  }
  u64 rem = k - leaf_dir_[lo];
  const std::vector<u64>& w = bits_.words();
  const u64 bend = std::min(bits_.size(), (lo + 1) * kBlock);
  for (u64 p = lo * kBlock; p < bend; p += 64) {
    u64 pat = leaf_pattern_word(w, p >> 6);
    const u64 pc = static_cast<u64>(std::popcount(pat));
    if (rem > pc) {
      rem -= pc;
      continue;
    }
    for (u64 t = 1; t < rem; ++t) pat &= pat - 1;
    return p + static_cast<u64>(std::countr_zero(pat));
  }
  TI_CHECK(false, "bp_tree: leaf select missed its block");
  return 0;
}

u64 bp_tree::leftmost_leaf(u64 v) const { return leaf_select(leaf_rank(v) + 1); }

u64 bp_tree::rightmost_leaf(u64 v) const {
  return leaf_select(leaf_rank(find_close(v)));
}

// ---------------------------------------------------------------------------
// suffix_topology

namespace {

shared_seq validate_bwt(shared_seq s, u32 sigma) {
  TI_REQUIRE(s && !s->empty(), "suffix_topology: empty transform");
  TI_REQUIRE(s->size() < (u64{1} << 30), "suffix_topology: transform too long");
  TI_REQUIRE(sigma >= 1, "suffix_topology: alphabet must be positive");
  u64 zeros = 0;
  for (u32 c : *s) {
    TI_REQUIRE(c < sigma, "suffix_topology: symbol out of range");
    if (c == 0) ++zeros;
  }
  TI_REQUIRE(zeros == 1,
             "suffix_topology: transform must contain exactly one terminator");
  return s;
}

}  // namespace

suffix_topology::suffix_topology(shared_seq bwt, u32 sigma)
    : bwt_(validate_bwt(std::move(bwt), sigma)),
      sigma_(sigma),
      acc_(*bwt_, sigma),
      pr_(std::make_shared<partial_rank_index>(bwt_, sigma)),
      rd_(bwt_, sigma, pr_) {
  const u64 n = bwt_->size();
  {
    enum_node root{0, static_cast<u32>(n - 1), 0, 0};
    for (u32 c = 0; c < sigma_; ++c) {
      if (acc_.count(c) == 0) continue;
      clabel_.push_back(c);
      cstart_.push_back(static_cast<u32>(acc_.acc(c)));
      ++root.cnt;
    }
    nodes_.push_back(root);
  }

  // Interval enumeration: process every internal node once, taking the
  // distinct symbols of each child interval; symbols whose backward image
  // splits into >= 2 child images spawn a new internal node. Entries are
  // grouped per symbol by a stable radix pass, so contributing children stay
  // in child (= label) order.
  struct wl_entry {
    u32 sym, label, freq, before;
  };
  range_distinct_index::scratch sc;
  std::vector<wl_entry> entries;
  std::vector<u32> bfs{0};
  for (u64 qi = 0; qi < bfs.size(); ++qi) {
    const enum_node nd = nodes_[bfs[qi]];
    entries.clear();
    for (u32 i = 0; i < nd.cnt; ++i) {
      const u64 p = cstart_[nd.off + i];
      const u64 q = i + 1 < nd.cnt ? cstart_[nd.off + i + 1] - 1 : nd.r;
      const u32 lab = clabel_[nd.off + i];
      if (p == q) {
        entries.push_back(
            {(*bwt_)[p], lab, 1, static_cast<u32>(pr_->rank(p) - 1)});
      } else {
        for (const distinct_entry& de : rd_.range_distinct(p, q, &sc))
          entries.push_back({de.symbol, lab, static_cast<u32>(de.freq),
                             static_cast<u32>(de.before)});
      }
    }
    lsd_radix_sort(entries, [](const wl_entry& we) { return we.sym; });
    for (u64 g = 0; g < entries.size();) {
      u64 h = g;
      u64 total = 0;
      while (h < entries.size() && entries[h].sym == entries[g].sym)
        total += entries[h++].freq;
      if (h - g >= 2) {
        const u32 c = entries[g].sym;
        enum_node child{static_cast<u32>(acc_.acc(c) + entries[g].before), 0,
                        static_cast<u32>(clabel_.size()),
                        static_cast<u32>(h - g)};
        child.r = static_cast<u32>(child.l + total - 1);
        u64 run = child.l;
        for (u64 t = g; t < h; ++t) {
          clabel_.push_back(entries[t].label);
          cstart_.push_back(static_cast<u32>(run));
          run += entries[t].freq;
        }
        TI_CHECK(run == child.r + 1ull, "suffix_topology: child images misaligned");
        TI_CHECK(nodes_.size() < n, "suffix_topology: enumeration node budget");
        bfs.push_back(static_cast<u32>(nodes_.size()));
        nodes_.push_back(child);
      }
      g = h;
    }
  }

  // Emit the parenthesis string: per suffix row, opens ordered (l asc,
  // r desc), then the leaf, then closes ordered (r asc, l desc).
  const u64 ni = nodes_.size();
  struct pos_key {
    u64 key;
    u32 idx;
  };
  std::vector<pos_key> opens(ni), closes(ni);
  for (u64 x = 0; x < ni; ++x) {
    opens[x] = {(static_cast<u64>(nodes_[x].l) << 32) |
                    (0xFFFFFFFFull - nodes_[x].r),
                static_cast<u32>(x)};
    closes[x] = {(static_cast<u64>(nodes_[x].r) << 32) |
                     (0xFFFFFFFFull - nodes_[x].l),
                 static_cast<u32>(x)};
  }
  lsd_radix_sort(opens, [](const pos_key& pk) { return pk.key; });
  lsd_radix_sort(closes, [](const pos_key& pk) { return pk.key; });
  bit_vector::builder bb;
  std::vector<u32> bp_pos(ni);
  u64 oi = 0, ci = 0, cursor = 0;
  for (u64 row = 0; row < n; ++row) {
    for (; oi < ni && nodes_[opens[oi].idx].l == row; ++oi) {
      bp_pos[opens[oi].idx] = static_cast<u32>(cursor++);
      bb.push_back(true);
    }
    bb.push_back(true);
    bb.push_back(false);
    cursor += 2;
    for (; ci < ni && nodes_[closes[ci].idx].r == row; ++ci) {
      bb.push_back(false);
      ++cursor;
    }
  }
  TI_CHECK(oi == ni && ci == ni, "suffix_topology: unplaced parentheses");
  bp_ = bp_tree(bb.build());
  TI_CHECK(bp_.leaf_count() == n, "suffix_topology: leaf count mismatch");
  TI_CHECK(bp_.node_count() == n + ni, "suffix_topology: node count mismatch");

  // Re-address the enumeration records by internal rank so lookups from a
  // parenthesis position are direct.
  std::vector<enum_node> by_rank(ni);
  std::vector<bool> seen(ni, false);
  for (u64 x = 0; x < ni; ++x) {
    const u64 rk = bp_.internal_rank(bp_pos[x]);
    TI_CHECK(rk < ni && !seen[rk], "suffix_topology: broken internal ranks");
    seen[rk] = true;
    by_rank[rk] = nodes_[x];
  }
  nodes_ = std::move(by_rank);
}

std::pair<u64, u64> suffix_topology::interval(u64 v) const {
  const u64 l = bp_.leaf_rank(v);
  const u64 r = bp_.leaf_rank(bp_.find_close(v)) - 1;
  return {l, r};
}

u64 suffix_topology::leaves(u64 v) const {
  const auto [l, r] = interval(v);
  return r - l + 1;
}

u64 suffix_topology::node_of(u64 l, u64 r) const {
  TI_REQUIRE(l <= r && r < size(), "suffix_topology::node_of: bad interval");
  return bp_.lca(bp_.leaf_select(l + 1), bp_.leaf_select(r + 1));
}

suffix_topology::children_view suffix_topology::children(u64 v) const {
  TI_REQUIRE(!bp_.is_leaf(v), "suffix_topology::children: leaf node");
  return children_by_rank(bp_.internal_rank(v));
}

suffix_topology::children_view suffix_topology::children_by_rank(
    u64 internal_idx) const {
  TI_REQUIRE(internal_idx < nodes_.size(),
             "suffix_topology: internal index out of range");
  const enum_node& nd = nodes_[internal_idx];
  return {nd.l, nd.r, nd.cnt, clabel_.data() + nd.off, cstart_.data() + nd.off};
}

i64 suffix_topology::child_index(u64 v, u32 a) const {
  const children_view cv = children(v);
  const u32* e = cv.labels + cv.count;
  const u32* it = std::lower_bound(cv.labels, e, a);
  return it != e && *it == a ? it - cv.labels : -1;
}

std::pair<u64, u64> suffix_topology::child_interval(const children_view& cv,
                                                    u32 i) const {
  TI_REQUIRE(i < cv.count, "suffix_topology::child_interval: index out of range");
  const u64 p = cv.starts[i];
  const u64 q = i + 1 < cv.count ? cv.starts[i + 1] - 1ull : cv.r;
  return {p, q};
}

// ---------------------------------------------------------------------------
// node_marking

node_marking::node_marking(const suffix_topology& topo) {
  const u64 n = topo.size();
  d_ = std::max<u64>(1, floor_log2(n));
  const u64 ni = topo.internal_count();
  std::vector<bool> heavy(ni, false), special(ni, false);
  for (u64 idx = 0; idx < ni; ++idx) {
    const auto cv = topo.children_by_rank(idx);
    if (cv.r - cv.l + 1 < d_) continue;  // light: children are lighter still
    heavy[idx] = true;
    u32 heavy_children = 0;
    u32 heavy_at = 0;
    for (u32 i = 0; i < cv.count; ++i) {
      const auto [p, q] = topo.child_interval(cv, i);
      if (q - p + 1 >= d_) {
        ++heavy_children;
        heavy_at = i;
      }
    }
    if (heavy_children >= 2) {
      special[idx] = true;
      specials_.push_back(static_cast<u32>(idx));
      d_off_.push_back(static_cast<u32>(d_label_.size()));
      for (u32 i = 0; i < cv.count; ++i) {
        const auto [p, q] = topo.child_interval(cv, i);
        if (q - p + 1 < d_) continue;
        d_label_.push_back(cv.labels[i]);
        d_target_.push_back(static_cast<u32>(topo.node_of(p, q)));
      }
    } else if (heavy_children == 1 && cv.count > d_) {
      const auto [p, q] = topo.child_interval(cv, heavy_at);
      stored_src_.push_back(static_cast<u32>(idx));
      stored_label_.push_back(cv.labels[heavy_at]);
      stored_target_.push_back(static_cast<u32>(topo.node_of(p, q)));
    }
  }
  d_off_.push_back(static_cast<u32>(d_label_.size()));
  heavy_ = bit_vector(heavy);
  special_ = bit_vector(special);
  TI_CHECK((specials_.size() + d_label_.size() + stored_src_.size()) * d_ <=
               4 * n,
           "node_marking: dictionary budget exceeded");
}

i64 node_marking::child_by_label(const suffix_topology& topo, u64 v, u32 a,
                                 nav_stats* st) const {
  const bp_tree& t = topo.tree();
  TI_REQUIRE(!t.is_leaf(v), "node_marking::child_by_label: leaf node");
  const u32 idx = static_cast<u32>(t.internal_rank(v));
  if (special_.get(idx)) {
    const auto sit = std::lower_bound(specials_.begin(), specials_.end(), idx);
    TI_CHECK(sit != specials_.end() && *sit == idx,
             "node_marking: special directory out of sync");
    const u64 si = static_cast<u64>(sit - specials_.begin());
    const u32* lb = d_label_.data() + d_off_[si];
    const u32* le = d_label_.data() + d_off_[si + 1];
    const u32* it = std::lower_bound(lb, le, a);
    if (it != le && *it == a) {
      if (st) ++st->dict_hits;
      return d_target_[d_off_[si] + static_cast<u64>(it - lb)];
    }
  } else if (!stored_src_.empty()) {
    const auto sit =
        std::lower_bound(stored_src_.begin(), stored_src_.end(), idx);
    if (sit != stored_src_.end() && *sit == idx) {
      const u64 si = static_cast<u64>(sit - stored_src_.begin());
      if (stored_label_[si] == a) {
        if (st) ++st->stored_hits;
        return stored_target_[si];
      }
    }
  }
  const suffix_topology::children_view cv = topo.children(v);
  const u32* e = cv.labels + cv.count;
  const u32* it = std::lower_bound(cv.labels, e, a);
  if (it == e || *it != a) return -1;
  const auto [p, q] = topo.child_interval(cv, static_cast<u32>(it - cv.labels));
  if (st && heavy_.get(idx) && q - p + 1 < d_) ++st->difficult;
  return static_cast<i64>(topo.node_of(p, q));
}

// ---------------------------------------------------------------------------
// weiner_link_index

weiner_link_index::weiner_link_index(const suffix_topology& topo)
    : d_(std::max<u64>(1, floor_log2(topo.size()))),
      window_(d_ * d_),
      si_(topo.bwt(), topo.sigma(), topo.partial(), 4 * d_ * d_),
      gs_(topo.bwt(), topo.sigma()) {
  const u64 n = topo.size();
  const u64 ni = topo.internal_count();
  const alphabet_stats& acc = topo.acc();
  range_distinct_index::scratch sc;
  std::vector<std::pair<u32, u32>> heavy_links;
  for (u64 idx = 0; idx < ni; ++idx) {
    const auto cv = topo.children_by_rank(idx);
    const auto ds = topo.distinct().range_distinct(cv.l, cv.r, &sc);
    heavy_links.clear();
    for (const distinct_entry& de : ds) {
      if (de.freq < d_) continue;
      const u64 s = acc.acc(de.symbol) + de.before;
      heavy_links.emplace_back(
          de.symbol, static_cast<u32>(topo.node_of(s, s + de.freq - 1)));
    }
    if (heavy_links.size() >= 2) {
      std::sort(heavy_links.begin(), heavy_links.end());
      specials_.push_back(static_cast<u32>(idx));
      wd_off_.push_back(static_cast<u32>(wd_label_.size()));
      for (const auto& [sym, tgt] : heavy_links) {
        wd_label_.push_back(sym);
        wd_target_.push_back(tgt);
      }
    } else if (heavy_links.size() == 1 && ds.size() > d_) {
      uniq_src_.push_back(static_cast<u32>(idx));
      uniq_label_.push_back(heavy_links[0].first);
      uniq_target_.push_back(heavy_links[0].second);
    }
  }
  wd_off_.push_back(static_cast<u32>(wd_label_.size()));
  TI_CHECK((wd_label_.size() + uniq_src_.size()) * d_ <= 8 * n,
           "weiner_link_index: link budget exceeded");
}

i64 weiner_link_index::weiner_link(const suffix_topology& topo, u64 v, u32 a,
                                   nav_stats* st) const {
  const bp_tree& t = topo.tree();
  TI_REQUIRE(v < t.size_bits() && t.is_open(v), "weiner_link: not a node");
  if (a >= topo.sigma()) return -1;
  const auto [l, r] = topo.interval(v);
  if (!t.is_leaf(v)) {
    const u32 idx = static_cast<u32>(t.internal_rank(v));
    const auto sit = std::lower_bound(specials_.begin(), specials_.end(), idx);
    if (sit != specials_.end() && *sit == idx) {
      const u64 si = static_cast<u64>(sit - specials_.begin());
      const u32* lb = wd_label_.data() + wd_off_[si];
      const u32* le = wd_label_.data() + wd_off_[si + 1];
      const u32* it = std::lower_bound(lb, le, a);
      if (it != le && *it == a) {
        if (st) ++st->dict_hits;
        return wd_target_[wd_off_[si] + static_cast<u64>(it - lb)];
      }
    } else {
      const auto uit = std::lower_bound(uniq_src_.begin(), uniq_src_.end(), idx);
      if (uit != uniq_src_.end() && *uit == idx) {
        const u64 ui = static_cast<u64>(uit - uniq_src_.begin());
        if (uniq_label_[ui] == a) {
          if (st) ++st->stored_hits;
          return uniq_target_[ui];
        }
      }
    }
  }
  const alphabet_stats& acc = topo.acc();
  if (acc.count(a) == 0) return -1;
  // Boundary windows: when the link is heavy, or the source light, or the
  // symbol absent near a boundary yet the window covers the interval, the
  // extreme occurrences sit within d^2 of the interval ends.
  const u64 wl_hi = std::min(r, l + window_);
  const auto left = si_.interval_rank(a, l, wl_hi);
  if (!left) {
    if (wl_hi == r) return -1;  // window covered the whole interval: absent
    if (st) {
      ++st->difficult;
      ++st->slow_ranks;
    }
    const u64 lo = gs_.rank(a, static_cast<i64>(l) - 1);
    const u64 hi = gs_.rank(a, static_cast<i64>(r));
    if (lo == hi) return -1;
    return static_cast<i64>(topo.node_of(acc.acc(a) + lo, acc.acc(a) + hi - 1));
  }
  const u64 start = acc.acc(a) + left->first - 1;
  const u64 wr_lo = std::max(l, r - std::min(r, window_));
  const auto right = si_.interval_rank(a, wr_lo, r);
  if (!right) {  // present near the left boundary only: rightmost is interior
    if (st) {
      ++st->difficult;
      ++st->slow_ranks;
    }
    const u64 hi = gs_.rank(a, static_cast<i64>(r));
    return static_cast<i64>(topo.node_of(start, acc.acc(a) + hi - 1));
  }
  return static_cast<i64>(topo.node_of(start, acc.acc(a) + right->second - 1));
}

// ---------------------------------------------------------------------------
// extend_right_run

u64 extend_right_run(const suffix_topology& topo, const node_marking& marking,
                     const suffix_topology& rtopo,
                     const weiner_link_index& rwl, interval_pair& state,
                     const u32* symbols, u64 count, extend_stats* st) {
  TI_REQUIRE(symbols != nullptr || count == 0, "extend_right_run: null symbols");
  TI_REQUIRE(topo.size() == rtopo.size(),
             "extend_right_run: topologies disagree on text length");
  TI_REQUIRE(state.fl <= state.fr && state.fr < topo.size() &&
                 state.rl <= state.rr && state.rr < rtopo.size(),
             "extend_right_run: invalid interval state");
  for (u64 k = 0; k < count; ++k) {
    const u32 a = symbols[k];
    TI_REQUIRE(a >= 1 && a < topo.sigma(),
               "extend_right_run: content symbols only");
    TI_CHECK(state.fr - state.fl == state.rr - state.rl,
             "extend_right_run: mismatched interval sizes");
    // The reverse transform over the factor's reverse-interval holds the
    // symbols following each occurrence: a uniform range means the factor
    // has a single right extension, so the forward interval cannot change.
    if (rtopo.distinct().is_uniform_range(state.rl, state.rr)) {
      const u32 c = (*rtopo.bwt())[state.rl];
      if (c != a) return k;
      if (st) ++st->uniform;
      const u64 base = rtopo.acc().acc(a);
      state.rl = base + rtopo.partial()->rank(state.rl) - 1;
      state.rr = base + rtopo.partial()->rank(state.rr) - 1;
      continue;
    }
    // Two or more distinct followers: the factor is right-maximal, so its
    // forward locus carries exactly its interval and its own edge labels.
    const u64 u = topo.node_of(state.fl, state.fr);
    const i64 child =
        marking.child_by_label(topo, u, a, st ? &st->child : nullptr);
    if (child < 0) return k;
    const i64 rv = rwl.weiner_link(rtopo, rtopo.node_of(state.rl, state.rr), a,
                                   st ? &st->wlink : nullptr);
    TI_CHECK(rv >= 0,
             "extend_right_run: reverse link missing for an existing extension");
    const auto [fl, fr] = topo.interval(static_cast<u64>(child));
    const auto [rl, rr] = rtopo.interval(static_cast<u64>(rv));
    state = {fl, fr, rl, rr};
  }
  return count;
}

}  // namespace textidx
