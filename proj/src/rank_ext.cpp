#include "textidx/rank_ext.hpp"

#include <algorithm>

namespace textidx {

namespace {

// bit width of x (0 -> 0).
u32 width_of(u64 x) { return x == 0 ? 0 : static_cast<u32>(floor_log2(x)) + 1; }

void require_seq(const shared_seq& seq, u32 sigma, const char* who) {
  TI_REQUIRE(seq != nullptr, "null sequence");
  TI_REQUIRE(sigma >= 1 && sigma <= (1u << 24), "alphabet size out of range");
  for (u32 v : *seq) {
    TI_REQUIRE(v < sigma, "symbol out of range");
    (void)who;
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// partial_rank_index

partial_rank_index::partial_rank_index(shared_seq seq, u32 sigma)
    : seq_(std::move(seq)), sigma_(sigma) {
  require_seq(seq_, sigma_, "partial_rank_index");
  const auto& s = *seq_;
  const u64 n = s.size();
  chunk_width_ = sigma_;
  const u64 cw = std::min<u64>(sigma_, std::max<u64>(n, 1));
  wbits_ = std::max<u32>(1, static_cast<u32>(ceil_log2(cw)));
  const u64 lg = cw >= 2 ? floor_log2(cw) : 1;
  bucket_len_ = std::max<u64>(1, lg * lg);
  lbits_ = std::max<u32>(1, static_cast<u32>(ceil_log2(wbits_ + 2)));
  rbits_ = std::max<u32>(1, static_cast<u32>(ceil_log2(2 * bucket_len_ + 1)));
  if (n == 0) return;

  const u64 nchunks = ceil_div(n, chunk_width_);
  codes_ = packed_int_array(n, lbits_ + rbits_);
  dirs_.resize(nchunks);
  std::vector<u32> mat(u64{sigma_} * nchunks, 0);  // per (symbol, chunk) count

  std::vector<std::pair<u32, u32>> occ;  // (symbol, in-chunk position)
  for (u64 c = 0; c < nchunks; ++c) {
    const u64 lo = c * chunk_width_;
    const u64 hi = std::min(n, lo + chunk_width_);
    occ.clear();
    for (u64 i = lo; i < hi; ++i)
      occ.push_back({s[i], static_cast<u32>(i - lo)});
    lsd_radix_sort(occ, [](const std::pair<u32, u32>& o) { return u64{o.first}; });

    auto& dir = dirs_[c];
    for (u64 x = 0; x < occ.size();) {
      const u32 a = occ[x].first;
      u64 y = x;
      while (y < occ.size() && occ[y].first == a) ++y;
      const u64 cnt = y - x;
      mat[u64{a} * nchunks + c] = static_cast<u32>(cnt);
      if (cnt <= 2 * bucket_len_) {
        // Small set: store the full in-chunk partial rank, no bucket.
        for (u64 t = x; t < y; ++t)
          codes_.set(lo + occ[t].second, t - x + 1);
      } else {
        ++info_.bucketed_sets;
        const u64 nb = cnt / bucket_len_;
        for (u64 b = 0; b < nb; ++b) {
          const u64 bl = x + b * bucket_len_;
          const u64 bh = b + 1 == nb ? y : bl + bucket_len_;
          const u32 first = occ[bl].second;
          const u32 last = occ[bh - 1].second;
          const u32 l = wbits_ - width_of(u32{first} ^ u32{last});
          // A bucket holds >= L distinct positions sharing an l-bit prefix,
          // so its trie node spans at least L leaves.
          TI_CHECK((u64{1} << (wbits_ - l)) >= bucket_len_,
                   "partial_rank_index: bucket node too low");
          const u64 node = ((u64{1} << l) - 1) + (u64{first} >> (wbits_ - l));
          dir.entries.push_back({node * sigma_ + a, static_cast<u32>(b)});
          for (u64 t = bl; t < bh; ++t)
            codes_.set(lo + occ[t].second,
                       (u64{l} + 1) << rbits_ | (t - bl + 1));
        }
        info_.buckets += nb;
      }
      x = y;
    }
    std::sort(dir.entries.begin(), dir.entries.end(),
              [](const dir_entry& u, const dir_entry& v) { return u.key < v.key; });
    for (std::size_t e = 1; e < dir.entries.size(); ++e)
      TI_CHECK(dir.entries[e].key != dir.entries[e - 1].key,
               "partial_rank_index: bucket prefixes collide");
  }

  chunk_counts::builder cb(sigma_, nchunks);
  for (u32 a = 0; a < sigma_; ++a)
    for (u64 c = 0; c < nchunks; ++c) cb.add(mat[u64{a} * nchunks + c]);
  counts_ = cb.build();

  info_.chunks = nchunks;
  info_.aux_bits = codes_.words().size() * 64;
  for (const auto& d : dirs_)
    info_.aux_bits += d.entries.size() * sizeof(dir_entry) * 8;
  info_.aux_bits += n + u64{sigma_} * nchunks;  // unary chunk counters
}

u64 partial_rank_index::rank(u64 i, u64* probes) const {
  TI_REQUIRE(seq_ != nullptr && i < seq_->size(),
             "partial_rank_index::rank: position out of range");
  const u32 a = (*seq_)[i];
  const u64 c = i / chunk_width_;
  const u64 rel = i - c * chunk_width_;
  const u64 code = codes_.get(i);
  const u64 lp1 = code >> rbits_;
  const u64 r = code & low_mask(rbits_);
  u64 in_chunk;
  if (lp1 == 0) {
    in_chunk = r;
  } else {
    const u32 l = static_cast<u32>(lp1 - 1);
    const u64 node = ((u64{1} << l) - 1) + (rel >> (wbits_ - l));
    const u64 key = node * sigma_ + a;
    const auto& es = dirs_[c].entries;
    std::size_t lo = 0, hi = es.size();
    while (lo < hi) {
      const std::size_t mid = (lo + hi) / 2;
      if (probes != nullptr) ++*probes;
      if (es[mid].key < key) lo = mid + 1;
      else hi = mid;
    }
    TI_CHECK(lo < es.size() && es[lo].key == key,
             "partial_rank_index::rank: directory miss");
    in_chunk = u64{es[lo].bucket} * bucket_len_ + r;
  }
  return counts_.prefix(a, c) + in_chunk;
}

// ---------------------------------------------------------------------------
// range_distinct_index

range_distinct_index::range_distinct_index(shared_seq seq, u32 sigma,
                                           shared_partial_rank pr)
    : seq_(std::move(seq)), sigma_(sigma), pr_(std::move(pr)) {
  require_seq(seq_, sigma_, "range_distinct_index");
  if (pr_ == nullptr)
    pr_ = std::make_shared<const partial_rank_index>(seq_, sigma_);
  TI_REQUIRE(pr_->data() == seq_ && pr_->sigma() == sigma_,
             "range_distinct_index: partial-rank index mismatch");
  const auto& s = *seq_;
  const u64 n = s.size();
  TI_REQUIRE(n + 1 < (u64{1} << 32), "range_distinct_index: sequence too long");

  std::vector<u32> prev(n), next(n);
  std::vector<u32> last(sigma_, 0);  // previous occurrence + 1; 0 = none
  for (u64 i = 0; i < n; ++i) {
    prev[i] = last[s[i]];
    last[s[i]] = static_cast<u32>(i + 1);
  }
  std::vector<u32> nxt(sigma_, static_cast<u32>(n));  // n = none
  for (u64 i = n; i-- > 0;) {
    next[i] = nxt[s[i]];
    nxt[s[i]] = static_cast<u32>(i);
  }
  prev_min_ = rmq_index(std::move(prev), rmq_index::kind::min);
  next_max_ = rmq_index(std::move(next), rmq_index::kind::max);
}

std::vector<distinct_entry> range_distinct_index::range_distinct(
    u64 i, u64 j, scratch* sc, query_stats* st) const {
  TI_REQUIRE(seq_ != nullptr && i <= j && j < seq_->size(),
             "range_distinct: bad range");
  scratch local;
  scratch& w = sc != nullptr ? *sc : local;
  if (w.slot.size() < sigma_) {
    w.slot.assign(sigma_, 0);
    w.stamp.assign(sigma_, 0);
    w.epoch = 0;
  }
  ++w.epoch;
  if (st != nullptr) *st = query_stats{};
  query_stats tmp;
  query_stats& stats = st != nullptr ? *st : tmp;

  const auto& s = *seq_;
  std::vector<distinct_entry> out;
  std::vector<std::pair<u64, u64>> stack;

  // Leftmost pass: a position is the leftmost in-range occurrence of its
  // symbol iff its previous occurrence falls before i. Recursing on both
  // sides of a hit and pruning misses visits O(occ) subranges.
  stack.emplace_back(i, j);
  while (!stack.empty()) {
    const auto [lo, hi] = stack.back();
    stack.pop_back();
    const u64 p = prev_min_.query(lo, hi);
    ++stats.rmq_calls;
    if (u64{prev_min_.value(p)} >= i + 1) continue;
    w.slot[s[p]] = static_cast<u32>(out.size());
    w.stamp[s[p]] = w.epoch;
    out.push_back({s[p], p, p, 0, 0});
    if (p > lo) stack.emplace_back(lo, p - 1);
    if (p < hi) stack.emplace_back(p + 1, hi);
  }

  // Rightmost pass, symmetric.
  stack.emplace_back(i, j);
  while (!stack.empty()) {
    const auto [lo, hi] = stack.back();
    stack.pop_back();
    const u64 p = next_max_.query(lo, hi);
    ++stats.rmq_calls;
    if (u64{next_max_.value(p)} <= j) continue;
    TI_CHECK(w.stamp[s[p]] == w.epoch, "range_distinct: passes disagree");
    out[w.slot[s[p]]].rightmost = p;
    if (p > lo) stack.emplace_back(lo, p - 1);
    if (p < hi) stack.emplace_back(p + 1, hi);
  }

  for (auto& e : out) {
    const u64 rl = pr_->rank(e.leftmost, &stats.probes);
    const u64 rr = pr_->rank(e.rightmost, &stats.probes);
    e.freq = rr - rl + 1;
    e.before = rl - 1;
  }
  return out;
}

bool range_distinct_index::is_uniform_range(u64 i, u64 j) const {
  TI_REQUIRE(seq_ != nullptr && i <= j && j < seq_->size(),
             "is_uniform_range: bad range");
  const auto& s = *seq_;
  if (s[i] != s[j]) return false;
  return pr_->rank(j) - pr_->rank(i) == j - i;
}

// ---------------------------------------------------------------------------
// small_interval_rank_index

small_interval_rank_index::small_interval_rank_index(shared_seq seq, u32 sigma,
                                                     shared_partial_rank pr,
                                                     u64 group_width)
    : seq_(std::move(seq)), sigma_(sigma), pr_(std::move(pr)) {
  require_seq(seq_, sigma_, "small_interval_rank_index");
  if (pr_ == nullptr)
    pr_ = std::make_shared<const partial_rank_index>(seq_, sigma_);
  TI_REQUIRE(pr_->data() == seq_ && pr_->sigma() == sigma_,
             "small_interval_rank_index: partial-rank index mismatch");
  TI_REQUIRE(group_width < (u64{1} << 32),
             "small_interval_rank_index: group width too large");
  const u64 lg = sigma_ >= 2 ? floor_log2(sigma_) : 1;
  width_ = group_width > 0 ? group_width : std::max<u64>(1, lg * lg);

  const auto& s = *seq_;
  const u64 n = s.size();
  const u64 ngroups = n == 0 ? 0 : ceil_div(n, width_);
  sym_start_.assign(ngroups + 1, 0);
  offsets_ = packed_int_array(
      n, std::max<u32>(1, static_cast<u32>(ceil_log2(width_))));

  std::vector<std::pair<u32, u32>> occ;  // (symbol, in-group offset)
  u64 opos = 0;
  for (u64 g = 0; g < ngroups; ++g) {
    const u64 lo = g * width_;
    const u64 hi = std::min(n, lo + width_);
    occ.clear();
    for (u64 p = lo; p < hi; ++p)
      occ.push_back({s[p], static_cast<u32>(p - lo)});
    lsd_radix_sort(occ, [](const std::pair<u32, u32>& o) { return u64{o.first}; });
    sym_start_[g] = gsyms_.size();
    for (u64 x = 0; x < occ.size();) {
      const u32 a = occ[x].first;
      gsyms_.push_back(a);
      off_start_.push_back(opos);
      while (x < occ.size() && occ[x].first == a) {
        offsets_.set(opos++, occ[x].second);
        ++x;
      }
    }
  }
  sym_start_[ngroups] = gsyms_.size();
  off_start_.push_back(opos);
}

i64 small_interval_rank_index::rightmost_in_group(u64 g, u32 symbol, u64 lo,
                                                  u64 hi, u64* probes) const {
  const u64 base = g * width_;
  u64 a = sym_start_[g], b = sym_start_[g + 1];
  while (a < b) {
    const u64 mid = (a + b) / 2;
    if (probes != nullptr) ++*probes;
    if (gsyms_[mid] < symbol) a = mid + 1;
    else b = mid;
  }
  if (a == sym_start_[g + 1] || gsyms_[a] != symbol) return -1;
  // Largest stored offset <= hi - base (offsets ascend within the slice).
  u64 x = off_start_[a], y = off_start_[a + 1];
  const u64 target = hi - base;
  while (x < y) {
    const u64 mid = (x + y) / 2;
    if (probes != nullptr) ++*probes;
    if (offsets_.get(mid) <= target) x = mid + 1;
    else y = mid;
  }
  if (x == off_start_[a]) return -1;
  const u64 off = offsets_.get(x - 1);
  if (base + off < lo) return -1;
  return static_cast<i64>(base + off);
}

i64 small_interval_rank_index::leftmost_in_group(u64 g, u32 symbol, u64 lo,
                                                 u64 hi, u64* probes) const {
  const u64 base = g * width_;
  u64 a = sym_start_[g], b = sym_start_[g + 1];
  while (a < b) {
    const u64 mid = (a + b) / 2;
    if (probes != nullptr) ++*probes;
    if (gsyms_[mid] < symbol) a = mid + 1;
    else b = mid;
  }
  if (a == sym_start_[g + 1] || gsyms_[a] != symbol) return -1;
  // Smallest stored offset >= lo - base.
  u64 x = off_start_[a], y = off_start_[a + 1];
  const u64 target = lo - base;
  while (x < y) {
    const u64 mid = (x + y) / 2;
    if (probes != nullptr) ++*probes;
    if (offsets_.get(mid) < target) x = mid + 1;
    else y = mid;
  }
  if (x == off_start_[a + 1]) return -1;
  const u64 off = offsets_.get(x);
  if (base + off > hi) return -1;
  return static_cast<i64>(base + off);
}

std::optional<std::pair<u64, u64>> small_interval_rank_index::interval_rank(
    u32 symbol, u64 i, u64 j, u64* probes) const {
  TI_REQUIRE(seq_ != nullptr && i <= j && j < seq_->size(),
             "interval_rank: bad range");
  TI_REQUIRE(j - i <= interval_limit(), "interval_rank: interval too wide");
  if (symbol >= sigma_) return std::nullopt;
  const u64 glo = i / width_;
  const u64 ghi = j / width_;

  i64 right = -1;
  for (u64 g = ghi + 1; g-- > glo;) {
    const u64 lo = std::max(i, g * width_);
    const u64 hi = std::min(j, (g + 1) * width_ - 1);
    right = rightmost_in_group(g, symbol, lo, hi, probes);
    if (right >= 0) break;
  }
  if (right < 0) return std::nullopt;

  i64 left = -1;
  for (u64 g = glo; g <= ghi; ++g) {
    const u64 lo = std::max(i, g * width_);
    const u64 hi = std::min(j, (g + 1) * width_ - 1);
    left = leftmost_in_group(g, symbol, lo, hi, probes);
    if (left >= 0) break;
  }
  TI_CHECK(left >= 0 && left <= right, "interval_rank: group scans disagree");

  return std::make_pair(pr_->rank(static_cast<u64>(left), probes),
                        pr_->rank(static_cast<u64>(right), probes));
}

}  // namespace textidx
