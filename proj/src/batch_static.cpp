#include "textidx/batch_static.hpp"

#include <algorithm>

namespace textidx {

static_batch_seq::static_batch_seq(shared_seq seq, u32 sigma, mode m)
    : seq_(std::move(seq)), sigma_(sigma) {
  TI_REQUIRE(seq_ != nullptr && !seq_->empty(), "static_batch_seq: empty sequence");
  TI_REQUIRE(sigma_ >= 1, "static_batch_seq: bad alphabet size");
  const u64 n = seq_->size();
  if (m == mode::automatic) {
    const u64 lg = floor_log2(std::max<u64>(n, 2));
    const u64 threshold = lg * lg * lg * lg;  // sigma >= log^4 n regime
    m = sigma_ < threshold ? mode::small_alphabet : mode::chunked;
  }
  info_.used = m;
  if (m == mode::small_alphabet) {
    plain_ = small_alphabet_seq(seq_, sigma_);
    return;
  }
  build_chunked();
}

void static_batch_seq::build_chunked() {
  const u64 n = seq_->size();
  TI_REQUIRE(sigma_ <= 1u << 16, "static_batch_seq: chunked mode needs sigma <= 2^16");
  chunk_size_ = sigma_;
  chunks_ = ceil_div(n, chunk_size_);
  const u64 lg = floor_log2(std::max<u64>(n, 2));
  const u64 g = std::max<u64>(1, lg * lg);

  // Per-(chunk, symbol) occurrence counts -> CSR offsets into rpos_.
  sym_start_.assign(chunks_ * (sigma_ + 1) + 1, 0);
  for (u64 i = 0; i < n; ++i) {
    const u64 c = i / chunk_size_;
    const u32 a = (*seq_)[i];
    TI_REQUIRE(a < sigma_, "static_batch_seq: symbol out of range");
    ++sym_start_[c * (sigma_ + 1) + a + 1];
  }
  for (u64 k = 1; k < sym_start_.size(); ++k) {
    // Roll per-chunk offsets into absolute ones; the extra per-chunk slot
    // (index sigma) stays a duplicate of the chunk end.
    sym_start_[k] += sym_start_[k - 1];
  }
  rpos_.resize(n);
  std::vector<u32> cursor(sym_start_.begin(), sym_start_.end() - 1);
  for (u64 i = 0; i < n; ++i) {
    const u64 c = i / chunk_size_;
    const u32 a = (*seq_)[i];
    rpos_[cursor[c * (sigma_ + 1) + a]++] = static_cast<u16>(i - c * chunk_size_);
  }

  // Sample every g-th occurrence per (chunk, symbol) as a group boundary.
  bstart_.assign(chunks_ + 1, 0);
  for (u64 c = 0; c < chunks_; ++c) {
    bstart_[c] = static_cast<u32>(bkey_.size());
    const u64 base = c * (sigma_ + 1);
    for (u32 a = 0; a < sigma_; ++a) {
      const u32 lo = sym_start_[base + a];
      const u32 hi = sym_start_[base + a + 1];
      for (u32 k = lo; k < hi; k += g) {
        bkey_.push_back(static_cast<u32>(a) << 16 | rpos_[k]);
        bidx_.push_back(k);
      }
    }
  }
  bstart_[chunks_] = static_cast<u32>(bkey_.size());

  // Unary per-chunk counts for the cross-chunk prefix part of each answer.
  chunk_counts::builder cb(sigma_, chunks_);
  for (u32 a = 0; a < sigma_; ++a)
    for (u64 c = 0; c < chunks_; ++c) {
      const u64 base = c * (sigma_ + 1);
      cb.add(sym_start_[base + a + 1] - sym_start_[base + a]);
    }
  counts_ = cb.build();

  info_.chunks = chunks_;
  info_.group_cap = g;
  info_.boundaries = bkey_.size();
}

void static_batch_seq::chunk_batch(u64 chunk,
                                   std::vector<std::pair<u32, u32>>& qs,
                                   const std::vector<u32>& order,
                                   std::vector<i64>& answers,
                                   batch_stats& st) const {
  const u64 v = qs.size();
  const u64 lg = floor_log2(std::max<u64>(seq_->size(), 2));
  // Comparison sort for small batches, radix for large ones.
  if (v < std::max<u64>(2, chunk_size_ / (lg * lg * lg))) {
    std::sort(qs.begin(), qs.end());
    ++st.comparison_sorted;
  } else {
    lsd_radix_sort(qs, [](const std::pair<u32, u32>& q) { return static_cast<u64>(q.first); });
    ++st.radix_sorted;
  }

  const u32 blo = bstart_[chunk], bhi = bstart_[chunk + 1];
  const u64 g = info_.group_cap;
  const u64 base = chunk * (sigma_ + 1);
  u32 bp = blo;
  st.merge_bound += (bhi - blo) + v;
  ++st.chunk_batches;
  for (const auto& [key, orig] : qs) {
    while (bp < bhi && bkey_[bp] <= key) {
      ++bp;
      ++st.merge_steps;
    }
    const u32 a = key >> 16;
    const u32 rel = key & 0xffff;
    u64 in_chunk = 0;
    if (bp > blo && (bkey_[bp - 1] >> 16) == a) {
      const u32 idx = bidx_[bp - 1];
      const u32 sym_lo = sym_start_[base + a];
      const u32 sym_hi = sym_start_[base + a + 1];
      const u32 grp_hi = std::min<u32>(idx + static_cast<u32>(g), sym_hi);
      const auto first = rpos_.begin() + idx;
      const auto last = rpos_.begin() + grp_hi;
      const auto it = std::upper_bound(first, last, static_cast<u16>(rel));
      const u64 n2 = static_cast<u64>(it - first);
      st.probes += n2 ? ceil_log2(static_cast<u64>(last - first) + 1) : 1;
      // The boundary's partial rank within the chunk is its occurrence
      // index + 1; groups before it are full, so this is annotation - 1 + n2.
      const u64 before_group = idx - sym_lo;
      in_chunk = before_group + n2;
      // Answer-locality: the found predecessor is the rightmost occurrence
      // of a at position <= rel.
      TI_CHECK(n2 >= 1 && rpos_[idx + n2 - 1] <= rel, "static_batch_seq: predecessor misses");
      TI_CHECK(idx + n2 == grp_hi || rpos_[idx + n2] > rel, "static_batch_seq: predecessor not rightmost");
    }
    answers[order[orig]] = static_cast<i64>(in_chunk + counts_.prefix(a, chunk));
  }
}

std::vector<i64> static_batch_seq::batch_rank(const std::vector<query>& queries,
                                              batch_stats* stats) const {
  const u64 n = seq_->size();
  std::vector<i64> answers(queries.size(), -1);
  batch_stats local;
  batch_stats& st = stats ? *stats : local;
  if (stats) *stats = batch_stats{};

  if (info_.used == mode::small_alphabet) {
    for (std::size_t k = 0; k < queries.size(); ++k) {
      const auto& q = queries[k];
      if (q.symbol >= sigma_ || q.pos >= n) {
        ++st.out_of_range;
        continue;
      }
      answers[k] = static_cast<i64>(plain_.rank(q.symbol, static_cast<i64>(q.pos)));
    }
    return answers;
  }

  // Distribute valid queries to chunks (counting sort by chunk index).
  std::vector<u32> chunk_of(queries.size());
  std::vector<u32> count(chunks_ + 1, 0);
  for (std::size_t k = 0; k < queries.size(); ++k) {
    const auto& q = queries[k];
    if (q.symbol >= sigma_ || q.pos >= n) {
      chunk_of[k] = static_cast<u32>(chunks_);  // park invalid queries
      ++st.out_of_range;
    } else {
      chunk_of[k] = static_cast<u32>(q.pos / chunk_size_);
    }
    ++count[chunk_of[k]];
  }
  std::vector<u32> offset(chunks_ + 2, 0);
  for (u64 c = 0; c <= chunks_; ++c) offset[c + 1] = offset[c] + count[c];
  std::vector<u32> order(queries.size());  // query indices grouped by chunk
  {
    std::vector<u32> cur(offset.begin(), offset.end() - 1);
    for (std::size_t k = 0; k < queries.size(); ++k)
      order[cur[chunk_of[k]]++] = static_cast<u32>(k);
  }

  std::vector<std::pair<u32, u32>> qs;  // (symbol << 16 | rel pos, slot)
  for (u64 c = 0; c < chunks_; ++c) {
    const u32 lo = offset[c], hi = offset[c + 1];
    if (lo == hi) continue;
    qs.clear();
    qs.reserve(hi - lo);
    for (u32 t = lo; t < hi; ++t) {
      const auto& q = queries[order[t]];
      const u32 rel = static_cast<u32>(q.pos - c * chunk_size_);
      qs.emplace_back(q.symbol << 16 | rel, t);
    }
    chunk_batch(c, qs, order, answers, st);
  }
  return answers;
}

}  // namespace textidx
