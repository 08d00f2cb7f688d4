#include "textidx/batch_dynamic.hpp"

#include <algorithm>

namespace textidx {

// --------------------------------------------------------- block_rank_table

block_rank_table::block_rank_table(u32 sigma, u32 block_cap)
    : sigma_(sigma), cap_(block_cap) {
  TI_REQUIRE(sigma >= 1 && block_cap >= 1, "block_rank_table: bad parameters");
  const u64 limit = u64{1} << 24;
  u64 codes = 1;
  for (u32 j = 0; j < cap_; ++j) {
    if (codes > limit / sigma_) return;  // table would be too large
    codes *= sigma_;
  }
  if (codes > limit / sigma_ / cap_) return;
  const u64 total = codes * sigma_ * cap_;
  tbl_.assign(total, 0);
  std::vector<u32> syms(cap_);
  for (u64 code = 0; code < codes; ++code) {
    u64 rest = code;
    for (u32 j = 0; j < cap_; ++j) {
      syms[j] = static_cast<u32>(rest % sigma_);
      rest /= sigma_;
    }
    for (u32 a = 0; a < sigma_; ++a) {
      u8 run = 0;
      for (u32 i = 0; i < cap_; ++i) {
        run = static_cast<u8>(run + (syms[i] == a));
        tbl_[(code * sigma_ + a) * cap_ + i] = run;
      }
    }
  }
  avail_ = true;
}

u64 block_rank_table::code_of(const u32* syms, u32 len) const {
  u64 code = 0;
  u64 mul = 1;
  for (u32 j = 0; j < len; ++j) {
    code += syms[j] * mul;
    mul *= sigma_;
  }
  return code;
}

// ------------------------------------------------------------- construction

dyn_batch_seq::dyn_batch_seq(const std::vector<u32>& seq, u32 sigma,
                             u64 capacity_hint)
    : sigma_(sigma) {
  TI_REQUIRE(sigma_ >= 1 && sigma_ <= (u32{1} << 24),
             "dyn_batch_seq: alphabet size out of range");
  for (u32 v : seq)
    TI_REQUIRE(v < sigma_, "dyn_batch_seq: symbol out of range");
  const u64 hint = std::max({capacity_hint, static_cast<u64>(seq.size()),
                             u64{4}});
  universe_ = hint;
  const u64 lgn = floor_log2(hint);
  const u64 lgs = std::max<u64>(1, floor_log2(std::max<u32>(sigma_, 2)));
  cap_ = std::clamp<u64>(lgn / (4 * lgs), 1, 16);
  half_ = std::max<u64>(1, cap_ / 2);
  group_cap_ = std::max<u64>(4, lgn * lgn);
  tbl_ = block_rank_table(sigma_, static_cast<u32>(cap_));
  size_ = seq.size();
  if (size_ > 0) build_chunks(seq.data(), size_);
  rebuild_globals();
  for (const auto& c : chunks_) initial_blocks_ += c.blocks.size();
}

void dyn_batch_seq::build_chunks(const u32* data, u64 len) {
  chunks_.clear();
  const u64 target = chunk_target_ * sigma_;
  const u64 k = std::max<u64>(1, ceil_div(len, target));
  const u64 base = len / k;
  const u64 rem = len % k;
  u64 off = 0;
  chunks_.reserve(k);
  for (u64 p = 0; p < k; ++p) {
    const u64 sz = base + (p < rem ? 1 : 0);
    chunks_.push_back(build_chunk(data + off, sz));
    off += sz;
  }
  TI_CHECK(off == len, "dyn_batch_seq: chunk partition drift");
}

dyn_batch_seq::chunk dyn_batch_seq::build_chunk(const u32* data,
                                                u64 len) const {
  TI_CHECK(len >= 1 && len <= 4 * u64{sigma_} + cap_,
           "dyn_batch_seq: bad chunk length");
  chunk c;
  c.total = len;
  c.counts.assign(sigma_, 0);
  const u32 nblocks = static_cast<u32>(ceil_div(len, half_));
  c.blocks.assign(nblocks, block_rec{});
  c.syms.assign(u64{nblocks} * cap_, 0);
  c.pair_of.assign(u64{nblocks} * cap_, npos);
  c.head = 0;
  for (u32 b = 0; b < nblocks; ++b) {
    const u64 off = u64{b} * half_;
    auto& blk = c.blocks[b];
    blk.size = static_cast<u32>(std::min(half_, len - off));
    blk.psize = static_cast<u32>(off);
    blk.next = b + 1 < nblocks ? b + 1 : npos;
    std::copy(data + off, data + off + blk.size,
              c.syms.begin() + u64{b} * cap_);
  }
  // Label universe: generous headroom, but initial labels (and the append
  // ladder) must stay clear of the tail sentinel at 2^63.
  const u64 uni = std::min<u64>(std::max<u64>(universe_, nblocks),
                                (u64{1} << 61) / (u64{nblocks} + 2));
  c.labels = labeled_list(nblocks, std::max<u64>(uni, 1));
  u32 h = c.labels.first();
  for (u32 b = 0; b < nblocks; ++b) {
    c.blocks[b].label_handle = h;
    h = c.labels.next(h);
  }
  // One pair per stored symbol, ids in position order, then grouped per
  // symbol by a stable sort (which keeps position order within a symbol).
  c.pairs.reserve(len);
  std::vector<std::pair<u32, u32>> occ;  // (symbol, pair id)
  occ.reserve(len);
  for (u64 i = 0; i < len; ++i) {
    const u32 b = static_cast<u32>(i / half_);
    const u32 id = static_cast<u32>(i);
    c.pairs.push_back({data[i], b});
    c.pair_of[u64{b} * cap_ + (i - u64{b} * half_)] = id;
    c.counts[data[i]] += 1;
    occ.push_back({data[i], id});
  }
  lsd_radix_sort(occ, [](const std::pair<u32, u32>& o) { return u64{o.first}; });
  for (u64 i = 0; i < occ.size();) {
    const u32 a = occ[i].first;
    u64 j = i;
    while (j < occ.size() && occ[j].first == a) ++j;
    sym_entry se;
    se.symbol = a;
    u64 before = 0;
    for (u64 g0 = i; g0 < j; g0 += group_cap_) {
      group g;
      g.before = before;
      const u64 ge = std::min(j, g0 + group_cap_);
      g.ids.reserve(ge - g0);
      for (u64 t = g0; t < ge; ++t) g.ids.push_back(occ[t].second);
      before += g.ids.size();
      se.groups.push_back(std::move(g));
    }
    c.group_total += se.groups.size();
    c.dir.push_back(std::move(se));
    i = j;
  }
  return c;
}

void dyn_batch_seq::rebuild_globals() {
  chunk_start_.assign(chunks_.size() + 1, 0);
  for (std::size_t i = 0; i < chunks_.size(); ++i)
    chunk_start_[i + 1] = chunk_start_[i] + chunks_[i].total;
  TI_CHECK(chunk_start_.back() == size_, "dyn_batch_seq: size drift");
  if (chunks_.empty()) {
    counts_ = chunk_counts();
    return;
  }
  chunk_counts::builder cb(sigma_, chunks_.size());
  for (u32 a = 0; a < sigma_; ++a)
    for (const auto& c : chunks_) cb.add(c.counts[a]);
  counts_ = cb.build();
}

// ------------------------------------------------------------------ queries

u32 dyn_batch_seq::block_rank1(const chunk& c, u32 b, u32 symbol,
                               u32 offset) const {
  const u32* s = c.syms.data() + u64{b} * cap_;
  u32 r = 0;
  for (u32 i = 0; i <= offset; ++i) r += s[i] == symbol;
  return r;
}

void dyn_batch_seq::rank_in_chunk(const chunk& c, std::vector<qrec>& qs,
                                  std::vector<i64>& out,
                                  batch_stats& st) const {
  if (qs.empty()) return;
  ++st.chunk_batches;
  if (qs.size() < 64) {
    std::sort(qs.begin(), qs.end(),
              [](const qrec& x, const qrec& y) { return x.rel < y.rel; });
  } else {
    lsd_radix_sort(qs, [](const qrec& q) { return u64{q.rel}; });
  }
  struct mrec {
    u64 label;
    u32 sym;
    u32 r1;
    u32 slot;
  };
  std::vector<mrec> ms;
  ms.reserve(qs.size());
  const bool use_tbl = tbl_.available();
  u32 b = c.head;
  u64 code = 0;
  bool have_code = false;
  for (const qrec& q : qs) {
    while (c.blocks[b].psize + c.blocks[b].size <= q.rel) {
      b = c.blocks[b].next;
      TI_CHECK(b != npos, "dyn_batch_seq: query beyond chunk");
      have_code = false;
    }
    const u32 off = q.rel - c.blocks[b].psize;
    u32 r1;
    if (use_tbl) {
      if (!have_code) {
        code = tbl_.code_of(c.syms.data() + u64{b} * cap_, c.blocks[b].size);
        have_code = true;
      }
      r1 = tbl_.rank(code, q.sym, off);
    } else {
      r1 = block_rank1(c, b, q.sym, off);
    }
    ms.push_back({block_label(c, b), q.sym, r1, q.slot});
  }
  // Group by symbol; position order within each symbol keeps block labels
  // non-decreasing, which the merge below relies on.
  if (ms.size() < 64) {
    std::sort(ms.begin(), ms.end(), [](const mrec& x, const mrec& y) {
      return x.sym != y.sym ? x.sym < y.sym : x.label < y.label;
    });
  } else {
    lsd_radix_sort(ms, [](const mrec& m) { return u64{m.sym}; });
  }
  st.merge_bound += c.group_total + c.dir.size() + ms.size();
  std::size_t di = 0;
  std::size_t i = 0;
  while (i < ms.size()) {
    const u32 a = ms[i].sym;
    while (di < c.dir.size() && c.dir[di].symbol < a) {
      ++di;
      ++st.merge_steps;
    }
    const sym_entry* se =
        di < c.dir.size() && c.dir[di].symbol == a ? &c.dir[di] : nullptr;
    std::size_t gp = 0;  // groups whose first pair sits strictly below label
    for (; i < ms.size() && ms[i].sym == a; ++i) {
      u64 r2 = 0;
      u64 r3 = 0;
      if (se) {
        while (gp < se->groups.size() &&
               pair_label(c, se->groups[gp].ids.front()) < ms[i].label) {
          ++gp;
          ++st.merge_steps;
        }
        if (gp > 0) {
          // Rightmost group starting strictly below the query block's label:
          // everything before it lies in earlier blocks; within it, count
          // pairs whose block label stays strictly below (pairs with equal
          // label live in the query block and are already counted by r1).
          const group& g = se->groups[gp - 1];
          r2 = g.before;
          u64 lo = 0;
          u64 hi = g.ids.size();
          while (lo < hi) {
            const u64 mid = (lo + hi) / 2;
            ++st.probes;
            if (pair_label(c, g.ids[mid]) < ms[i].label)
              lo = mid + 1;
            else
              hi = mid;
          }
          r3 = lo;
        }
      }
      out[ms[i].slot] = static_cast<i64>(ms[i].r1 + r2 + r3);
    }
  }
}

std::vector<i64> dyn_batch_seq::batch_rank(const std::vector<query>& queries,
                                           batch_stats* stats) const {
  if (stats) *stats = batch_stats{};
  batch_stats local;
  batch_stats& st = stats ? *stats : local;
  std::vector<i64> answers(queries.size(), -1);
  if (queries.empty()) return answers;

  const u64 nchunks = chunks_.size();
  std::vector<u32> chunk_of(queries.size());
  std::vector<u32> count(nchunks + 1, 0);  // last bucket collects invalid
  for (std::size_t k = 0; k < queries.size(); ++k) {
    const auto& q = queries[k];
    if (q.symbol >= sigma_ || q.pos >= size_) {
      chunk_of[k] = static_cast<u32>(nchunks);
      ++st.out_of_range;
    } else {
      const auto it =
          std::upper_bound(chunk_start_.begin(), chunk_start_.end(), q.pos);
      chunk_of[k] = static_cast<u32>((it - chunk_start_.begin()) - 1);
    }
    ++count[chunk_of[k]];
  }
  std::vector<u32> offset(nchunks + 2, 0);
  for (u64 ci = 0; ci <= nchunks; ++ci) offset[ci + 1] = offset[ci] + count[ci];
  std::vector<u32> order(queries.size());
  {
    std::vector<u32> cur(offset.begin(), offset.end() - 1);
    for (std::size_t k = 0; k < queries.size(); ++k)
      order[cur[chunk_of[k]]++] = static_cast<u32>(k);
  }
  std::vector<qrec> qs;
  for (u64 ci = 0; ci < nchunks; ++ci) {
    const u32 lo = offset[ci];
    const u32 hi = offset[ci + 1];
    if (lo == hi) continue;
    qs.clear();
    qs.reserve(hi - lo);
    for (u32 t = lo; t < hi; ++t) {
      const auto& q = queries[order[t]];
      qs.push_back(
          {static_cast<u32>(q.pos - chunk_start_[ci]), q.symbol, order[t]});
    }
    rank_in_chunk(chunks_[ci], qs, answers, st);
    for (u32 t = lo; t < hi; ++t) {
      const auto& q = queries[order[t]];
      answers[order[t]] += static_cast<i64>(counts_.prefix(q.symbol, ci));
    }
  }
  return answers;
}

// --------------------------------------------------------------- insertions

void dyn_batch_seq::batch_insert(const std::vector<insert_op>& batch) {
  if (batch.empty()) return;
  const u64 m = batch.size();
  for (u64 k = 0; k < m; ++k) {
    TI_REQUIRE(batch[k].symbol < sigma_,
               "dyn_batch_seq: insert symbol out of range");
    TI_REQUIRE(k == 0 || batch[k].pos > batch[k - 1].pos,
               "dyn_batch_seq: insert positions must be strictly increasing");
    TI_REQUIRE(batch[k].pos >= k && batch[k].pos - k <= size_,
               "dyn_batch_seq: insert position out of range");
  }
  life_.inserted += m;
  if (chunks_.empty()) {
    // Positions into an empty sequence are necessarily 0..m-1.
    std::vector<u32> content(m);
    for (u64 k = 0; k < m; ++k) content[k] = batch[k].symbol;
    size_ = m;
    build_chunks(content.data(), m);
    rebuild_globals();
    return;
  }

  // Pre-insertion positions q = pos - k are non-decreasing, so each chunk's
  // share of the batch is one contiguous run.
  std::vector<std::pair<std::size_t, std::vector<chunk>>> replacements;
  std::vector<ins_rec> ins;
  u64 k = 0;
  for (std::size_t ci = 0; ci < chunks_.size(); ++ci) {
    const u64 lo = chunk_start_[ci];
    const u64 hi = chunk_start_[ci + 1];
    const bool last = ci + 1 == chunks_.size();
    ins.clear();
    while (k < m) {
      const u64 q = batch[k].pos - k;
      if (q > hi || (q == hi && !last)) break;
      ins.push_back({q - lo, batch[k].symbol, static_cast<u32>(ins.size())});
      ++k;
    }
    if (ins.empty()) continue;
    std::vector<chunk> repl;
    insert_in_chunk(chunks_[ci], ins, repl);
    if (!repl.empty()) replacements.emplace_back(ci, std::move(repl));
  }
  TI_CHECK(k == m, "dyn_batch_seq: unrouted inserts");
  size_ += m;
  if (!replacements.empty()) {
    std::vector<chunk> next;
    next.reserve(chunks_.size() + replacements.size());
    std::size_t ri = 0;
    for (std::size_t ci = 0; ci < chunks_.size(); ++ci) {
      if (ri < replacements.size() && replacements[ri].first == ci) {
        for (auto& piece : replacements[ri].second)
          next.push_back(std::move(piece));
        ++ri;
      } else {
        next.push_back(std::move(chunks_[ci]));
      }
    }
    chunks_ = std::move(next);
  }
  rebuild_globals();
}

void dyn_batch_seq::insert_in_chunk(chunk& c, std::vector<ins_rec>& ins,
                                    std::vector<chunk>& replacement) {
  const u32 t = static_cast<u32>(ins.size());

  // Phase A: inclusive rank of each insertion point in the untouched chunk;
  // old_rank[id] counts occurrences of the inserted symbol strictly before
  // its pre-insertion position, which fixes its slot in the symbol's groups.
  std::vector<i64> old_rank(t, 0);
  {
    std::vector<qrec> qs;
    qs.reserve(t);
    for (const auto& r : ins)
      if (r.q > 0) qs.push_back({static_cast<u32>(r.q - 1), r.sym, r.id});
    batch_stats st;
    rank_in_chunk(c, qs, old_rank, st);
  }

  // Phase A2: route the run to blocks while the old layout is still intact.
  struct run_rec {
    u32 block;
    u32 lo;
    u32 hi;  // ins[lo, hi) lands in `block`
  };
  std::vector<run_rec> runs;
  {
    u32 b = c.head;
    u32 i = 0;
    while (i < t) {
      while (c.blocks[b].psize + c.blocks[b].size <= ins[i].q &&
             c.blocks[b].next != npos)
        b = c.blocks[b].next;
      u32 j = i;
      if (c.blocks[b].next == npos) {
        j = t;  // last block absorbs everything up to an append
      } else {
        const u64 lim = u64{c.blocks[b].psize} + c.blocks[b].size;
        while (j < t && ins[j].q < lim) ++j;
      }
      runs.push_back({b, i, j});
      i = j;
    }
  }

  // Phase B: rebuild each touched block; oversized results split into even
  // pieces of at least half_ symbols, so every new block pays for itself.
  struct placement {
    u32 block;
    u32 slot;
  };
  std::vector<placement> placed(t);
  std::vector<u32> preds;         // label predecessors, list order
  std::vector<u32> fresh_blocks;  // aligned with preds
  std::vector<u32> ns, np, nid;
  for (const run_rec& r : runs) {
    const u32 b = r.block;
    const u32 base_psize = c.blocks[b].psize;
    const u32 bsize = c.blocks[b].size;
    ns.clear();
    np.clear();
    nid.clear();
    const u32* olds = c.syms.data() + u64{b} * cap_;
    const u32* oldp = c.pair_of.data() + u64{b} * cap_;
    u32 ii = r.lo;
    for (u32 o = 0; o <= bsize; ++o) {
      while (ii < r.hi && ins[ii].q - base_psize == o) {
        ns.push_back(ins[ii].sym);
        np.push_back(npos);
        nid.push_back(ins[ii].id);
        ++ii;
      }
      if (o < bsize) {
        ns.push_back(olds[o]);
        np.push_back(oldp[o]);
        nid.push_back(npos);
      }
    }
    TI_CHECK(ii == r.hi, "dyn_batch_seq: block merge missed inserts");
    const u64 s = ns.size();
    if (s <= cap_) {
      c.blocks[b].size = static_cast<u32>(s);
      std::copy(ns.begin(), ns.end(), c.syms.begin() + u64{b} * cap_);
      std::copy(np.begin(), np.end(), c.pair_of.begin() + u64{b} * cap_);
      for (u64 x = 0; x < s; ++x)
        if (nid[x] != npos) placed[nid[x]] = {b, static_cast<u32>(x)};
      continue;
    }
    const u64 pieces = ceil_div(s, cap_);
    const u64 base = s / pieces;
    const u64 rem = s % pieces;
    ++life_.block_splits;
    life_.new_blocks += pieces - 1;
    const u32 pred_handle = c.blocks[b].label_handle;
    const u32 old_next = c.blocks[b].next;
    u64 off = 0;
    u32 prev_piece = npos;
    for (u64 p = 0; p < pieces; ++p) {
      const u64 psz = base + (p < rem ? 1 : 0);
      u32 pb;
      if (p == 0) {
        pb = b;  // first piece reuses the block and keeps its label
      } else {
        pb = static_cast<u32>(c.blocks.size());
        c.blocks.push_back(block_rec{});
        c.syms.resize(c.syms.size() + cap_, 0);
        c.pair_of.resize(c.pair_of.size() + cap_, npos);
        preds.push_back(pred_handle);
        fresh_blocks.push_back(pb);
        c.blocks[prev_piece].next = pb;
      }
      c.blocks[pb].size = static_cast<u32>(psz);
      if (p + 1 == pieces) c.blocks[pb].next = old_next;
      std::copy(ns.begin() + off, ns.begin() + off + psz,
                c.syms.begin() + u64{pb} * cap_);
      std::copy(np.begin() + off, np.begin() + off + psz,
                c.pair_of.begin() + u64{pb} * cap_);
      for (u64 x = 0; x < psz; ++x) {
        if (nid[off + x] != npos)
          placed[nid[off + x]] = {pb, static_cast<u32>(x)};
        else
          c.pairs[np[off + x]].block = pb;  // pair follows its moved symbol
      }
      off += psz;
      prev_piece = pb;
    }
  }

  // Phase B2: one label batch per chunk; predecessors were collected in list
  // order, so the labeled_list sees a non-decreasing batch.
  if (!preds.empty()) {
    const auto res = c.labels.batch_insert(preds);
    for (std::size_t x = 0; x < fresh_blocks.size(); ++x)
      c.blocks[fresh_blocks[x]].label_handle = res.new_handles[x];
    life_.relabeled += res.relabeled_old;
    if (res.reinitialized) ++life_.label_reinits;
  }

  // Phase B3: recompute prefix sizes along the list.
  {
    u64 total = 0;
    for (u32 b = c.head; b != npos; b = c.blocks[b].next) {
      c.blocks[b].psize = static_cast<u32>(total);
      total += c.blocks[b].size;
    }
    c.total = total;
  }

  // Phase D: an oversized chunk is rebuilt from scratch into even pieces of
  // roughly 2 sigma symbols; its pair/group state is discarded wholesale.
  if (c.total > 4 * u64{sigma_}) {
    ++life_.chunk_splits;
    std::vector<u32> content;
    content.reserve(c.total);
    for (u32 b = c.head; b != npos; b = c.blocks[b].next) {
      const u32* s = c.syms.data() + u64{b} * cap_;
      content.insert(content.end(), s, s + c.blocks[b].size);
    }
    const u64 pieces = std::max<u64>(2, c.total / (2 * u64{sigma_}));
    const u64 base = c.total / pieces;
    const u64 rem = c.total % pieces;
    u64 off = 0;
    for (u64 p = 0; p < pieces; ++p) {
      const u64 sz = base + (p < rem ? 1 : 0);
      replacement.push_back(build_chunk(content.data() + off, sz));
      off += sz;
    }
    return;
  }

  // Phase C: allocate pairs for the inserted symbols and splice their ids
  // into the per-symbol groups at the offsets fixed by Phase A.
  struct pend_rec {
    u32 sym;
    u64 r;   // occurrences of sym strictly before the insertion point
    u32 pr;  // new pair id
  };
  std::vector<pend_rec> pend;
  pend.reserve(t);
  for (u32 id = 0; id < t; ++id) {
    const u32 pr = static_cast<u32>(c.pairs.size());
    c.pairs.push_back({ins[id].sym, placed[id].block});
    c.pair_of[u64{placed[id].block} * cap_ + placed[id].slot] = pr;
    c.counts[ins[id].sym] += 1;
    pend.push_back({ins[id].sym, static_cast<u64>(old_rank[id]), pr});
  }
  lsd_radix_sort(pend, [](const pend_rec& p) { return u64{p.sym}; });
  std::vector<sym_entry> added;  // symbols new to this chunk, sorted
  std::size_t di = 0;
  std::vector<u32> nids;
  for (std::size_t x = 0; x < pend.size();) {
    const u32 a = pend[x].sym;
    std::size_t y = x;
    while (y < pend.size() && pend[y].sym == a) ++y;
    while (di < c.dir.size() && c.dir[di].symbol < a) ++di;
    if (di == c.dir.size() || c.dir[di].symbol != a) {
      sym_entry se;
      se.symbol = a;
      u64 before = 0;
      for (std::size_t g0 = x; g0 < y; g0 += group_cap_) {
        group g;
        g.before = before;
        const std::size_t ge = std::min(y, g0 + group_cap_);
        g.ids.reserve(ge - g0);
        for (std::size_t z = g0; z < ge; ++z) g.ids.push_back(pend[z].pr);
        before += g.ids.size();
        se.groups.push_back(std::move(g));
      }
      c.group_total += se.groups.size();
      added.push_back(std::move(se));
      x = y;
      continue;
    }
    sym_entry& se = c.dir[di];
    // Pending entries are sorted by r within the symbol, so each group's
    // share is a contiguous range; splice while the original prefix counts
    // are still in place, then renormalize.
    std::size_t z = x;
    for (std::size_t gi = 0; gi < se.groups.size() && z < y; ++gi) {
      group& g = se.groups[gi];
      const bool lastg = gi + 1 == se.groups.size();
      const u64 lim = g.before + g.ids.size();
      std::size_t z2 = z;
      while (z2 < y && (lastg || pend[z2].r < lim)) ++z2;
      if (z2 == z) continue;
      nids.clear();
      nids.reserve(g.ids.size() + (z2 - z));
      std::size_t p = z;
      for (u64 o = 0; o <= g.ids.size(); ++o) {
        while (p < z2 && pend[p].r - g.before == o) nids.push_back(pend[p++].pr);
        if (o < g.ids.size()) nids.push_back(g.ids[o]);
      }
      TI_CHECK(p == z2, "dyn_batch_seq: group splice missed pairs");
      g.ids.assign(nids.begin(), nids.end());
      z = z2;
    }
    TI_CHECK(z == y, "dyn_batch_seq: pending pairs unplaced");
    std::vector<group> ngroups;
    ngroups.reserve(se.groups.size());
    u64 before = 0;
    for (auto& g : se.groups) {
      if (g.ids.size() <= 2 * group_cap_) {
        g.before = before;
        before += g.ids.size();
        ngroups.push_back(std::move(g));
        continue;
      }
      ++life_.group_splits;
      const u64 pieces = ceil_div(g.ids.size(), group_cap_);
      const u64 base = g.ids.size() / pieces;
      const u64 rem = g.ids.size() % pieces;
      u64 off = 0;
      for (u64 p = 0; p < pieces; ++p) {
        const u64 gs = base + (p < rem ? 1 : 0);
        group h;
        h.before = before;
        h.ids.assign(g.ids.begin() + off, g.ids.begin() + off + gs);
        before += gs;
        off += gs;
        ngroups.push_back(std::move(h));
      }
    }
    c.group_total += ngroups.size() - se.groups.size();
    se.groups = std::move(ngroups);
    x = y;
  }
  if (!added.empty()) {
    std::vector<sym_entry> ndir;
    ndir.reserve(c.dir.size() + added.size());
    std::size_t ai = 0;
    for (auto& e : c.dir) {
      while (ai < added.size() && added[ai].symbol < e.symbol)
        ndir.push_back(std::move(added[ai++]));
      ndir.push_back(std::move(e));
    }
    while (ai < added.size()) ndir.push_back(std::move(added[ai++]));
    c.dir = std::move(ndir);
  }
}

// ------------------------------------------------------------------ support

std::vector<u32> dyn_batch_seq::readout() const {
  std::vector<u32> out;
  out.reserve(size_);
  for (const auto& c : chunks_) {
    for (u32 b = c.head; b != npos; b = c.blocks[b].next) {
      const u32* s = c.syms.data() + u64{b} * cap_;
      out.insert(out.end(), s, s + c.blocks[b].size);
    }
  }
  return out;
}

void dyn_batch_seq::check_invariants() const {
  TI_CHECK(chunk_start_.size() == chunks_.size() + 1,
           "dyn_batch_seq: chunk offset table wrong size");
  u64 total = 0;
  for (std::size_t ci = 0; ci < chunks_.size(); ++ci) {
    const chunk& c = chunks_[ci];
    TI_CHECK(chunk_start_[ci] == total, "dyn_batch_seq: chunk offsets drift");
    TI_CHECK(c.total >= 1 && c.total <= 4 * u64{sigma_},
             "dyn_batch_seq: chunk size out of range");
    TI_CHECK(c.syms.size() == c.blocks.size() * cap_ &&
                 c.pair_of.size() == c.blocks.size() * cap_,
             "dyn_batch_seq: slab size mismatch");
    TI_CHECK(c.counts.size() == sigma_, "dyn_batch_seq: counts size wrong");
    std::vector<std::pair<u32, u32>> occ;  // (symbol, pair id), position order
    occ.reserve(c.total);
    u64 run = 0;
    u64 nb = 0;
    u64 last_label = 0;
    for (u32 b = c.head; b != npos; b = c.blocks[b].next) {
      const auto& blk = c.blocks[b];
      TI_CHECK(blk.size >= 1 && blk.size <= cap_,
               "dyn_batch_seq: block size out of range");
      TI_CHECK(blk.psize == run, "dyn_batch_seq: block prefix size wrong");
      const u64 lab = block_label(c, b);
      TI_CHECK(nb == 0 || lab > last_label,
               "dyn_batch_seq: block labels not increasing");
      last_label = lab;
      ++nb;
      u64 code = 0;
      if (tbl_.available())
        code = tbl_.code_of(c.syms.data() + u64{b} * cap_, blk.size);
      for (u32 o = 0; o < blk.size; ++o) {
        const u32 sym = c.syms[u64{b} * cap_ + o];
        const u32 pid = c.pair_of[u64{b} * cap_ + o];
        TI_CHECK(sym < sigma_, "dyn_batch_seq: stored symbol out of range");
        TI_CHECK(pid != npos && pid < c.pairs.size(),
                 "dyn_batch_seq: missing pair id");
        TI_CHECK(c.pairs[pid].symbol == sym && c.pairs[pid].block == b,
                 "dyn_batch_seq: pair back-reference broken");
        if (tbl_.available())
          TI_CHECK(tbl_.rank(code, sym, o) == block_rank1(c, b, sym, o),
                   "dyn_batch_seq: rank table disagrees with scan");
        occ.push_back({sym, pid});
      }
      run += blk.size;
    }
    TI_CHECK(run == c.total, "dyn_batch_seq: chunk total wrong");
    TI_CHECK(nb == c.blocks.size(), "dyn_batch_seq: unreachable blocks");
    TI_CHECK(occ.size() == c.pairs.size(), "dyn_batch_seq: pair count wrong");
    std::vector<char> seen(c.pairs.size(), 0);
    for (const auto& o : occ) {
      TI_CHECK(!seen[o.second], "dyn_batch_seq: pair referenced twice");
      seen[o.second] = 1;
    }
    lsd_radix_sort(occ,
                   [](const std::pair<u32, u32>& o) { return u64{o.first}; });
    std::size_t oi = 0;
    u64 gt = 0;
    u32 prev_sym = 0;
    bool first_sym = true;
    for (const auto& se : c.dir) {
      TI_CHECK(first_sym || se.symbol > prev_sym,
               "dyn_batch_seq: directory not sorted");
      first_sym = false;
      prev_sym = se.symbol;
      TI_CHECK(!se.groups.empty(), "dyn_batch_seq: empty symbol entry");
      u64 before = 0;
      u64 last_lab = 0;
      bool first_pair = true;
      for (const auto& g : se.groups) {
        TI_CHECK(!g.ids.empty(), "dyn_batch_seq: empty group");
        TI_CHECK(g.ids.size() <= 2 * group_cap_,
                 "dyn_batch_seq: oversized group");
        TI_CHECK(g.before == before, "dyn_batch_seq: group prefix wrong");
        for (u32 id : g.ids) {
          TI_CHECK(oi < occ.size() && occ[oi].first == se.symbol &&
                       occ[oi].second == id,
                   "dyn_batch_seq: group contents out of order");
          const u64 lab = pair_label(c, id);
          TI_CHECK(first_pair || lab >= last_lab,
                   "dyn_batch_seq: group labels decrease");
          first_pair = false;
          last_lab = lab;
          ++oi;
        }
        before += g.ids.size();
        ++gt;
      }
      TI_CHECK(c.counts[se.symbol] == before,
               "dyn_batch_seq: symbol count wrong");
    }
    TI_CHECK(oi == occ.size(), "dyn_batch_seq: pairs missing from groups");
    TI_CHECK(gt == c.group_total, "dyn_batch_seq: group total wrong");
    u64 cs = 0;
    for (u32 a = 0; a < sigma_; ++a) cs += c.counts[a];
    TI_CHECK(cs == c.total, "dyn_batch_seq: counts do not sum to chunk size");
    total += c.total;
  }
  TI_CHECK(total == size_, "dyn_batch_seq: sequence size wrong");
  if (!chunks_.empty()) {
    for (u32 a = 0; a < sigma_; ++a) {
      u64 running = 0;
      for (std::size_t ci = 0; ci < chunks_.size(); ++ci) {
        TI_CHECK(counts_.prefix(a, ci) == running,
                 "dyn_batch_seq: global prefix counts wrong");
        running += chunks_[ci].counts[a];
      }
      TI_CHECK(counts_.total(a) == running,
               "dyn_batch_seq: global totals wrong");
    }
  }
}

}  // namespace textidx
