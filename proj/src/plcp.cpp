// Permuted LCP construction. Stage 1 fixes one anchor value per spacing_
// positions with bounded suffix comparisons and threads an interval-pair
// chain through the anchors so each one also gets the exact state of its
// predecessor-shared prefix. Stage 2 runs one job per anchor gap, filling
// positions left to right; a job extends its factor one symbol at a time and
// every general rank it needs is parked in a pool that is flushed as one
// batch exactly when it reaches capacity. Stage 3 finishes the positions of
// jobs abandoned when too few remained to keep batches full.

#include "textidx/plcp.hpp"

#include <algorithm>
#include <deque>

namespace textidx {

namespace {

constexpr u32 kUnknown = 0xFFFFFFFFu;

// Job phases. A paused job holds exactly one outstanding pooled query; the
// flush that answers it bumps WAIT_* to the matching HAVE_* and requeues it.
enum : u8 {
  PH_INIT = 0,     // start the group's next position
  PH_STEP = 1,     // start one extension step
  PH_WAIT_L = 2,   // child lookup rank pooled on the label sequence
  PH_HAVE_L = 3,
  PH_WAIT_B1 = 4,  // first reverse-transform rank
  PH_HAVE_B1 = 5,
  PH_WAIT_B2 = 6,  // second reverse-transform rank
  PH_HAVE_B2 = 7,
  PH_DONE = 8,
};

}  // namespace

u64 plcp_anchor_spacing(u64 n, u32 sigma) {
  if (n <= 1) return 1;
  const u64 s = std::max<u64>(sigma, 2);
  u64 delta = 0;
  for (u64 p = 1; p <= n / s; p *= s) ++delta;
  if (delta == 0) delta = 1;
  const u64 inner = ceil_log2(std::max<u64>(s, 4));      // >= 2
  const u64 outer = std::max<u64>(ceil_log2(inner), 1);  // >= 1
  return delta * outer;
}

plcp_builder::plcp_builder(const std::vector<u32>& text,
                           const suffix_topology& topo,
                           const suffix_topology& rtopo, u64 pool_capacity)
    : text_(text), topo_(topo), rtopo_(rtopo) {
  n_ = text.size();
  sigma_ = topo.sigma();
  TI_REQUIRE(n_ >= 1, "plcp_builder: empty text");
  TI_REQUIRE(n_ <= 0xFFFFFFFFull, "plcp_builder: text too long");
  TI_REQUIRE(text[n_ - 1] == 0, "plcp_builder: text must end with 0");
  TI_REQUIRE(topo.size() == n_ && rtopo.size() == n_ && rtopo.sigma() == sigma_,
             "plcp_builder: topologies do not match the text");
  spacing_ = plcp_anchor_spacing(n_, sigma_);
  const u64 lg = std::max<u32>(floor_log2(std::max<u64>(n_, 2)), 1);
  cap_ = pool_capacity ? pool_capacity : std::max<u64>(n_ / (lg * lg), 1);
  gs_b_ = general_seq(topo.bwt(), sigma_);
  gs_rb_ = general_seq(rtopo.bwt(), sigma_);
  batch_rb_ = static_batch_seq(rtopo.bwt(), sigma_);
  // Concatenate every internal node's child edge symbols in parenthesis
  // order; a rank/select pair on this sequence resolves child-by-symbol.
  const u64 ni = topo.internal_count();
  std::vector<u32> lab;
  label_off_.assign(ni + 1, 0);
  for (u64 t = 0; t < ni; ++t) {
    const auto cv = topo.children_by_rank(t);
    label_off_[t] = lab.size();
    lab.insert(lab.end(), cv.labels, cv.labels + cv.count);
  }
  label_off_[ni] = lab.size();
  labels_ = make_shared_seq(std::move(lab));
  gs_l_ = general_seq(labels_, sigma_);
  batch_l_ = static_batch_seq(labels_, sigma_);
}

u64 plcp_builder::psi(u64 row, u32 c) const {
  const alphabet_stats& acc = topo_.acc();
  TI_REQUIRE(c < sigma_, "plcp_builder::psi: symbol out of range");
  TI_REQUIRE(row >= acc.acc(c) && row < acc.acc(c + 1),
             "plcp_builder::psi: row not in the symbol's bucket");
  return gs_b_.select(c, row - acc.acc(c) + 1);
}

u64 plcp_builder::lf(u64 row) const {
  TI_REQUIRE(row < n_, "plcp_builder::lf: row out of range");
  const u32 a = (*topo_.bwt())[row];
  return topo_.acc().acc(a) + topo_.partial()->rank(row) - 1;
}

interval_pair plcp_builder::contract_left(const interval_pair& s, u64 len,
                                          u32 c) const {
  if (len <= 1) return {0, n_ - 1, 0, n_ - 1};
  const alphabet_stats& acc = topo_.acc();
  TI_REQUIRE(c < sigma_, "contract_left: symbol out of range");
  TI_REQUIRE(s.fl < s.fr && s.fr < n_ && s.rl < s.rr && s.rr < n_ &&
                 s.fr - s.fl == s.rr - s.rl,
             "contract_left: not a repeated-factor interval pair");
  TI_REQUIRE(s.fl >= acc.acc(c) && s.fr < acc.acc(c + 1),
             "contract_left: interval not inside the symbol's bucket");
  // Forward: push the extreme rows one position ahead and take their lca.
  const u64 lrow = gs_b_.select(c, s.fl - acc.acc(c) + 1);
  const u64 rrow = gs_b_.select(c, s.fr - acc.acc(c) + 1);
  const u64 x = topo_.tree().lca(topo_.leaf_node(lrow), topo_.leaf_node(rrow));
  const auto [fl, fr] = topo_.interval(x);
  // Reverse: unchanged when c is the only symbol preceding the contracted
  // factor, otherwise one parent jump on the reverse tree.
  if (topo_.distinct().is_uniform_range(fl, fr)) {
    TI_CHECK((*topo_.bwt())[fl] == c, "contract_left: unexpected preceder");
    return {fl, fr, s.rl, s.rr};
  }
  const u64 y = rtopo_.node_of(s.rl, s.rr);
  const i64 py = rtopo_.tree().parent(y);
  TI_CHECK(py >= 0, "contract_left: reverse locus has no parent");
  const auto [rl, rr] = rtopo_.interval(static_cast<u64>(py));
  return {fl, fr, rl, rr};
}

bool plcp_builder::extend_right(interval_pair& s, u32 a) const {
  TI_REQUIRE(a >= 1 && a < sigma_, "extend_right: content symbol required");
  TI_REQUIRE(s.fl <= s.fr && s.fr < n_ && s.rl <= s.rr && s.rr < n_ &&
                 s.fr - s.fl == s.rr - s.rl,
             "extend_right: not a factor interval pair");
  const alphabet_stats& racc = rtopo_.acc();
  if (rtopo_.distinct().is_uniform_range(s.rl, s.rr)) {
    // Every occurrence is followed by the same symbol.
    if ((*rtopo_.bwt())[s.rl] != a) return false;
    const partial_rank_index& pr = *rtopo_.partial();
    s.rl = racc.acc(a) + pr.rank(s.rl) - 1;
    s.rr = racc.acc(a) + pr.rank(s.rr) - 1;
    return true;
  }
  // Distinct followers make the factor right-maximal, so its forward
  // interval is a node; descend along the a-edge if there is one.
  const u64 x = topo_.node_of(s.fl, s.fr);
  const i64 ci = topo_.child_index(x, a);
  if (ci < 0) return false;
  const suffix_topology::children_view cv = topo_.children(x);
  const auto [fl, fr] = topo_.child_interval(cv, static_cast<u32>(ci));
  const u64 t1 = gs_rb_.rank(a, static_cast<i64>(s.rl) - 1);
  const u64 t2 = gs_rb_.rank(a, static_cast<i64>(s.rr));
  TI_CHECK(t2 > t1 && t2 - t1 == fr - fl + 1,
           "extend_right: forward and reverse counts disagree");
  s.fl = fl;
  s.fr = fr;
  s.rl = racc.acc(a) + t1;
  s.rr = racc.acc(a) + t2 - 1;
  return true;
}

void plcp_builder::stage1(std::vector<u32>& out, const std::vector<u64>& row_of,
                          const bit_vector& marks,
                          const std::vector<u32>& mark_pos,
                          std::vector<interval_pair>& seeds,
                          plcp_stats& st) const {
  const u64 A = row_of.size();
  const node_marking mk(topo_);
  const weiner_link_index rwl(rtopo_);
  interval_pair cur{0, n_ - 1, 0, n_ - 1};
  u64 curlen = 0;
  u64 prev_l = 0;
  for (u64 j = 0; j < A; ++j) {
    const u64 f = j * spacing_;
    const u64 rf = row_of[j];
    u64 len = 0;
    if (rf != 0) {
      // Walk the predecessor row back to an anchored row to learn which
      // suffix it is, then compare symbols from a safe starting offset.
      u64 q = rf - 1;
      u64 steps = 0;
      while (!marks.get(q)) {
        q = lf(q);
        ++steps;
        TI_CHECK(steps <= spacing_, "stage1: predecessor walk too long");
      }
      const u64 fp = static_cast<u64>(mark_pos[marks.rank1(q)]) + steps;
      TI_CHECK(fp < n_ && fp != f, "stage1: bad predecessor position");
      len = prev_l > spacing_ ? prev_l - spacing_ : 0;
      for (;;) {
        TI_CHECK(f + len < n_ && fp + len < n_,
                 "stage1: comparison out of range");
        if (text_[f + len] != text_[fp + len]) break;
        ++len;
        ++st.stage1_scan;
      }
    }
    out[f] = static_cast<u32>(len);
    // Maintain the interval pair of the anchor's shared prefix: contract off
    // the symbols between consecutive anchors, then extend to the new length.
    if (j > 0) {
      for (u64 t = 0; t < spacing_; ++t) {
        cur = contract_left(cur, curlen, text_[(j - 1) * spacing_ + t]);
        if (curlen) --curlen;
        ++st.chain_contracts;
      }
    }
    TI_CHECK(len >= curlen, "stage1: anchor value below the carried prefix");
    if (len > curlen) {
      const u64 cnt = len - curlen;
      const u64 applied = extend_right_run(topo_, mk, rtopo_, rwl, cur,
                                           text_.data() + f + curlen, cnt);
      TI_CHECK(applied == cnt, "stage1: anchor prefix failed to extend");
      st.chain_extends += cnt;
    }
    curlen = len;
    seeds[j] = cur;
    prev_l = len;
  }
}

struct plcp_builder::job {
  u64 r;                     // row of suffix pos
  u64 fl, fr, rl, rr;        // exact pair of the committed factor
  u64 flen;                  // committed factor length
  u64 tfl, tfr;              // candidate forward interval of the extension
  u64 xoff;                  // first label slot of the pending locus
  u64 xrank;                 // internal rank of the pending locus
  u64 t1;                    // first pooled reverse rank
  u64 ans;                   // delivered pooled answer
  u32 pos, last;             // current and final position of the group
  u32 ell;                   // value of pos - 1
  u32 a;                     // pending extension symbol
  u8 phase;
};

void plcp_builder::stage2(std::vector<u32>& out, const std::vector<u64>& row_of,
                          const std::vector<interval_pair>& seeds,
                          plcp_stats& st) const {
  const u64 A = row_of.size();
  std::vector<job> jobs;
  jobs.reserve(A);
  for (u64 j = 0; j < A; ++j) {
    const u64 f = j * spacing_;
    const u64 first = f + 1;
    const u64 last = std::min(f + spacing_ - 1, n_ - 1);
    if (first > last) continue;
    job J{};
    J.pos = static_cast<u32>(first);
    J.last = static_cast<u32>(last);
    J.ell = out[f];
    J.r = row_of[j];
    J.fl = seeds[j].fl;
    J.fr = seeds[j].fr;
    J.rl = seeds[j].rl;
    J.rr = seeds[j].rr;
    J.phase = PH_INIT;
    jobs.push_back(J);
  }
  st.jobs_spawned = jobs.size();
  const u64 threshold = 2 * cap_;
  if (jobs.size() < threshold) {
    // Too few jobs to ever fill a batch; leave everything to stage 3.
    st.jobs_abandoned = jobs.size();
    return;
  }
  st.live_peak = jobs.size();
  u64 live = jobs.size();
  std::deque<u32> runq;
  for (u32 i = 0; i < jobs.size(); ++i) runq.push_back(i);

  struct pool {
    std::vector<static_batch_seq::query> q;
    std::vector<u32> owner;
  };
  pool pl, pb;

  auto flush = [&](pool& p, const static_batch_seq& sb, u64& flushes) {
    if (p.q.empty()) return;
    ++flushes;
    st.pool_peak = std::max<u64>(st.pool_peak, p.q.size());
    if (p.q.size() == 1) ++st.singleton_flushes;
    if (p.q.size() < cap_) ++st.undersized_flushes;
    const std::vector<i64> ans = sb.batch_rank(p.q);
    for (u64 i = 0; i < ans.size(); ++i) {
      TI_CHECK(ans[i] >= 0, "stage2: pooled query rejected");
      job& J = jobs[p.owner[i]];
      TI_CHECK(J.phase == PH_WAIT_L || J.phase == PH_WAIT_B1 ||
                   J.phase == PH_WAIT_B2,
               "stage2: answer delivered to a job that is not waiting");
      J.ans = static_cast<u64>(ans[i]);
      ++J.phase;  // WAIT_* -> HAVE_*
      runq.push_back(p.owner[i]);
    }
    p.q.clear();
    p.owner.clear();
  };
  auto submit = [&](pool& p, const static_batch_seq& sb, u64& flushes,
                    u64& pooled, u32 ji, u32 a, u64 pos) {
    p.q.push_back({a, pos});
    p.owner.push_back(ji);
    ++pooled;
    if (p.q.size() >= cap_) flush(p, sb, flushes);
  };
  auto settle = [&](job& J) {
    out[J.pos] = static_cast<u32>(J.flen);
    ++st.stage2_values;
    J.ell = static_cast<u32>(J.flen);
    ++J.pos;
    J.phase = PH_INIT;
  };

  auto advance = [&](u32 ji) {
    job& J = jobs[ji];
    for (;;) {
      switch (J.phase) {
        case PH_INIT: {
          if (J.pos > J.last) {
            J.phase = PH_DONE;
            --live;
            ++st.jobs_finished;
            return;
          }
          const u64 pos = J.pos;
          const u32 c = text_[pos - 1];
          J.r = psi(J.r, c);
          const interval_pair q =
              contract_left({J.fl, J.fr, J.rl, J.rr}, J.ell, c);
          J.fl = q.fl;
          J.fr = q.fr;
          J.rl = q.rl;
          J.rr = q.rr;
          J.flen = J.ell ? static_cast<u64>(J.ell) - 1 : 0;
          if (J.r == 0) {
            // Smallest suffix: nothing precedes it, the value is 0.
            out[pos] = 0;
            ++st.stage2_values;
            J.ell = 0;
            J.fl = 0;
            J.fr = n_ - 1;
            J.rl = 0;
            J.rr = n_ - 1;
            J.flen = 0;
            ++J.pos;
            break;
          }
          TI_CHECK(J.fl < J.r && J.r <= J.fr,
                   "stage2: suffix row outside the carried interval");
          J.phase = PH_STEP;
          break;
        }
        case PH_STEP: {
          const u64 apos = static_cast<u64>(J.pos) + J.flen;
          TI_CHECK(apos < n_, "stage2: extension beyond the text");
          const u32 a = text_[apos];
          if (a == 0) {
            // The next symbol is the sentinel, so the extended factor would
            // occur only here: the shared prefix ends at flen.
            settle(J);
            break;
          }
          if (rtopo_.distinct().is_uniform_range(J.rl, J.rr)) {
            // Single follower: the forward interval stays put and the
            // reverse side moves with two constant-time partial ranks.
            TI_CHECK((*rtopo_.bwt())[J.rl] == a,
                     "stage2: uniform follower differs from the text");
            const partial_rank_index& pr = *rtopo_.partial();
            const u64 base = rtopo_.acc().acc(a);
            J.rl = base + pr.rank(J.rl) - 1;
            J.rr = base + pr.rank(J.rr) - 1;
            ++J.flen;
            ++st.uniform_steps;
            break;
          }
          ++st.child_steps;
          J.a = a;
          const u64 x = topo_.node_of(J.fl, J.fr);
          J.xrank = topo_.tree().internal_rank(x);
          J.xoff = label_off_[J.xrank];
          if (J.xoff == 0) {
            J.ans = 0;
            J.phase = PH_HAVE_L;
            break;
          }
          J.phase = PH_WAIT_L;
          submit(pl, batch_l_, st.flushes_l, st.pooled_l, ji, a, J.xoff - 1);
          return;
        }
        case PH_HAVE_L: {
          const u64 p1 = J.ans;  // a-labels before the locus's slice
          TI_CHECK(p1 < gs_l_.count(J.a),
                   "stage2: no child edge with the text symbol");
          const u64 p2 = gs_l_.select(J.a, p1 + 1);
          const suffix_topology::children_view cv =
              topo_.children_by_rank(J.xrank);
          TI_CHECK(p2 >= J.xoff && p2 < J.xoff + cv.count,
                   "stage2: text symbol is not a child edge of the locus");
          const auto [tfl, tfr] =
              topo_.child_interval(cv, static_cast<u32>(p2 - J.xoff));
          if (tfl == J.r) {
            // This suffix is the first row of the extended interval, so the
            // predecessor stops sharing here: the value is settled and the
            // committed pair already holds the exact shared prefix.
            settle(J);
            break;
          }
          TI_CHECK(tfl < J.r && J.r <= tfr,
                   "stage2: suffix row escaped the extended interval");
          J.tfl = tfl;
          J.tfr = tfr;
          if (J.rl == 0) {
            J.ans = 0;
            J.phase = PH_HAVE_B1;
            break;
          }
          J.phase = PH_WAIT_B1;
          submit(pb, batch_rb_, st.flushes_b, st.pooled_b, ji, J.a, J.rl - 1);
          return;
        }
        case PH_HAVE_B1: {
          J.t1 = J.ans;
          J.phase = PH_WAIT_B2;
          submit(pb, batch_rb_, st.flushes_b, st.pooled_b, ji, J.a, J.rr);
          return;
        }
        case PH_HAVE_B2: {
          const u64 t2 = J.ans;
          TI_CHECK(t2 > J.t1 && t2 - J.t1 == J.tfr - J.tfl + 1,
                   "stage2: forward and reverse counts disagree");
          const u64 base = rtopo_.acc().acc(J.a);
          J.fl = J.tfl;
          J.fr = J.tfr;
          J.rl = base + J.t1;
          J.rr = base + t2 - 1;
          ++J.flen;
          J.phase = PH_STEP;
          break;
        }
        default:
          TI_CHECK(false, "stage2: dispatched a job that is not runnable");
      }
    }
  };

  // With live >= 2*capacity jobs and at most capacity-1 queries pending per
  // pool, some live job is always runnable; once live drops below the
  // threshold batches could no longer fill, so the rest is abandoned to
  // stage 3 and pending queries are dropped.
  while (live >= threshold) {
    TI_CHECK(!runq.empty(), "stage2: live jobs but none runnable");
    const u32 ji = runq.front();
    runq.pop_front();
    ++st.sched_steps;
    advance(ji);
  }
  for (const job& J : jobs)
    if (J.phase != PH_DONE) ++st.jobs_abandoned;
}

void plcp_builder::stage3(std::vector<u32>& out, const std::vector<u64>& row_of,
                          const bit_vector& marks,
                          const std::vector<u32>& mark_pos,
                          plcp_stats& st) const {
  u64 prev_pos = n_;  // position whose row we carry (n_ = none yet)
  u64 prev_row = 0;
  for (u64 k = 0; k < n_; ++k) {
    if (out[k] != kUnknown) continue;
    TI_CHECK(k > 0 && out[k - 1] != kUnknown, "stage3: left neighbour unknown");
    ++st.stage3_values;
    // Row of suffix k: one step from the previous position when consecutive,
    // otherwise walk forward from the group's anchor row.
    u64 r;
    if (prev_pos + 1 == k) {
      r = psi(prev_row, text_[k - 1]);
    } else {
      const u64 j = k / spacing_;
      r = row_of[j];
      for (u64 p = j * spacing_; p < k; ++p) r = psi(r, text_[p]);
    }
    prev_pos = k;
    prev_row = r;
    if (r == 0) {
      out[k] = 0;
      continue;
    }
    u64 q = r - 1;
    u64 steps = 0;
    while (!marks.get(q)) {
      q = lf(q);
      ++steps;
      TI_CHECK(steps <= spacing_, "stage3: predecessor walk too long");
    }
    const u64 fp = static_cast<u64>(mark_pos[marks.rank1(q)]) + steps;
    TI_CHECK(fp < n_ && fp != k, "stage3: bad predecessor position");
    const u32 prev_l = out[k - 1];
    u64 len = prev_l ? static_cast<u64>(prev_l) - 1 : 0;
    for (;;) {
      TI_CHECK(k + len < n_ && fp + len < n_, "stage3: comparison out of range");
      if (text_[k + len] != text_[fp + len]) break;
      ++len;
      ++st.stage3_scan;
    }
    out[k] = static_cast<u32>(len);
  }
}

std::vector<u32> plcp_builder::run(plcp_stats* stats) {
  plcp_stats st;
  st.spacing = spacing_;
  st.capacity = cap_;
  std::vector<u32> out(n_, kUnknown);
  if (n_ == 1) {
    out[0] = 0;
    st.anchors = 1;
    if (stats) *stats = st;
    return out;
  }
  // Anchor rows: one backward walk records the row of every anchored suffix,
  // then those rows are marked so a row can be traced back to its position.
  const u64 A = ceil_div(n_, spacing_);
  st.anchors = A;
  std::vector<u64> row_of(A);
  {
    u64 row = 0;  // row of the sentinel suffix, position n-1
    for (u64 pos = n_; pos-- > 0;) {
      if (pos % spacing_ == 0) row_of[pos / spacing_] = row;
      if (pos) row = lf(row);
    }
  }
  bit_vector marks;
  std::vector<u32> mark_pos(A);
  {
    std::vector<bool> mb(n_, false);
    for (u64 j = 0; j < A; ++j) mb[row_of[j]] = true;
    marks = bit_vector(mb);
    for (u64 j = 0; j < A; ++j)
      mark_pos[marks.rank1(row_of[j])] = static_cast<u32>(j * spacing_);
  }
  std::vector<interval_pair> seeds(A);
  stage1(out, row_of, marks, mark_pos, seeds, st);
  stage2(out, row_of, seeds, st);
  stage3(out, row_of, marks, mark_pos, st);
  TI_CHECK(st.anchors + st.stage2_values + st.stage3_values == n_,
           "plcp: stage accounting mismatch");
  for (u64 i = 0; i < n_; ++i)
    TI_CHECK(out[i] != kUnknown, "plcp: position left unfilled");
  u64 prev = 0;
  for (u64 i = 0; i < n_; ++i) {
    if (i + 1 < n_)
      TI_CHECK(out[i] <= static_cast<u64>(out[i + 1]) + 1,
               "plcp: successive values drop by more than 1");
    if (out[i] > prev) st.sum_inc += out[i] - prev;
    prev = out[i];
  }
  const u64 lg = std::max<u32>(floor_log2(n_), 1);
  TI_CHECK(st.stage3_values * lg <= 2 * n_,
           "plcp: stage-3 remainder exceeds its budget");
  if (stats) *stats = st;
  return out;
}

std::vector<u32> build_plcp(const std::vector<u32>& text,
                            const suffix_topology& topo,
                            const suffix_topology& rtopo, plcp_stats* stats) {
  plcp_builder b(text, topo, rtopo);
  return b.run(stats);
}

plcp_bits::plcp_bits(const std::vector<u32>& plcp) : n_(plcp.size()) {
  bit_vector::builder bb;
  u64 at = 0;
  for (u64 i = 0; i < n_; ++i) {
    if (i)
      TI_REQUIRE(static_cast<u64>(plcp[i]) + 1 >= plcp[i - 1],
                 "plcp_bits: successive values drop by more than 1");
    const u64 s = static_cast<u64>(plcp[i]) + 2 * i;
    bb.append_run(false, s - at);
    bb.push_back(true);
    at = s + 1;
  }
  bits_ = bb.build();
}

u32 plcp_bits::get(u64 i) const {
  TI_REQUIRE(i < n_, "plcp_bits::get: index out of range");
  return static_cast<u32>(bits_.select1(i + 1) - 2 * i);
}

std::vector<u32> plcp_bits::decode() const {
  std::vector<u32> v(n_);
  for (u64 i = 0; i < n_; ++i) v[i] = get(i);
  return v;
}

}  // namespace textidx
