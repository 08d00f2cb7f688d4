#include "textidx/bwt.hpp"

#include <algorithm>
#include <utility>

namespace textidx {

namespace {

// Induced sorting: one L-type left-to-right pass then one S-type
// right-to-left pass over partially filled sa.
void sa_induce(const u32* s, i64 n, u64 sigma, const std::vector<u8>& stype,
               const std::vector<u32>& cnt, std::vector<u64>& bkt,
               std::vector<i64>& sa) {
  {
    u64 x = 0;
    for (u64 a = 0; a < sigma; ++a) {
      bkt[a] = x;
      x += cnt[a];
    }
  }
  for (i64 k = 0; k < n; ++k) {
    const i64 j = sa[k] - 1;
    if (sa[k] > 0 && !stype[j]) sa[bkt[s[j]]++] = j;
  }
  {
    u64 x = 0;
    for (u64 a = 0; a < sigma; ++a) {
      x += cnt[a];
      bkt[a] = x;
    }
  }
  for (i64 k = n - 1; k >= 0; --k) {
    const i64 j = sa[k] - 1;
    if (sa[k] > 0 && stype[j]) sa[--bkt[s[j]]] = j;
  }
}

// SA-IS over an integer alphabet; s[n-1] must be the unique minimum.
std::vector<i64> sais(const u32* s, i64 n, u64 sigma) {
  std::vector<i64> sa(n, -1);
  if (n == 1) {
    sa[0] = 0;
    return sa;
  }
  std::vector<u8> stype(n);
  stype[n - 1] = 1;
  for (i64 i = n - 2; i >= 0; --i)
    stype[i] = s[i] < s[i + 1] || (s[i] == s[i + 1] && stype[i + 1]);
  auto is_lms = [&](i64 i) { return i > 0 && stype[i] && !stype[i - 1]; };

  std::vector<u32> cnt(sigma, 0);
  for (i64 i = 0; i < n; ++i) ++cnt[s[i]];
  std::vector<u64> bkt(sigma);

  // Round 1: seed LMS suffixes in arbitrary order, induce to sort the LMS
  // substrings.
  {
    u64 x = 0;
    for (u64 a = 0; a < sigma; ++a) {
      x += cnt[a];
      bkt[a] = x;
    }
  }
  for (i64 i = n - 1; i >= 1; --i)
    if (is_lms(i)) sa[--bkt[s[i]]] = i;
  sa_induce(s, n, sigma, stype, cnt, bkt, sa);

  std::vector<i64> lms_sorted;
  for (i64 k = 0; k < n; ++k)
    if (sa[k] > 0 && is_lms(sa[k])) lms_sorted.push_back(sa[k]);
  const i64 nl = static_cast<i64>(lms_sorted.size());

  // Name LMS substrings in sorted order. Two substrings are equal iff their
  // symbols match through simultaneous next-LMS boundaries; the unique
  // terminal minimum guarantees every comparison stops in range.
  std::vector<u32> name(n, 0);
  u32 names = 0;
  i64 prev = -1;
  for (i64 x = 0; x < nl; ++x) {
    const i64 cur = lms_sorted[x];
    bool same = false;
    if (prev >= 0) {
      same = true;
      for (i64 d = 0;; ++d) {
        if (s[cur + d] != s[prev + d]) {
          same = false;
          break;
        }
        const bool cl = d > 0 && is_lms(cur + d);
        const bool pl = d > 0 && is_lms(prev + d);
        if (cl || pl) {
          same = cl && pl;
          break;
        }
      }
    }
    if (!same) ++names;
    name[cur] = names - 1;
    prev = cur;
  }

  std::vector<u32> red;
  std::vector<i64> pos;
  red.reserve(nl);
  pos.reserve(nl);
  for (i64 i = 1; i < n; ++i)
    if (is_lms(i)) {
      red.push_back(name[i]);
      pos.push_back(i);
    }
  if (static_cast<i64>(names) < nl) {
    const auto rsa = sais(red.data(), nl, names);
    for (i64 x = 0; x < nl; ++x) lms_sorted[x] = pos[rsa[x]];
  } else {
    for (i64 x = 0; x < nl; ++x) lms_sorted[red[x]] = pos[x];
  }

  // Round 2: seed LMS suffixes in sorted order, induce the final array.
  std::fill(sa.begin(), sa.end(), -1);
  {
    u64 x = 0;
    for (u64 a = 0; a < sigma; ++a) {
      x += cnt[a];
      bkt[a] = x;
    }
  }
  for (i64 x = nl - 1; x >= 0; --x) {
    const i64 i = lms_sorted[x];
    sa[--bkt[s[i]]] = i;
  }
  sa_induce(s, n, sigma, stype, cnt, bkt, sa);
  return sa;
}

std::vector<u32> bwt_from_sa(const std::vector<u32>& t,
                             const std::vector<u32>& sa) {
  const u64 n = t.size();
  std::vector<u32> out(n);
  for (u64 k = 0; k < n; ++k) out[k] = t[sa[k] == 0 ? n - 1 : sa[k] - 1];
  return out;
}

}  // namespace

std::vector<u32> linear_suffix_array(const std::vector<u32>& seq) {
  const u64 n = seq.size();
  TI_REQUIRE(n >= 1, "linear_suffix_array: empty sequence");
  TI_REQUIRE(n < (u64{1} << 31), "linear_suffix_array: sequence too long");
  u32 mx = 0;
  for (u32 c : seq) mx = std::max(mx, c);
  TI_REQUIRE(mx < (u32{1} << 28), "linear_suffix_array: alphabet not rank-reduced");
  const u32 last = seq.back();
  for (u64 i = 0; i + 1 < n; ++i)
    TI_REQUIRE(seq[i] > last,
               "linear_suffix_array: last symbol must be the unique minimum");
  const auto sa = sais(seq.data(), static_cast<i64>(n), u64{mx} + 1);
  return std::vector<u32>(sa.begin(), sa.end());
}

padded_text pad_for_slices(const std::vector<u32>& text, u32 sigma,
                           u64 delta) {
  const u64 n = text.size();
  TI_REQUIRE(n >= 2 && delta >= 2, "pad_for_slices: bad arguments");
  TI_REQUIRE(text.back() == 0, "pad_for_slices: missing terminal sentinel");
  for (u64 i = 0; i + 1 < n; ++i)
    TI_REQUIRE(text[i] >= 1 && text[i] < sigma,
               "pad_for_slices: symbol out of range");
  const u64 pad = delta + (delta - n % delta) % delta;
  padded_text out;
  out.pad = pad;
  out.delta = delta;
  out.sigma = sigma + static_cast<u32>(pad);
  out.text.reserve(n + pad);
  for (u32 c : text) out.text.push_back(c + static_cast<u32>(pad));
  for (u64 t = 1; t <= pad; ++t)
    out.text.push_back(static_cast<u32>(pad - t));
  return out;
}

slice_bwt_builder::slice_bwt_builder(padded_text pt)
    : n_(pt.text.size()),
      delta_(pt.delta),
      pad_(pt.pad),
      sigma_(pt.sigma) {
  TI_REQUIRE(delta_ >= 2 && n_ % delta_ == 0 && n_ / delta_ >= 2,
             "slice_bwt_builder: bad padded text");
  TI_REQUIRE(pad_ >= delta_, "slice_bwt_builder: padding too short");
  m_ = n_ / delta_;
  doubled_ = std::move(pt.text);
  doubled_.reserve(n_ + delta_);
  for (u64 d = 0; d < delta_; ++d) doubled_.push_back(doubled_[d]);
}

void slice_bwt_builder::rebuild_acc() {
  acc_.assign(sigma_ + 1, 0);
  for (u32 a = 0; a < sigma_; ++a) acc_[a + 1] = acc_[a] + cnt_[a];
}

// Sorted suffixes of the meta-symbol text U . R, where U is the padded text
// rotated right by one and R the padded text rotated right by `rot`, both cut
// into m_ meta-symbols of delta_ symbols. Returns meta indices in suffix
// order: index x < m_ is U's meta x, otherwise R's meta x - m_.
std::vector<u32> slice_bwt_builder::meta_suffix_order(u64 rot) const {
  const u64 m2 = 2 * m_;
  std::vector<u64> start(m2);
  for (u64 x = 0; x < m_; ++x) start[x] = (x * delta_ + n_ - 1) % n_;
  for (u64 x = 0; x < m_; ++x) start[m_ + x] = (x * delta_ + n_ - rot) % n_;

  // Sort the 2m meta-symbols (delta-grams of the doubled text). When a gram
  // packs into one word, a single radix sort over packed keys keeps the work
  // O(m); otherwise fall back to delta stable counting passes.
  std::vector<u32> idx(m2);
  for (u64 t = 0; t < m2; ++t) idx[t] = static_cast<u32>(t);
  const u32 bits = std::max<u32>(1, static_cast<u32>(ceil_log2(sigma_)));
  if (u64{bits} * delta_ <= 64) {
    std::vector<std::pair<u64, u32>> keyed(m2);
    for (u64 t = 0; t < m2; ++t) {
      u64 key = 0;
      const u64 st = start[t];
      for (u64 d = 0; d < delta_; ++d) key = key << bits | doubled_[st + d];
      keyed[t] = {key, static_cast<u32>(t)};
    }
    lsd_radix_sort(keyed, [](const std::pair<u64, u32>& k) { return k.first; });
    for (u64 t = 0; t < m2; ++t) idx[t] = keyed[t].second;
  } else {
    std::vector<u32> tmp(m2);
    std::vector<u64> bucket(u64{sigma_} + 1);
    for (u64 p = delta_; p-- > 0;) {
      std::fill(bucket.begin(), bucket.end(), 0);
      for (u64 t = 0; t < m2; ++t) ++bucket[doubled_[start[idx[t]] + p]];
      u64 x = 0;
      for (u64 a = 0; a <= sigma_; ++a) {
        const u64 c = bucket[a];
        bucket[a] = x;
        x += c;
      }
      for (u64 t = 0; t < m2; ++t)
        tmp[bucket[doubled_[start[idx[t]] + p]]++] = idx[t];
      idx.swap(tmp);
    }
  }

  // Rank-rename the grams, then build the meta string with a fresh minimal
  // sentinel appended so induced sorting applies.
  std::vector<u32> meta(m2 + 1);
  u32 rk = 0;
  meta[idx[0]] = 1;
  for (u64 t = 1; t < m2; ++t) {
    const u64 a = start[idx[t - 1]];
    const u64 b = start[idx[t]];
    for (u64 d = 0; d < delta_; ++d)
      if (doubled_[a + d] != doubled_[b + d]) {
        ++rk;
        break;
      }
    meta[idx[t]] = rk + 1;
  }
  meta[m2] = 0;

  const auto sa = linear_suffix_array(meta);
  TI_CHECK(sa[0] == m2, "meta suffix order: sentinel misplaced");
  return std::vector<u32>(sa.begin() + 1, sa.end());
}

void slice_bwt_builder::run_steps01() {
  TI_CHECK(next_ == 0, "slice steps must run in order");
  const auto order = meta_suffix_order(2);

  // The meta correspondence covers classes 0 and 1 except the two rotation
  // wrap-arounds (meta 0 of either part) and, symmetrically, the two
  // shortest suffixes. Those suffixes start with the two smallest sentinels
  // and therefore lead the sorted list.
  std::vector<u32> content;
  content.reserve(2 * m_);
  w_.assign(m_, 0);
  content.push_back(preceding(n_ - 1));
  w_[m_ - 1] = 1;
  content.push_back(preceding(n_ - 2));
  for (u32 x : order) {
    if (x == 0 || x == m_) continue;
    if (x < m_) {
      content.push_back(preceding(u64{x} * delta_ - 1));
    } else {
      const u64 i = x - m_;
      w_[i - 1] = static_cast<u32>(content.size());
      content.push_back(preceding(i * delta_ - 2));
    }
  }
  TI_CHECK(content.size() == 2 * m_, "classes 0-1 merged the wrong count");

  b_ = dyn_batch_seq(content, sigma_, n_);
  cnt_.assign(sigma_, 0);
  for (u32 c : content) ++cnt_[c];
  rebuild_acc();
  next_ = 2;
}

void slice_bwt_builder::run_step(u32 j) {
  TI_CHECK(j == next_ && j >= 2 && j < delta_, "slice steps must run in order");

  // Rank the class-j first symbols at the stored positions of their
  // class-(j-1) tails.
  std::vector<dyn_batch_seq::query> qs(m_);
  for (u64 i = 1; i <= m_; ++i) {
    const u64 k = i * delta_ - j - 1;
    qs[i - 1] = {doubled_[k], w_[i - 1]};
  }
  const auto rs = b_.batch_rank(qs);

  // Count, for every class-j suffix, the smaller class-0 suffixes by merging
  // through the meta suffix order of U . rotate(j + 1).
  const auto order = meta_suffix_order(j + 1);
  std::vector<u64> q(m_, 0);
  u64 seen0 = 1;  // the shortest suffix is smaller than every other one
  for (u32 x : order) {
    if (x == 0 || x == m_) continue;
    if (x < m_) {
      ++seen0;
    } else {
      q[u64{x} - m_ - 1] = seen0;
    }
  }
  // The unrepresented class-j suffix starts inside the sentinel run, where
  // first symbols are distinct, so one-symbol comparisons place it.
  {
    u64 qq = 0;
    const u32 own = doubled_[n_ - j - 1];
    for (u64 i = m_; i >= 1; --i) {
      const u64 k = i * delta_ - 1;
      if (doubled_[k] > pad_) break;  // left the sentinel zone
      if (doubled_[k] < own) ++qq;
    }
    q[m_ - 1] = qq;
  }

  std::vector<dyn_batch_seq::insert_op> ops(m_);
  for (u64 i = 1; i <= m_; ++i) {
    const u64 k = i * delta_ - j - 1;
    const u32 a = doubled_[k];
    TI_CHECK(rs[i - 1] >= 1, "slice step: rank query failed");
    const u64 final_pos = acc_[a] + static_cast<u64>(rs[i - 1]) + q[i - 1] - 1;
    ops[i - 1] = {final_pos, preceding(k)};
    w_[i - 1] = static_cast<u32>(final_pos);
  }
  lsd_radix_sort(ops, [](const dyn_batch_seq::insert_op& o) { return o.pos; });
  b_.batch_insert(ops);

  for (const auto& op : ops) ++cnt_[op.symbol];
  rebuild_acc();
  next_ = j + 1;
}

std::vector<u32> slice_bwt_builder::run_remaining(bwt_trace* trace) {
  if (next_ == 0) {
    run_steps01();
    if (trace) trace->steps.push_back({1, 2 * m_, b_.size()});
  }
  for (u32 j = next_; j < delta_; ++j) {
    run_step(j);
    if (trace) trace->steps.push_back({j, m_, b_.size()});
  }
  TI_CHECK(b_.size() == n_, "slice pipeline finished short");
  return b_.readout();
}

std::vector<u32> slice_bwt_builder::current() const { return b_.readout(); }

std::vector<u32> build_bwt(const std::vector<u32>& text, u32 sigma,
                           bwt_trace* trace) {
  const u64 n = text.size();
  TI_REQUIRE(n >= 1, "build_bwt: empty text");
  TI_REQUIRE(n < (u64{1} << 31), "build_bwt: text too long");
  TI_REQUIRE(sigma >= 1 && sigma <= (1u << 24), "build_bwt: bad alphabet size");
  TI_REQUIRE(text.back() == 0, "build_bwt: missing terminal sentinel");
  for (u64 i = 0; i + 1 < n; ++i)
    TI_REQUIRE(text[i] >= 1 && text[i] < sigma,
               "build_bwt: symbol out of range");

  // delta = floor(log_sigma n); the slice pipeline pays off only when at
  // least four classes exist (sigma <= n^{1/4}), otherwise the suffix array
  // is built directly.
  u64 delta = 0;
  if (sigma >= 2) {
    u64 p = 1;
    while (p <= n / sigma) {
      p *= sigma;
      ++delta;
    }
  }
  if (trace) *trace = bwt_trace{};

  if (delta < 4) {
    return bwt_from_sa(text, linear_suffix_array(text));
  }

  auto pt = pad_for_slices(text, sigma, delta);
  const u64 pad = pt.pad;
  if (trace) {
    trace->sliced = true;
    trace->delta = delta;
    trace->pad = pad;
    trace->padded_n = pt.text.size();
    trace->padded_sigma = pt.sigma;
  }
  slice_bwt_builder sb(std::move(pt));
  const auto padded = sb.run_remaining(trace);

  // The padding suffixes are the pad smallest and each is preceded by the
  // next sentinel up, so the transform of the original text is the tail with
  // symbols shifted back down. The single 0 entry wraps for the full-text
  // suffix and stays 0, the original sentinel's value.
  for (u64 t = 0; t + 1 < pad; ++t)
    TI_CHECK(padded[t] == t + 1, "padding entries out of place");
  TI_CHECK(padded[pad - 1] == pad, "padding entries out of place");
  std::vector<u32> out;
  out.reserve(n);
  for (u64 k = pad; k < padded.size(); ++k) {
    const u32 c = padded[k];
    out.push_back(c == 0 ? 0 : c - static_cast<u32>(pad));
  }
  return out;
}

}  // namespace textidx
