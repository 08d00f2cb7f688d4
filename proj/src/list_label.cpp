#include "textidx/list_label.hpp"

#include <algorithm>

namespace textidx {

namespace {
constexpr u64 pending_label = ~0ull;        // new element awaiting its label
constexpr u64 tail_label = 1ull << 63;      // above every assignable label
}  // namespace

labeled_list::labeled_list(u64 item_count, u64 universe_n)
    : universe_n_(universe_n) {
  TI_REQUIRE(item_count >= 1, "labeled_list: need at least one item");
  TI_REQUIRE(universe_n >= 1, "labeled_list: universe must be positive");
  nodes_.resize(item_count + 2);
  nodes_[head_handle] = {head_handle, item_count >= 1 ? 2u : tail_handle, 0};
  nodes_[tail_handle] = {static_cast<u32>(item_count + 1), tail_handle, tail_label};
  const u64 d0 = 4 * universe_n_;
  for (u64 i = 0; i < item_count; ++i) {
    const u32 h = static_cast<u32>(i + 2);
    nodes_[h].prev = i == 0 ? head_handle : h - 1;
    nodes_[h].next = i + 1 == item_count ? tail_handle : h + 1;
    nodes_[h].label = (i + 1) * d0;
  }
  size_ = item_count;
}

u32 labeled_list::handle_at(u64 k) const {
  TI_REQUIRE(k < size_, "labeled_list::handle_at out of range");
  u32 h = first();
  for (u64 i = 0; i < k; ++i) h = nodes_[h].next;
  return h;
}

u64 labeled_list::min_gap() const {
  // Over real elements plus the head; the tail bound is excluded.
  u64 best = ~0ull;
  u32 h = head_handle;
  while (nodes_[h].next != tail_handle) {
    const u32 nx = nodes_[h].next;
    best = std::min(best, nodes_[nx].label - nodes_[h].label);
    h = nx;
  }
  return best;
}

void labeled_list::reinitialize() {
  universe_n_ = std::max(universe_n_, size_);
  const u64 d0 = 4 * universe_n_;
  u64 i = 0;
  for (u32 h = first(); h != tail_handle; h = nodes_[h].next) {
    const u64 fresh = (++i) * d0;
    if (nodes_[h].label != pending_label && nodes_[h].label != fresh)
      ++relabel_total_;
    nodes_[h].label = fresh;
  }
  batch_count_ = 0;
}

void labeled_list::spread_interval(u32 start_h, u32 end_h, u64 old_count,
                                   u64 new_count, batch_result& out) {
  const u64 v = old_count + new_count;
  u64 gap;
  if (end_h == tail_handle) {
    // Open-ended interval at the end of the list: no upper neighbor to
    // respect, so continue the initial ladder. Relabels old elements walked
    // past (at most new_count of them) and keeps labels within the 4n * size
    // range.
    gap = 4 * universe_n_;
  } else {
    const u64 span = nodes_[end_h].label - nodes_[start_h].label;
    TI_CHECK(v >= 2, "labeled_list: interval too small to spread");
    gap = span / (v - 1);
  }
  TI_CHECK(gap >= 3, "labeled_list: label gap exhausted");
  u64 lab = nodes_[start_h].label;
  u32 h = start_h;
  u64 assigned = 1;  // start keeps its label
  while (h != end_h) {
    h = nodes_[h].next;
    if (h == tail_handle) break;
    lab += gap;
    ++assigned;
    if (nodes_[h].label != pending_label) {
      if (nodes_[h].label != lab) ++out.relabeled_old;
    }
    nodes_[h].label = lab;
  }
  TI_CHECK(assigned <= v, "labeled_list: interval walk overshot");
  out.intervals.push_back({old_count, new_count, gap, end_h == tail_handle});
}

labeled_list::batch_result labeled_list::batch_insert(
    const std::vector<u32>& preds) {
  batch_result out;
  if (preds.empty()) return out;
  const u64 m = preds.size();
  const u64 size_before = size_;

  // Validate predecessors: existing (non-pending, non-tail) and given in
  // non-decreasing list order.
  u64 prev_label = 0;
  bool first_pred = true;
  for (u32 p : preds) {
    TI_REQUIRE(p < nodes_.size() && p != tail_handle, "batch_insert: bad predecessor handle");
    TI_REQUIRE(nodes_[p].label != pending_label, "batch_insert: predecessor must pre-date the batch");
    TI_REQUIRE(first_pred || nodes_[p].label >= prev_label, "batch_insert: predecessors must be in list order");
    prev_label = nodes_[p].label;
    first_pred = false;
  }

  // Link all new elements (labels pending). Equal predecessors chain in
  // input order.
  out.new_handles.reserve(m);
  struct run {
    u32 pred;
    u64 count;
  };
  std::vector<run> runs;
  u32 chain_tail = 0;
  for (std::size_t k = 0; k < preds.size(); ++k) {
    const u32 after = (k > 0 && preds[k] == preds[k - 1]) ? chain_tail : preds[k];
    const u32 h = static_cast<u32>(nodes_.size());
    const u32 nx = nodes_[after].next;
    nodes_.push_back({after, nx, pending_label});
    nodes_[after].next = h;
    nodes_[nx].prev = h;
    out.new_handles.push_back(h);
    chain_tail = h;
    if (!runs.empty() && runs.back().pred == preds[k])
      ++runs.back().count;
    else
      runs.push_back({preds[k], 1});
  }
  size_ += m;
  insert_total_ += m;

  if (m > size_before) {
    // Batch dominates the list: merge and restart all labels.
    reinitialize();
    out.reinitialized = true;
    return out;
  }

  // Build disjoint covering intervals left to right. An interval starts at
  // the run's predecessor and grows rightward until (a) its endpoints are
  // old, (b) old >= new + 1 (so the spread gap is at least half the local
  // minimum gap), and (c) the spread gap stays >= 3. Hitting the list end
  // switches to the open-ended ladder. Runs overtaken by a previous
  // interval's walk are absorbed by it.
  struct ival {
    u32 start;
    u32 end;  // tail_handle marks an open-ended interval
    u64 old_count;
    u64 new_count;
  };
  std::vector<ival> intervals;
  u64 frontier_label = 0;
  bool have_frontier = false;
  bool reached_tail = false;
  for (const run& r : runs) {
    if (reached_tail) break;  // everything after was absorbed
    if (have_frontier && nodes_[r.pred].label < frontier_label)
      continue;  // absorbed by the previous interval's walk
    u32 start = r.pred;
    u32 h = r.pred;
    u64 old_count = 1, new_count = 0;
    u32 end = tail_handle;
    for (;;) {
      h = nodes_[h].next;
      if (h == tail_handle) {
        reached_tail = true;
        break;
      }
      if (nodes_[h].label == pending_label) {
        ++new_count;
        continue;
      }
      ++old_count;
      if (old_count >= new_count + 1) {
        const u64 span = nodes_[h].label - nodes_[start].label;
        if (span >= 3 * (old_count + new_count - 1)) {
          end = h;
          break;
        }
      }
    }
    intervals.push_back({start, end, old_count, new_count});
    if (end != tail_handle) {
      frontier_label = nodes_[end].label;
      have_frontier = true;
    }
  }

  for (const ival& iv : intervals)
    spread_interval(iv.start, iv.end, iv.old_count, iv.new_count, out);
  relabel_total_ += out.relabeled_old;
  ++batch_count_;
  return out;
}

}  // namespace textidx
