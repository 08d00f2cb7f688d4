// Labeled-list checks: fixed label formulas, order maintenance against a
// straightforward model, gap-floor decay, relabel accounting, and the
// exhaustion/append edge cases.

#include "textidx/list_label.hpp"

#include <algorithm>

#include "test_util.hpp"

using namespace textidx;

namespace {

std::vector<u64> labels_in_order(const labeled_list& l) {
  std::vector<u64> out;
  for (u32 h = l.first(); !l.is_tail(h); h = l.next(h)) out.push_back(l.label(h));
  return out;
}

std::vector<u32> handles_in_order(const labeled_list& l) {
  std::vector<u32> out;
  for (u32 h = l.first(); !l.is_tail(h); h = l.next(h)) out.push_back(h);
  return out;
}

bool strictly_increasing(const std::vector<u64>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] <= v[i - 1]) return false;
  return true;
}

void init_labels() {
  const labeled_list a(3, 10);
  T_EQ(labels_in_order(a), (std::vector<u64>{40, 80, 120}));
  T_EQ(a.label(labeled_list::head_handle), 0u);
  const labeled_list b(1, 1);
  T_EQ(labels_in_order(b), (std::vector<u64>{4}));
  const labeled_list c(7, 100);
  T_EQ(labels_in_order(c).back(), 7u * 400u);
  T_THROWS(labeled_list(0, 10), std::invalid_argument);
}

void single_insert_between() {
  labeled_list l(3, 10);
  const u32 x1 = l.handle_at(0);
  const auto res = l.batch_insert({x1});
  T_EQ(res.new_handles.size(), 1u);
  // Gap 40 split over two steps: the new element lands at 60 and the right
  // endpoint keeps its exact label.
  T_EQ(labels_in_order(l), (std::vector<u64>{40, 60, 80, 120}));
  T_EQ(res.relabeled_old, 0u);
  T_EQ(res.intervals.size(), 1u);
  T_EQ(res.intervals[0].old_count, 2u);
  T_EQ(res.intervals[0].new_count, 1u);
  T_CHECK(l.min_gap() >= 20);
}

void empty_batch_is_noop() {
  labeled_list l(4, 16);
  const auto before = labels_in_order(l);
  const auto res = l.batch_insert({});
  T_EQ(labels_in_order(l), before);
  T_EQ(res.relabeled_old, 0u);
  T_EQ(l.batch_count(), 0u);
}

void oversized_batch_reinitializes() {
  labeled_list l(2, 8);
  const u32 x1 = l.handle_at(0);
  const auto res = l.batch_insert({x1, x1, x1});
  T_CHECK(res.reinitialized);
  // 5 elements, universe max(8, 5) = 8, ladder i * 32.
  T_EQ(labels_in_order(l), (std::vector<u64>{32, 64, 96, 128, 160}));
  T_EQ(l.batch_count(), 0u);
}

void append_at_end_uses_ladder() {
  labeled_list l(2, 16);
  const u64 d0 = 4 * 16;
  u32 last = l.handle_at(1);
  for (int round = 0; round < 5; ++round) {
    const auto res = l.batch_insert({last});
    T_EQ(res.relabeled_old, 0u);  // appending never disturbs old labels
    last = res.new_handles[0];
  }
  const auto labs = labels_in_order(l);
  T_CHECK(strictly_increasing(labs));
  bool ladder_ok = true;
  for (std::size_t i = 1; i < labs.size(); ++i)
    ladder_ok &= labs[i] - labs[i - 1] == d0;
  T_CHECK(ladder_ok);
}

void rejects_bad_batches() {
  labeled_list l(3, 10);
  const u32 x1 = l.handle_at(0), x2 = l.handle_at(1);
  T_THROWS(l.batch_insert({x2, x1}), std::invalid_argument);  // unordered
  T_THROWS(l.batch_insert({labeled_list::tail_handle}), std::invalid_argument);
  T_THROWS(l.batch_insert({9999}), std::invalid_argument);
}

// Random batches against a plain vector model; checks order maintenance,
// monotone labels, the in-regime gap floor, per-interval balance, and the
// relabel budget.
void randomized_model() {
  std::mt19937_64 rng(20240802);
  const u64 universe = 1 << 14;
  for (int trial = 0; trial < 8; ++trial) {
    const u64 t0 = 5 + rng() % 40;
    labeled_list l(t0, universe);
    std::vector<u32> model = handles_in_order(l);
    u64 inserts = 0;
    const u64 regime = floor_log2(universe);
    for (u64 batch = 1; batch <= regime; ++batch) {
      const u64 m = 1 + rng() % std::min<u64>(model.size(), 12);
      // after_index[i] in [-1, size): -1 means head.
      std::vector<i64> after(m);
      for (auto& a : after) a = static_cast<i64>(rng() % (model.size() + 1)) - 1;
      std::sort(after.begin(), after.end());
      std::vector<u32> preds(m);
      for (std::size_t i = 0; i < m; ++i)
        preds[i] = after[i] < 0 ? labeled_list::head_handle : model[after[i]];
      const auto res = l.batch_insert(preds);
      T_CHECK(!res.reinitialized);
      inserts += m;
      // Splice into the model (right to left keeps indices valid).
      std::vector<u32> next_model;
      next_model.reserve(model.size() + m);
      std::size_t k = 0;
      for (i64 pos = -1; pos < static_cast<i64>(model.size()); ++pos) {
        if (pos >= 0) next_model.push_back(model[pos]);
        while (k < m && after[k] == pos) next_model.push_back(res.new_handles[k++]);
      }
      model.swap(next_model);
      T_EQ(handles_in_order(l), model);
      const auto labs = labels_in_order(l);
      T_CHECK(strictly_increasing(labs));
      // Gap floor: 4u / 2^k while within the first log2(u) batches.
      T_CHECK(l.min_gap() >= (4 * universe) >> batch);
      T_CHECK(l.min_gap() >= 3);
      // Bounded intervals stay balanced: 1 <= old/new <= 2.
      for (const auto& iv : res.intervals) {
        if (iv.open_ended) continue;
        T_CHECK(iv.old_count >= iv.new_count);
        T_CHECK(iv.old_count <= 2 * iv.new_count);
      }
      T_CHECK(l.relabel_total() <= 3 * inserts);
      // order() agrees with list positions.
      for (int probe = 0; probe < 10; ++probe) {
        const std::size_t i = rng() % model.size();
        const std::size_t j = rng() % model.size();
        T_EQ(l.order(model[i], model[j]), i < j);
      }
    }
  }
}

// Hammering one gap forces interval growth and eventually the open-ended
// ladder; the structure must stay monotone with gaps >= 3 indefinitely.
void exhaustion_keeps_gaps_legal() {
  labeled_list l(2, 64);
  const u32 x1 = l.handle_at(0);
  for (int round = 0; round < 300; ++round) {
    l.batch_insert({x1});
    T_CHECK(strictly_increasing(labels_in_order(l)));
    T_CHECK(l.min_gap() >= 3);
  }
  T_EQ(l.size(), 302u);
}

}  // namespace

int main() {
  init_labels();
  single_insert_between();
  empty_batch_is_noop();
  oversized_batch_reinitializes();
  append_at_end_uses_ladder();
  rejects_bad_batches();
  randomized_model();
  exhaustion_keeps_gaps_legal();
  return testutil::finish("test_list_label");
}
