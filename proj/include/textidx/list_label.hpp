#pragma once
// Monotone list labeling with batched insertion. Elements live in a doubly
// linked list; every element carries an integer label, and position order
// implies strictly increasing labels. A batch of m insertions relabels only
// O(m) elements by spreading labels evenly over small covering intervals.
//
// Labels start at gap 4n (n = the universe-size hint) and lose at most a
// factor of two of minimum gap per batch, so they stay distinct integers
// with gap >= 3 for log2(n) batches; after that (or when a batch is larger
// than the list, or when interval selection would starve) the structure
// relabels globally and resets its batch counter.

#include <cstddef>
#include <vector>

#include "textidx/common.hpp"

namespace textidx {

class labeled_list {
 public:
  // Handles are indices into an internal slab; 0 is the dummy head (label 0)
  // and 1 the dummy tail (label = universe bound, never relabeled).
  static constexpr u32 head_handle = 0;
  static constexpr u32 tail_handle = 1;

  struct interval_stat {
    u64 old_count;   // old elements in the interval, both endpoints included
    u64 new_count;   // inserted elements in the interval
    u64 gap;         // label gap used when spreading
    bool open_ended; // interval ran to the end of the list (ladder labels)
  };

  struct batch_result {
    std::vector<u32> new_handles;         // one per insert, in input order
    std::vector<interval_stat> intervals; // covering intervals used
    u64 relabeled_old = 0;                // old elements whose label changed
    bool reinitialized = false;           // global relabel happened
  };

  // Creates item_count elements (>= 1) labeled i * 4 * universe_n, i >= 1.
  labeled_list(u64 item_count, u64 universe_n);

  u64 size() const { return size_; }
  u64 universe() const { return universe_n_; }
  u64 batch_count() const { return batch_count_; }
  u64 insert_total() const { return insert_total_; }
  u64 relabel_total() const { return relabel_total_; }

  u64 label(u32 h) const { return nodes_[h].label; }
  u32 next(u32 h) const { return nodes_[h].next; }
  u32 prev(u32 h) const { return nodes_[h].prev; }
  u32 first() const { return nodes_[head_handle].next; }
  bool is_tail(u32 h) const { return h == tail_handle; }

  // Handle of the k-th element (0-based), by linear walk; test convenience.
  u32 handle_at(u64 k) const;

  // True if a precedes b in list order (strictly; labels compare directly).
  bool order(u32 a, u32 b) const { return nodes_[a].label < nodes_[b].label; }

  // Inserts one new element after each predecessor handle, in input order;
  // preds must be in non-decreasing list order and may repeat (repeats chain
  // consecutively). Predecessors must exist before the batch (head allowed).
  batch_result batch_insert(const std::vector<u32>& preds);

  // Minimum gap between consecutive labels (head and tail included); O(size).
  u64 min_gap() const;

 private:
  struct node {
    u32 prev = 0;
    u32 next = 0;
    u64 label = 0;
  };

  void reinitialize();
  void spread_interval(u32 start_h, u32 end_h, u64 old_count, u64 new_count,
                       batch_result& out);

  std::vector<node> nodes_;
  u64 universe_n_ = 0;
  u64 size_ = 0;
  u64 batch_count_ = 0;
  u64 insert_total_ = 0;
  u64 relabel_total_ = 0;
};

}  // namespace textidx
