#pragma once
// Burrows-Wheeler transform construction in deterministic linear time.
//
// Small alphabets (sigma^4 <= n) run a slice pipeline: the text is padded
// with strictly descending fresh sentinels to a multiple of
// delta = floor(log_sigma n), suffixes are split into delta classes by start
// position mod delta, classes 0-1 are sorted through a meta-symbol suffix
// array, and every later class is merged into a dynamic sequence with one
// batched-rank plus one batched-insert round per class. Large alphabets
// build the suffix array directly and read the transform off it.

#include <vector>

#include "textidx/batch_dynamic.hpp"
#include "textidx/common.hpp"

namespace textidx {

// Suffix array by induced sorting (linear time, integer alphabet). The last
// symbol must be the unique minimum of the sequence.
std::vector<u32> linear_suffix_array(const std::vector<u32>& seq);

struct bwt_trace {
  bool sliced = false;  // slice pipeline vs direct suffix array
  u64 delta = 0;        // class count (slice pipeline only)
  u64 pad = 0;          // sentinels appended by padding
  u64 padded_n = 0;
  u32 padded_sigma = 0;
  struct step_info {
    u32 step;      // 1 stands for the combined classes 0-1
    u64 batch;     // suffixes merged during the step
    u64 seq_size;  // sequence length after the step
  };
  std::vector<step_info> steps;
};

// Text prepared for the slice pipeline: every original symbol is shifted up
// by `pad`, turning the terminal sentinel into the largest of pad + 1
// strictly descending trailing sentinels, and the length becomes a multiple
// of delta.
struct padded_text {
  std::vector<u32> text;
  u32 sigma = 0;  // original sigma + pad
  u64 pad = 0;
  u64 delta = 0;
};

padded_text pad_for_slices(const std::vector<u32>& text, u32 sigma, u64 delta);

// Drives the slice pipeline over a padded text one class at a time so that
// intermediate states can be inspected; build_bwt runs it to completion.
class slice_bwt_builder {
 public:
  explicit slice_bwt_builder(padded_text pt);

  u64 delta() const { return delta_; }
  u64 slice_count() const { return m_; }        // suffixes per class
  u64 size() const { return b_.size(); }        // symbols merged so far
  u32 next_step() const { return next_; }

  void run_steps01();
  void run_step(u32 j);  // j in [2, delta), in order
  std::vector<u32> run_remaining(bwt_trace* trace = nullptr);

  // Current contents: the symbols preceding all processed suffixes, in
  // lexicographic order of those suffixes.
  std::vector<u32> current() const;

 private:
  std::vector<u32> meta_suffix_order(u64 rot) const;
  void rebuild_acc();
  u32 preceding(u64 k) const {
    return doubled_[k == 0 ? n_ - 1 : k - 1];
  }

  std::vector<u32> doubled_;  // padded text plus its first delta symbols
  u64 n_ = 0;                 // padded length
  u64 delta_ = 0;
  u64 m_ = 0;                 // n_ / delta_
  u64 pad_ = 0;
  u32 sigma_ = 0;             // padded alphabet size
  u32 next_ = 0;              // next class to process (0 = steps 0-1 pending)
  dyn_batch_seq b_;
  std::vector<u32> w_;        // w_[i-1]: position of suffix i*delta-j-1
  std::vector<u64> cnt_;      // per-symbol counts in the sequence
  std::vector<u64> acc_;      // acc_[a]: symbols < a in the sequence
};

// BWT of `text` (unique minimal terminal sentinel 0 required; other symbols
// in [1, sigma)): entry i is the symbol preceding the (i+1)-th smallest
// suffix, with the sentinel's entry wrapping to the last symbol.
std::vector<u32> build_bwt(const std::vector<u32>& text, u32 sigma,
                           bwt_trace* trace = nullptr);

}  // namespace textidx
