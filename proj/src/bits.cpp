#include "textidx/bits.hpp"

#include <algorithm>

namespace textidx {

// --------------------------------------------------------------------------
// bit_vector

bit_vector::bit_vector(std::vector<u64> words, u64 n)
    : words_(std::move(words)), n_(n) {
  TI_REQUIRE(words_.size() == (n + 63) / 64, "bit_vector: word count mismatch");
  if (n_ & 63) words_.back() &= low_mask(n_ & 63);  // clear trailing garbage
  build_directory();
}

bit_vector::bit_vector(const std::vector<bool>& bits) {
  n_ = bits.size();
  words_.assign((n_ + 63) / 64, 0);
  for (u64 i = 0; i < n_; ++i)
    if (bits[i]) words_[i >> 6] |= 1ull << (i & 63);
  build_directory();
}

void bit_vector::build_directory() {
  const u64 blocks = n_ / 128 + 1;
  dir_.assign(blocks + 1, 0);
  u64 acc = 0;
  for (u64 b = 0; b < blocks; ++b) {
    dir_[b] = static_cast<u32>(acc);
    const u64 w = b << 1;
    if (w < words_.size()) acc += std::popcount(words_[w]);
    if (w + 1 < words_.size()) acc += std::popcount(words_[w + 1]);
  }
  dir_[blocks] = static_cast<u32>(acc);
  ones_ = acc;
  TI_CHECK(n_ < (1ull << 32), "bit_vector: size exceeds directory width");
}

u64 bit_vector::select1(u64 k) const {
  TI_REQUIRE(k >= 1 && k <= ones_, "bit_vector::select1: k out of range");
  // Largest block with dir_[b] < k.
  u64 lo = 0, hi = n_ / 128;  // dir_ has n_/128 + 1 block entries
  while (lo < hi) {
    const u64 mid = (lo + hi + 1) / 2;
    if (dir_[mid] < k)
      lo = mid;
    else
      hi = mid - 1;
  }
  u64 rem = k - dir_[lo];
  const u64 w = lo << 1;
  const u32 c0 = std::popcount(words_[w]);
  if (rem <= c0) return (lo << 7) + select_in_word(words_[w], static_cast<u32>(rem));
  rem -= c0;
  return (lo << 7) + 64 + select_in_word(words_[w + 1], static_cast<u32>(rem));
}

u64 bit_vector::select0(u64 k) const {
  TI_REQUIRE(k >= 1 && k <= zeros(), "bit_vector::select0: k out of range");
  // Zeros before block b: 128*b - dir_[b]; find largest block with that < k.
  u64 lo = 0, hi = n_ / 128;
  while (lo < hi) {
    const u64 mid = (lo + hi + 1) / 2;
    if ((mid << 7) - dir_[mid] < k)
      lo = mid;
    else
      hi = mid - 1;
  }
  u64 rem = k - ((lo << 7) - dir_[lo]);
  const u64 w = lo << 1;
  const u64 inv0 = ~words_[w];
  const u32 c0 = std::popcount(inv0);
  if (rem <= c0) return (lo << 7) + select_in_word(inv0, static_cast<u32>(rem));
  rem -= c0;
  return (lo << 7) + 64 + select_in_word(~words_[w + 1], static_cast<u32>(rem));
}

// --------------------------------------------------------------------------
// packed_int_array

packed_int_array::packed_int_array(u64 n, u32 width) : n_(n), width_(width) {
  TI_REQUIRE(width >= 1 && width <= 64, "packed_int_array: bad width");
  words_.assign((n * width + 63) / 64 + 1, 0);
}

packed_int_array::packed_int_array(std::vector<u64> words, u64 n, u32 width)
    : words_(std::move(words)), n_(n), width_(width) {
  TI_REQUIRE(width >= 1 && width <= 64, "packed_int_array: bad width");
  TI_REQUIRE(words_.size() >= (n * width + 63) / 64, "packed_int_array: word count mismatch");
  words_.resize((n * width + 63) / 64 + 1, 0);
}

void packed_int_array::set(u64 i, u64 v) {
  TI_REQUIRE(i < n_, "packed_int_array::set out of range");
  TI_REQUIRE(width_ == 64 || v <= low_mask(width_), "packed_int_array::set value too wide");
  const u64 bit = i * width_;
  const u64 w = bit >> 6;
  const u32 off = static_cast<u32>(bit & 63);
  words_[w] &= ~(low_mask(width_) << off);
  words_[w] |= v << off;
  if (off + width_ > 64) {
    const u32 spill = off + width_ - 64;
    words_[w + 1] &= ~low_mask(spill);
    words_[w + 1] |= v >> (64 - off);
  }
}

// --------------------------------------------------------------------------
// chunk_counts

chunk_counts::builder::builder(u32 sigma, u64 chunks)
    : sigma_(sigma), chunks_(chunks) {}

void chunk_counts::builder::add(u64 count) {
  TI_REQUIRE(added_ < static_cast<u64>(sigma_) * chunks_, "chunk_counts::builder: too many cells");
  bits_.append_run(true, count);
  bits_.push_back(false);
  ++added_;
}

chunk_counts chunk_counts::builder::build() {
  TI_REQUIRE(added_ == static_cast<u64>(sigma_) * chunks_, "chunk_counts::builder: missing cells");
  chunk_counts cc;
  cc.sigma_ = sigma_;
  cc.chunks_ = chunks_;
  cc.bits_ = bits_.build();
  cc.start_.assign(sigma_ + 1, 0);
  // Segment of symbol a ends at the (a+1) * chunks-th zero.
  for (u32 a = 0; a < sigma_; ++a)
    cc.start_[a + 1] = cc.bits_.select0((static_cast<u64>(a) + 1) * chunks_) + 1;
  return cc;
}

u64 chunk_counts::prefix(u32 a, u64 c) const {
  TI_REQUIRE(a < sigma_ && c <= chunks_, "chunk_counts::prefix out of range");
  if (c == 0) return 0;
  const u64 seg = start_[a];
  const u64 zeros_before = seg - bits_.rank1(seg);
  const u64 pos = bits_.select0(zeros_before + c);
  return (pos - seg) - (c - 1);
}

u64 chunk_counts::total(u32 a) const {
  TI_REQUIRE(a < sigma_, "chunk_counts::total out of range");
  return (start_[a + 1] - start_[a]) - chunks_;
}

// --------------------------------------------------------------------------
// alphabet_stats

alphabet_stats::alphabet_stats(const std::vector<u32>& seq, u32 sigma) {
  counts_.assign(sigma, 0);
  for (u32 c : seq) {
    TI_REQUIRE(c < sigma, "alphabet_stats: symbol out of range");
    ++counts_[c];
  }
  acc_.assign(sigma + 1, 0);
  for (u32 a = 0; a < sigma; ++a) acc_[a + 1] = acc_[a] + counts_[a];
}

alphabet_stats::alphabet_stats(std::vector<u64> counts)
    : counts_(std::move(counts)) {
  acc_.assign(counts_.size() + 1, 0);
  for (std::size_t a = 0; a < counts_.size(); ++a)
    acc_[a + 1] = acc_[a] + counts_[a];
}

u32 alphabet_stats::bucket_of(u64 v) const {
  TI_REQUIRE(v < total(), "alphabet_stats::bucket_of out of range");
  const auto it = std::upper_bound(acc_.begin(), acc_.end(), v);
  return static_cast<u32>(it - acc_.begin()) - 1;
}

// --------------------------------------------------------------------------
// position CSR

namespace detail {

void position_csr::build(const std::vector<u32>& seq, u32 sigma) {
  start.assign(sigma + 1, 0);
  for (u32 c : seq) {
    TI_REQUIRE(c < sigma, "position_csr: symbol out of range");
    ++start[c + 1];
  }
  for (u32 a = 0; a < sigma; ++a) start[a + 1] += start[a];
  positions.resize(seq.size());
  std::vector<u64> next(start.begin(), start.end() - 1);
  for (std::size_t i = 0; i < seq.size(); ++i)
    positions[next[seq[i]]++] = static_cast<u32>(i);
}

}  // namespace detail

// --------------------------------------------------------------------------
// small_alphabet_seq

small_alphabet_seq::small_alphabet_seq(shared_seq seq, u32 sigma)
    : seq_(std::move(seq)), sigma_(sigma) {
  TI_REQUIRE(seq_ != nullptr && sigma_ >= 1, "small_alphabet_seq: bad arguments");
  const u64 n = seq_->size();
  TI_CHECK(n < (1ull << 32), "small_alphabet_seq: sequence too long");
  chunk_ = std::max<u64>(64, sigma_);
  const u64 chunks = ceil_div(std::max<u64>(n, 1), chunk_);
  csr_.build(*seq_, sigma_);
  // Emit symbol-major per-chunk counts by walking each symbol's (sorted)
  // position list; one O(chunks) buffer reused per symbol.
  chunk_counts::builder b(sigma_, chunks);
  std::vector<u32> cell(chunks);
  for (u32 a = 0; a < sigma_; ++a) {
    std::fill(cell.begin(), cell.end(), 0);
    for (u64 k = csr_.start[a]; k < csr_.start[a + 1]; ++k)
      ++cell[csr_.positions[k] / chunk_];
    for (u64 c = 0; c < chunks; ++c) b.add(cell[c]);
  }
  cc_ = b.build();
  stats_ = alphabet_stats(*seq_, sigma_);
}

u64 small_alphabet_seq::rank(u32 a, i64 i) const {
  TI_REQUIRE(a < sigma_, "small_alphabet_seq::rank: symbol out of range");
  TI_REQUIRE(i >= -1 && i < static_cast<i64>(seq_->size()), "small_alphabet_seq::rank: position out of range");
  const u64 p = static_cast<u64>(i + 1);  // count over [0, p)
  const u64 c = p / chunk_;
  u64 r = cc_.prefix(a, c);
  const u32* s = seq_->data();
  for (u64 k = c * chunk_; k < p; ++k) r += s[k] == a;
  return r;
}

u64 small_alphabet_seq::select(u32 a, u64 k) const {
  TI_REQUIRE(a < sigma_, "small_alphabet_seq::select: symbol out of range");
  TI_REQUIRE(k >= 1 && k <= count(a), "small_alphabet_seq::select: k out of range");
  return csr_.positions[csr_.start[a] + k - 1];
}

// --------------------------------------------------------------------------
// general_seq

general_seq::general_seq(shared_seq seq, u32 sigma)
    : seq_(std::move(seq)), sigma_(sigma) {
  TI_REQUIRE(seq_ != nullptr && sigma_ >= 1, "general_seq: bad arguments");
  TI_CHECK(seq_->size() < (1ull << 32), "general_seq: sequence too long");
  csr_.build(*seq_, sigma_);
  stats_ = alphabet_stats(*seq_, sigma_);
}

u64 general_seq::rank(u32 a, i64 i) const {
  TI_REQUIRE(a < sigma_, "general_seq::rank: symbol out of range");
  TI_REQUIRE(i >= -1 && i < static_cast<i64>(seq_->size()), "general_seq::rank: position out of range");
  if (i < 0) return 0;
  const auto begin = csr_.positions.begin() + csr_.start[a];
  const auto end = csr_.positions.begin() + csr_.start[a + 1];
  return std::upper_bound(begin, end, static_cast<u32>(i)) - begin;
}

u64 general_seq::select(u32 a, u64 k) const {
  TI_REQUIRE(a < sigma_, "general_seq::select: symbol out of range");
  TI_REQUIRE(k >= 1 && k <= count(a), "general_seq::select: k out of range");
  return csr_.positions[csr_.start[a] + k - 1];
}

// --------------------------------------------------------------------------
// rmq_index

rmq_index::rmq_index(std::vector<u32> values, kind k)
    : values_(std::move(values)), kind_(k) {
  const std::size_t n = values_.size();
  if (n == 0) return;
  const std::size_t blocks = (n + block_ - 1) / block_;
  block_pos_.resize(blocks);
  for (std::size_t b = 0; b < blocks; ++b) {
    const std::size_t lo = b * block_;
    const std::size_t hi = std::min(n - 1, lo + block_ - 1);
    block_pos_[b] = static_cast<u32>(scan(lo, hi));
  }
  const u32 levels = blocks <= 1 ? 1 : floor_log2(blocks) + 1;
  table_.assign(levels, {});
  table_[0] = block_pos_;
  for (u32 l = 1; l < levels; ++l) {
    const std::size_t span = 1ull << l;
    if (blocks + 1 < span) break;
    table_[l].resize(blocks - span + 1);
    for (std::size_t b = 0; b + span <= blocks; ++b) {
      const u32 left = table_[l - 1][b];
      const u32 right = table_[l - 1][b + span / 2];
      table_[l][b] = better(left, right) ? left : right;
    }
  }
}

bool rmq_index::better(std::size_t a, std::size_t b) const {
  if (values_[a] != values_[b])
    return kind_ == kind::min ? values_[a] < values_[b] : values_[a] > values_[b];
  return a < b;
}

std::size_t rmq_index::scan(std::size_t l, std::size_t r) const {
  std::size_t best = l;
  for (std::size_t i = l + 1; i <= r; ++i)
    if (better(i, best)) best = i;
  return best;
}

std::size_t rmq_index::query(std::size_t l, std::size_t r) const {
  TI_REQUIRE(l <= r && r < values_.size(), "rmq_index::query out of range");
  const std::size_t lb = l / block_, rb = r / block_;
  if (lb == rb) return scan(l, r);
  std::size_t best = scan(l, (lb + 1) * block_ - 1);
  const std::size_t tail = scan(rb * block_, r);
  if (better(tail, best)) best = tail;
  if (lb + 1 <= rb - 1) {
    const std::size_t from = lb + 1, to = rb - 1;  // whole blocks
    const u32 lvl = floor_log2(to - from + 1);
    const u32 x = table_[lvl][from];
    const u32 y = table_[lvl][to - (1ull << lvl) + 1];
    const std::size_t mid = better(x, y) ? x : y;
    if (better(mid, best)) best = mid;
  }
  return best;
}

}  // namespace textidx
