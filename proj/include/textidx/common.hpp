#pragma once
// Shared fundamentals: fixed-width aliases, contract-check helpers, small bit
// utilities, text validation, and the LSD radix sort used by several builders.

#include <cstdint>
#include <cstddef>
#include <bit>
#include <stdexcept>
#include <string>
#include <vector>

namespace textidx {

using u8 = std::uint8_t;
using u16 = std::uint16_t;
using u32 = std::uint32_t;
using u64 = std::uint64_t;
using i64 = std::int64_t;

// Contract-violation helpers. TI_REQUIRE guards caller-supplied input
// (throws std::invalid_argument), TI_CHECK guards internal invariants
// (throws std::logic_error). Both stay active in release builds: the
// structures advertise hard invariants and the tests rely on them firing.
[[noreturn]] void check_failed(const char* kind, const char* file, int line,
                               const char* msg);

#define TI_REQUIRE(cond, msg)                                        \
  do {                                                               \
    if (!(cond)) ::textidx::check_failed("input", __FILE__, __LINE__, msg); \
  } while (0)

#define TI_CHECK(cond, msg)                                          \
  do {                                                               \
    if (!(cond)) ::textidx::check_failed("invariant", __FILE__, __LINE__, msg); \
  } while (0)

inline u32 floor_log2(u64 x) { return static_cast<u32>(std::bit_width(x)) - 1; }

inline u32 ceil_log2(u64 x) {
  return x <= 1 ? 0 : static_cast<u32>(std::bit_width(x - 1));
}

inline u64 ceil_div(u64 a, u64 b) { return (a + b - 1) / b; }

// Validates a pipeline text: non-empty, ends with symbol 0, and 0 occurs
// exactly once. Returns the alphabet size (max symbol + 1).
u32 validate_text(const std::vector<u32>& text);

// Largest symbol + 1 (alphabet size) of an arbitrary sequence; 0 if empty.
u32 sigma_of(const std::vector<u32>& seq);

// Stable LSD radix sort of v by a 64-bit key, 8-bit digits, skipping digit
// positions that are identical across all keys.
template <class T, class KeyFn>
void lsd_radix_sort(std::vector<T>& v, KeyFn key) {
  if (v.size() <= 1) return;
  u64 seen_or = 0, seen_and = ~0ull;
  for (const T& x : v) {
    const u64 k = key(x);
    seen_or |= k;
    seen_and &= k;
  }
  std::vector<T> buf(v.size());
  for (u32 shift = 0; shift < 64; shift += 8) {
    if ((seen_or >> shift) == 0) break;
    const u64 d_or = (seen_or >> shift) & 0xff;
    const u64 d_and = (seen_and >> shift) & 0xff;
    if (d_or == d_and) continue;  // digit constant across all keys
    std::size_t count[256] = {};
    for (const T& x : v) ++count[(key(x) >> shift) & 0xff];
    std::size_t pos[256];
    std::size_t acc = 0;
    for (int d = 0; d < 256; ++d) {
      pos[d] = acc;
      acc += count[d];
    }
    for (T& x : v) buf[pos[(key(x) >> shift) & 0xff]++] = std::move(x);
    v.swap(buf);
  }
}

}  // namespace textidx
