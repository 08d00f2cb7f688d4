#include "textidx/common.hpp"

#include <sstream>

namespace textidx {

void check_failed(const char* kind, const char* file, int line,
                  const char* msg) {
  std::ostringstream os;
  os << file << ":" << line << ": " << kind << " check failed: " << msg;
  if (std::string(kind) == "input") throw std::invalid_argument(os.str());
  throw std::logic_error(os.str());
}

u32 validate_text(const std::vector<u32>& text) {
  TI_REQUIRE(!text.empty(), "text must be non-empty");
  TI_REQUIRE(text.back() == 0, "text must end with sentinel symbol 0");
  u32 max_sym = 0;
  std::size_t zeros = 0;
  for (u32 c : text) {
    if (c == 0) ++zeros;
    if (c > max_sym) max_sym = c;
  }
  TI_REQUIRE(zeros == 1, "sentinel symbol 0 must occur exactly once");
  return max_sym + 1;
}

u32 sigma_of(const std::vector<u32>& seq) {
  u32 max_sym = 0;
  for (u32 c : seq)
    if (c >= max_sym) max_sym = c + 1;
  return max_sym;
}

}  // namespace textidx
