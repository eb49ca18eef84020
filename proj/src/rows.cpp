#include "operc/rows.hpp"

#include <bit>
#include <cstring>

namespace operc {

void BitRow::clear() { std::memset(w_.data(), 0, w_.size() * 8); }

bool BitRow::any() const {
  for (std::uint64_t w : w_)
    if (w) return true;
  return false;
}

std::int64_t BitRow::count() const {
  std::int64_t n = 0;
  for (std::uint64_t w : w_) n += std::popcount(w);
  return n;
}

std::int64_t BitRow::max_set() const {
  for (std::size_t k = w_.size(); k-- > 0;) {
    if (w_[k])
      return band_.j_lo + static_cast<std::int64_t>(64 * k) + 63 -
             std::countl_zero(w_[k]);
  }
  return band_.j_lo - 1;
}

std::int64_t BitRow::min_set() const {
  for (std::size_t k = 0; k < w_.size(); ++k) {
    if (w_[k])
      return band_.j_lo + static_cast<std::int64_t>(64 * k) +
             std::countr_zero(w_[k]);
  }
  return band_.j_lo - 1;
}

bool BitRow::is_subset_of(const BitRow& o) const {
  for (std::size_t k = 0; k < w_.size(); ++k)
    if (w_[k] & ~o.w_[k]) return false;
  return true;
}

void BitRow::mask_tail() {
  const int rem = static_cast<int>(band_.width() & 63);
  if (rem && !w_.empty()) w_.back() &= (1ull << rem) - 1;
}

void step_up(const BitRow& cur, const BitRow& left_open,
             const BitRow& right_open, BitRow& out) {
  const std::size_t n = cur.words();
  const std::uint64_t* c = cur.data();
  const std::uint64_t* l = left_open.data();
  const std::uint64_t* r = right_open.data();
  std::uint64_t* o = out.data();
  std::uint64_t carry = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const std::uint64_t viar = c[k] & r[k];
    o[k] = (c[k] & l[k]) | (viar << 1) | carry;
    carry = viar >> 63;
  }
  out.mask_tail();
}

void step_down(const BitRow& above, const BitRow& left_open,
               const BitRow& right_open, BitRow& out) {
  const std::size_t n = above.words();
  const std::uint64_t* a = above.data();
  const std::uint64_t* l = left_open.data();
  const std::uint64_t* r = right_open.data();
  std::uint64_t* o = out.data();
  for (std::size_t k = 0; k < n; ++k) {
    const std::uint64_t shr = (a[k] >> 1) | (k + 1 < n ? a[k + 1] << 63 : 0);
    o[k] = (l[k] & a[k]) | (r[k] & shr);
  }
}

void row_and(const BitRow& a, const BitRow& b, BitRow& out) {
  const std::size_t n = a.words();
  for (std::size_t k = 0; k < n; ++k)
    out.data()[k] = a.data()[k] & b.data()[k];
}

void row_or_into(BitRow& acc, const BitRow& a) {
  const std::size_t n = acc.words();
  for (std::size_t k = 0; k < n; ++k) acc.data()[k] |= a.data()[k];
}

}  // namespace operc
