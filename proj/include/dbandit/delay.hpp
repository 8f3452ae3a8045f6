#pragma once

#include <cstdint>
#include <limits>
#include <ostream>

namespace dbandit {

using Round = std::int64_t;

// A delay in rounds, or infinity (feedback never arrives).
//
// Finite values are clamped to kMaxFinite so that `round + delay` can never
// overflow; anything that large lies beyond every usable horizon anyway.
class Delay {
 public:
  static constexpr std::int64_t kMaxFinite = std::int64_t{1} << 62;

  constexpr Delay() noexcept = default;

  static constexpr Delay rounds(std::int64_t n) noexcept {
    Delay d;
    d.value_ = n < 0 ? 0 : (n > kMaxFinite ? kMaxFinite : n);
    return d;
  }
  static constexpr Delay infinite() noexcept {
    Delay d;
    d.value_ = kInfinite;
    return d;
  }

  constexpr bool is_infinite() const noexcept { return value_ == kInfinite; }
  constexpr bool is_finite() const noexcept { return value_ != kInfinite; }

  // Only meaningful for finite delays.
  constexpr std::int64_t count() const noexcept { return value_; }

  // Total order with infinity above every finite value; this is also the
  // sort key used by the ECDF kernels.
  constexpr std::int64_t ordinal() const noexcept { return value_; }

  friend constexpr bool operator==(Delay, Delay) noexcept = default;
  friend constexpr auto operator<=>(Delay a, Delay b) noexcept { return a.value_ <=> b.value_; }

 private:
  static constexpr std::int64_t kInfinite = std::numeric_limits<std::int64_t>::max();
  std::int64_t value_ = 0;
};

inline std::ostream& operator<<(std::ostream& os, Delay d) {
  if (d.is_infinite()) return os << "inf";
  return os << d.count();
}

}  // namespace dbandit
