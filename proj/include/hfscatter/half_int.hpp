#pragma once

#include <cstdlib>
#include <string>

namespace hfs {

/// Angular momentum stored as a doubled integer, so half-integers like
/// j = 3/2 are represented exactly (twice() == 3) and never compared
/// through floating point.
class HalfInt {
 public:
  constexpr HalfInt() = default;
  constexpr explicit HalfInt(int whole) : twice_(2 * whole) {}

  static constexpr HalfInt from_twice(int twice) {
    HalfInt h;
    h.twice_ = twice;
    return h;
  }

  constexpr int twice() const { return twice_; }
  constexpr double value() const { return 0.5 * twice_; }
  constexpr bool is_integer() const { return twice_ % 2 == 0; }

  constexpr HalfInt operator-() const { return from_twice(-twice_); }
  friend constexpr HalfInt operator+(HalfInt a, HalfInt b) {
    return from_twice(a.twice_ + b.twice_);
  }
  friend constexpr HalfInt operator-(HalfInt a, HalfInt b) {
    return from_twice(a.twice_ - b.twice_);
  }
  friend constexpr bool operator==(HalfInt a, HalfInt b) = default;
  friend constexpr auto operator<=>(HalfInt a, HalfInt b) = default;

 private:
  int twice_ = 0;
};

/// n/2 as a HalfInt; half(3) is j = 3/2.
constexpr HalfInt half(int n) { return HalfInt::from_twice(n); }

constexpr HalfInt abs(HalfInt h) {
  return h.twice() < 0 ? -h : h;
}

/// A projection m is compatible with j when |m| <= j and j - m is an integer.
constexpr bool valid_projection(HalfInt j, HalfInt m) {
  return abs(m) <= j && (j.twice() - m.twice()) % 2 == 0;
}

inline std::string to_string(HalfInt h) {
  if (h.is_integer()) return std::to_string(h.twice() / 2);
  return std::to_string(h.twice()) + "/2";
}

}  // namespace hfs
