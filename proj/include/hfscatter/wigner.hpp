#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

#include "hfscatter/half_int.hpp"

// Wigner 3-j and 6-j symbols and Clebsch-Gordan coefficients via the Racah
// sum formulas (Edmonds, "Angular Momentum in Quantum Mechanics", ch. 3 and 6;
// Condon-Shortley phases throughout).  Factorials are tabulated in extended
// precision and the alternating sums evaluated term by term, which keeps the
// symbols accurate to ~1e-13 for j <= 20 -- far beyond the j <= 3 this
// project uses.

namespace hfs {

namespace detail {

inline long double factorial_ld(int n) {
  static const auto table = [] {
    std::array<long double, 341> t{};
    t[0] = 1.0L;
    for (std::size_t i = 1; i < t.size(); ++i) t[i] = t[i - 1] * i;
    return t;
  }();
  return table.at(static_cast<std::size_t>(n));
}

// (a b c) triangle coefficient Delta(abc)^2 = (a+b-c)!(a-b+c)!(-a+b+c)!/(a+b+c+1)!
// Arguments are doubled j's; returns 0 if the triad is not closed.
inline long double triangle_factor(int a2, int b2, int c2) {
  const int p1 = (a2 + b2 - c2) / 2;
  const int p2 = (a2 - b2 + c2) / 2;
  const int p3 = (-a2 + b2 + c2) / 2;
  if (p1 < 0 || p2 < 0 || p3 < 0) return 0.0L;
  if ((a2 + b2 + c2) % 2 != 0) return 0.0L;
  return factorial_ld(p1) * factorial_ld(p2) * factorial_ld(p3) /
         factorial_ld((a2 + b2 + c2) / 2 + 1);
}

inline void require_valid_pair(HalfInt j, HalfInt m, const char* what) {
  if (j.twice() < 0) throw std::invalid_argument(std::string(what) + ": negative j");
  if ((j.twice() - m.twice()) % 2 != 0)
    throw std::invalid_argument(std::string(what) + ": m parity does not match j");
}

inline double phase(int exponent) { return (exponent % 2 == 0) ? 1.0 : -1.0; }

}  // namespace detail

/// Wigner 3-j symbol (j1 j2 j3; m1 m2 m3).  Returns exactly 0 whenever a
/// selection rule (triangle, m-sum, |m| <= j) fails; throws on an m whose
/// parity does not match its j.
inline double wigner3j(HalfInt j1, HalfInt j2, HalfInt j3,
                       HalfInt m1, HalfInt m2, HalfInt m3) {
  detail::require_valid_pair(j1, m1, "wigner3j");
  detail::require_valid_pair(j2, m2, "wigner3j");
  detail::require_valid_pair(j3, m3, "wigner3j");
  if (abs(m1) > j1 || abs(m2) > j2 || abs(m3) > j3) return 0.0;
  if ((m1 + m2 + m3).twice() != 0) return 0.0;

  const long double tri = detail::triangle_factor(j1.twice(), j2.twice(), j3.twice());
  if (tri == 0.0L) return 0.0;

  using detail::factorial_ld;
  const int a2 = j1.twice(), b2 = j2.twice(), c2 = j3.twice();
  const int am2 = m1.twice(), bm2 = m2.twice(), cm2 = m3.twice();

  const long double pref =
      std::sqrt(tri * factorial_ld((a2 + am2) / 2) * factorial_ld((a2 - am2) / 2) *
                factorial_ld((b2 + bm2) / 2) * factorial_ld((b2 - bm2) / 2) *
                factorial_ld((c2 + cm2) / 2) * factorial_ld((c2 - cm2) / 2));

  const int t_min = std::max({0, (b2 - c2 - am2) / 2, (a2 - c2 + bm2) / 2});
  const int t_max = std::min({(a2 + b2 - c2) / 2, (a2 - am2) / 2, (b2 + bm2) / 2});

  long double sum = 0.0L;
  for (int t = t_min; t <= t_max; ++t) {
    const long double denom =
        factorial_ld(t) * factorial_ld((a2 + b2 - c2) / 2 - t) *
        factorial_ld((a2 - am2) / 2 - t) * factorial_ld((b2 + bm2) / 2 - t) *
        factorial_ld((c2 - b2 + am2) / 2 + t) * factorial_ld((c2 - a2 - bm2) / 2 + t);
    sum += ((t % 2 == 0) ? 1.0L : -1.0L) / denom;
  }

  const int phase_exp = (a2 - b2 - cm2) / 2;
  return static_cast<double>(detail::phase(phase_exp) * pref * sum);
}

/// Wigner 6-j symbol {j1 j2 j3; j4 j5 j6}; 0 when any of the four triads
/// violates the triangle rules.
inline double wigner6j(HalfInt j1, HalfInt j2, HalfInt j3,
                       HalfInt j4, HalfInt j5, HalfInt j6) {
  for (HalfInt j : {j1, j2, j3, j4, j5, j6})
    if (j.twice() < 0) throw std::invalid_argument("wigner6j: negative j");

  using detail::factorial_ld;
  using detail::triangle_factor;
  const long double t1 = triangle_factor(j1.twice(), j2.twice(), j3.twice());
  const long double t2 = triangle_factor(j1.twice(), j5.twice(), j6.twice());
  const long double t3 = triangle_factor(j4.twice(), j2.twice(), j6.twice());
  const long double t4 = triangle_factor(j4.twice(), j5.twice(), j3.twice());
  if (t1 == 0.0L || t2 == 0.0L || t3 == 0.0L || t4 == 0.0L) return 0.0;

  const int s123 = (j1 + j2 + j3).twice() / 2;
  const int s156 = (j1 + j5 + j6).twice() / 2;
  const int s426 = (j4 + j2 + j6).twice() / 2;
  const int s453 = (j4 + j5 + j3).twice() / 2;
  const int q1245 = (j1 + j2 + j4 + j5).twice() / 2;
  const int q2356 = (j2 + j3 + j5 + j6).twice() / 2;
  const int q1346 = (j1 + j3 + j4 + j6).twice() / 2;

  const int t_min = std::max({s123, s156, s426, s453});
  const int t_max = std::min({q1245, q2356, q1346});

  long double sum = 0.0L;
  for (int t = t_min; t <= t_max; ++t) {
    const long double num = factorial_ld(t + 1);
    const long double denom =
        factorial_ld(t - s123) * factorial_ld(t - s156) * factorial_ld(t - s426) *
        factorial_ld(t - s453) * factorial_ld(q1245 - t) * factorial_ld(q2356 - t) *
        factorial_ld(q1346 - t);
    sum += ((t % 2 == 0) ? 1.0L : -1.0L) * num / denom;
  }

  return static_cast<double>(std::sqrt(t1 * t2 * t3 * t4) * sum);
}

/// Clebsch-Gordan coefficient <j1 m1; j2 m2 | J M> in the Condon-Shortley
/// convention, evaluated through the 3-j symbol.
inline double clebsch_gordan(HalfInt j1, HalfInt m1, HalfInt j2, HalfInt m2,
                             HalfInt J, HalfInt M) {
  detail::require_valid_pair(j1, m1, "clebsch_gordan");
  detail::require_valid_pair(j2, m2, "clebsch_gordan");
  detail::require_valid_pair(J, M, "clebsch_gordan");
  if ((m1 + m2).twice() != M.twice()) return 0.0;
  const int phase_exp = (j1 - j2 + M).twice() / 2;
  return detail::phase(phase_exp) * std::sqrt(J.twice() + 1.0) *
         wigner3j(j1, j2, J, m1, m2, -M);
}

}  // namespace hfs
