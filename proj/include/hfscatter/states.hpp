#pragma once

#include <array>
#include <stdexcept>
#include <string>

#include "hfscatter/half_int.hpp"

namespace hfs {

inline constexpr HalfInt kNuclearSpin = half(3);  // I = 3/2
inline constexpr int kGroundCount = 8;
inline constexpr int kExcitedCount = 24;

/// 2s 2S_1/2 sublevel |F, mF>.  F = 1 or 2; in 9Be+ the hyperfine structure
/// is inverted, F = 1 lies above F = 2.
struct GroundState {
  HalfInt F;
  HalfInt mF;

  friend constexpr bool operator==(const GroundState&, const GroundState&) = default;

  void validate() const {
    if (F != HalfInt(1) && F != HalfInt(2))
      throw std::invalid_argument("GroundState: F must be 1 or 2");
    if (!valid_projection(F, mF))
      throw std::invalid_argument("GroundState: |mF| must not exceed F");
  }
};

/// 2p sublevel |J, F, mF> with J = 1/2 or 3/2.
struct ExcitedState {
  HalfInt J;
  HalfInt F;
  HalfInt mF;

  friend constexpr bool operator==(const ExcitedState&, const ExcitedState&) = default;

  void validate() const {
    if (J != half(1) && J != half(3))
      throw std::invalid_argument("ExcitedState: J must be 1/2 or 3/2");
    if (F < abs(J - kNuclearSpin) || F > J + kNuclearSpin || !F.is_integer())
      throw std::invalid_argument("ExcitedState: F out of range for J, I=3/2");
    if (!valid_projection(F, mF))
      throw std::invalid_argument("ExcitedState: |mF| must not exceed F");
  }
};

constexpr GroundState spin_up() { return {HalfInt(1), HalfInt(1)}; }    // |F=1,mF=1>
constexpr GroundState spin_down() { return {HalfInt(2), HalfInt(0)}; }  // |F=2,mF=0>
constexpr GroundState stretched_state() { return {HalfInt(2), HalfInt(2)}; }

/// The 8 ground sublevels in canonical order: F ascending, mF ascending.
inline const std::array<GroundState, kGroundCount>& enumerate_ground() {
  static const auto states = [] {
    std::array<GroundState, kGroundCount> out{};
    int n = 0;
    for (int f = 1; f <= 2; ++f)
      for (int m = -f; m <= f; ++m) out[n++] = GroundState{HalfInt(f), HalfInt(m)};
    return out;
  }();
  return states;
}

/// The 24 excited sublevels: J = 1/2 manifold first, then J = 3/2, each with
/// F ascending and mF ascending.
inline const std::array<ExcitedState, kExcitedCount>& enumerate_excited() {
  static const auto states = [] {
    std::array<ExcitedState, kExcitedCount> out{};
    int n = 0;
    for (int j2 : {1, 3})
      for (int f2 = std::abs(j2 - 3); f2 <= j2 + 3; f2 += 2)
        for (int m2 = -f2; m2 <= f2; m2 += 2)
          out[n++] = ExcitedState{half(j2), half(f2), half(m2)};
    return out;
  }();
  return states;
}

inline int ground_index(const GroundState& g) {
  g.validate();
  const int f = g.F.twice() / 2;
  const int m = g.mF.twice() / 2;
  return (f == 1) ? (m + 1) : (3 + m + 2);
}

inline int excited_index(const ExcitedState& e) {
  e.validate();
  const auto& all = enumerate_excited();
  for (int i = 0; i < kExcitedCount; ++i)
    if (all[i] == e) return i;
  throw std::logic_error("excited_index: unreachable");
}

inline std::string label(const GroundState& g) {
  return "S1/2|F=" + to_string(g.F) + ",mF=" + to_string(g.mF) + ">";
}

inline std::string label(const ExcitedState& e) {
  return "P" + to_string(e.J) + "|F=" + to_string(e.F) + ",mF=" + to_string(e.mF) + ">";
}

}  // namespace hfs
