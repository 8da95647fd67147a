#pragma once

#include <array>
#include <cmath>

#include "hfscatter/states.hpp"
#include "hfscatter/wigner.hpp"

// Electric-dipole matrix elements of the 2s -> 2p transition in units of the
// stretched matrix element mu = <2P_3/2, F=3, mF=3| d.sigma_+ |2S_1/2, F=2, mF=2>.
//
// The element is assembled by Wigner-Eckart plus two recouplings (Edmonds
// 7.1.7): L is the active part through the fine structure and J the active
// part through the hyperfine structure, with a single orbital reduced element
// <L=1||d||L=0> shared by both 2P_J manifolds.  That choice makes every
// excited sublevel decay with the same total strength, which is what licenses
// a single gamma for the whole 2p manifold.

namespace hfs {

namespace detail {

// <J_e || d || J_g = 1/2> from <L_e=1 || d || L_g=0> := 1, S = 1/2.
inline double reduced_j(HalfInt je) {
  const HalfInt le(1), lg(0), s = half(1), jg = half(1);
  const int phase_exp = (le + s + jg + HalfInt(1)).twice() / 2;
  return phase(phase_exp) *
         std::sqrt((je.twice() + 1.0) * (jg.twice() + 1.0)) *
         wigner6j(le, je, s, jg, lg, HalfInt(1));
}

// <J_e, F_e || d || J_g = 1/2, F_g> with nuclear spin I = 3/2 a spectator.
inline double reduced_f(HalfInt je, HalfInt fe, HalfInt fg) {
  const HalfInt jg = half(1), i = kNuclearSpin;
  const int phase_exp = (je + i + fg + HalfInt(1)).twice() / 2;
  return phase(phase_exp) *
         std::sqrt((fe.twice() + 1.0) * (fg.twice() + 1.0)) *
         wigner6j(je, fe, i, fg, jg, HalfInt(1)) * reduced_j(je);
}

inline double dipole_element_raw(const GroundState& g, const ExcitedState& e, int q) {
  const HalfInt hq(q);
  if ((g.mF + hq) != e.mF) return 0.0;
  const int phase_exp = (e.F - e.mF).twice() / 2;
  return phase(phase_exp) *
         wigner3j(e.F, HalfInt(1), g.F, -e.mF, hq, g.mF) *
         reduced_f(e.J, e.F, g.F);
}

inline double stretched_norm() {
  static const double norm =
      dipole_element_raw(stretched_state(),
                         ExcitedState{half(3), HalfInt(3), HalfInt(3)}, +1);
  return norm;
}

}  // namespace detail

/// Absorption matrix element <e| d_q |g> / mu for spherical component
/// q in {-1, 0, +1}.  Vanishes exactly unless mF(e) = mF(g) + q and
/// |F(e) - F(g)| <= 1; the stretched sigma+ element is exactly 1.
inline double dipole_element(const GroundState& g, const ExcitedState& e, int q) {
  g.validate();
  e.validate();
  if (q < -1 || q > 1) throw std::invalid_argument("dipole_element: q must be -1, 0 or +1");
  return detail::dipole_element_raw(g, e, q) / detail::stretched_norm();
}

/// All 24 x 8 x 3 normalized elements, indexed by the canonical enumerations.
struct DipoleTable {
  std::array<std::array<std::array<double, 3>, kGroundCount>, kExcitedCount> value{};

  double operator()(int e, int g, int q) const {
    return value[static_cast<std::size_t>(e)][static_cast<std::size_t>(g)]
                [static_cast<std::size_t>(q + 1)];
  }
};

inline DipoleTable build_dipole_table() {
  DipoleTable t;
  const auto& gs = enumerate_ground();
  const auto& es = enumerate_excited();
  for (int e = 0; e < kExcitedCount; ++e)
    for (int g = 0; g < kGroundCount; ++g)
      for (int q = -1; q <= 1; ++q)
        t.value[static_cast<std::size_t>(e)][static_cast<std::size_t>(g)]
               [static_cast<std::size_t>(q + 1)] =
            dipole_element(gs[static_cast<std::size_t>(g)],
                           es[static_cast<std::size_t>(e)], q);
  return t;
}

}  // namespace hfs
