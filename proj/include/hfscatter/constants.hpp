#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "hfscatter/half_int.hpp"

namespace hfs {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kHbar = 1.054571817e-34;        // J s
inline constexpr double kSpeedOfLight = 2.99792458e8;   // m/s
inline constexpr double kEpsilon0 = 8.8541878128e-12;   // F/m
inline constexpr double kBohrMagnetonHz = 13.996244936e9;  // mu_B / h, Hz/T

/// Ordinary frequency (Hz) -> angular frequency (rad/s).  All frequencies are
/// carried internally as angular frequencies; file and CLI I/O is in Hz.
constexpr double angular(double hz) { return kTwoPi * hz; }
constexpr double in_hz(double omega) { return omega / kTwoPi; }

/// Level data of the 9Be+ 2s/2p system.  Defaults are the operating values of
/// the experiment being modelled, plus the ground-state hyperfine constant and
/// g-factors (Wineland & Bollinger, Phys. Rev. A 28, 2577 (1983)) that fix the
/// field-mixed ground eigenstates.
struct AtomConstants {
  double fine_splitting = angular(197.2e9);   // 2P_3/2 - 2P_1/2, rad/s
  double qubit_splitting = angular(1.207e9);  // |up> - |down> at the working field
  double gamma = angular(19.4e6);             // 2P decay rate, rad/s
  double wavelength = 313e-9;                 // m
  double b_field = 0.01194;                   // T
  HalfInt nuclear_spin = half(3);             // I = 3/2
  double a_hf = angular(-625.008837048e6);    // 2s 2S_1/2 hyperfine constant, rad/s
  double g_j = 2.00226206;
  double g_i_prime = 2.00226206 * 2.134779853e-4;  // nuclear g in mu_B units

  void validate() const {
    if (fine_splitting <= 0 || qubit_splitting <= 0 || gamma <= 0)
      throw std::invalid_argument("AtomConstants: splittings and gamma must be positive");
    if (wavelength <= 0) throw std::invalid_argument("AtomConstants: bad wavelength");
    if (!(fine_splitting > qubit_splitting && qubit_splitting > gamma))
      throw std::invalid_argument("AtomConstants: need fine >> hyperfine >> gamma");
    if (nuclear_spin != half(3))
      throw std::invalid_argument("AtomConstants: only I = 3/2 is supported");
  }
};

/// Dipole moment of the stretched |2S, F=2, mF=2> -> |2P_3/2, F=3, mF=3>
/// transition, from the spontaneous-emission relation.  The stretched excited
/// state decays through this single channel, so
///   gamma = omega^3 mu^2 / (3 pi eps0 hbar c^3).
inline double stretched_dipole_moment(const AtomConstants& atom) {
  const double omega = kTwoPi * kSpeedOfLight / atom.wavelength;
  return std::sqrt(3.0 * std::numbers::pi * kEpsilon0 * kHbar *
                   std::pow(kSpeedOfLight, 3) * atom.gamma / std::pow(omega, 3));
}

/// Coupling g = E mu / 2 hbar (rad/s) for a beam of the given intensity
/// (W/m^2), with E = sqrt(2 I / c eps0).
inline double coupling_from_intensity(double intensity, const AtomConstants& atom) {
  if (intensity < 0) throw std::invalid_argument("negative intensity");
  const double field = std::sqrt(2.0 * intensity / (kSpeedOfLight * kEpsilon0));
  return field * stretched_dipole_moment(atom) / (2.0 * kHbar);
}

}  // namespace hfs
