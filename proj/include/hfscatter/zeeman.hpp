#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>

#include "hfscatter/constants.hpp"
#include "hfscatter/states.hpp"
#include "hfscatter/wigner.hpp"

// Ground-manifold eigenstates at finite magnetic field.  The static field
// mixes |F=1,m> with |F=2,m> (Breit-Rabi); at the working field of ~0.0119 T
// the admixtures reach the ten-percent level and have a first-order effect on
// the scattering amplitudes, so they cannot be dropped.  Each eigenstate keeps
// its adiabatic (F, mF) label from the zero-field limit.

namespace hfs {

struct GroundBasis {
  /// Row r is physical state r expressed over the pure |F,mF> states (columns),
  /// both in canonical order.  Orthogonal; identity at zero field.
  Eigen::Matrix<double, kGroundCount, kGroundCount> mixing;
  /// Eigenenergies (hyperfine + Zeeman), rad/s.
  std::array<double, kGroundCount> energy{};
};

namespace detail {

// <F', m| H_Z |F, m> / (mu_B B), using H_Z = mu_B B (g_J J_z + g_I' I_z).
inline double zeeman_coupled(const AtomConstants& atom, HalfInt fa, HalfInt fb, HalfInt m) {
  const HalfInt j = half(1), i = kNuclearSpin;
  double sum = 0.0;
  for (int mj2 = -1; mj2 <= 1; mj2 += 2) {
    const HalfInt mj = half(mj2);
    const HalfInt mi = m - mj;
    if (abs(mi) > i) continue;
    const double ca = clebsch_gordan(j, mj, i, mi, fa, m);
    const double cb = clebsch_gordan(j, mj, i, mi, fb, m);
    sum += ca * cb * (atom.g_j * mj.value() + atom.g_i_prime * mi.value());
  }
  return sum;
}

inline double hyperfine_energy(const AtomConstants& atom, HalfInt f) {
  const double fv = f.value();
  const double iv = kNuclearSpin.value();
  return 0.5 * atom.a_hf * (fv * (fv + 1.0) - iv * (iv + 1.0) - 0.75);
}

}  // namespace detail

/// Diagonalize hyperfine + Zeeman over the 8 ground sublevels.  mF stays a
/// good quantum number, so the problem splits into 2x2 blocks for |m| <= 1
/// and singlets for m = +-2.
inline GroundBasis ground_basis(const AtomConstants& atom, double b_field) {
  GroundBasis out;
  out.mixing.setZero();
  const double muB = angular(kBohrMagnetonHz) * b_field;  // rad/s per g-factor unit

  for (int m = -2; m <= 2; ++m) {
    const HalfInt hm(m);
    if (std::abs(m) == 2) {
      const int idx = ground_index(GroundState{HalfInt(2), hm});
      out.mixing(idx, idx) = 1.0;
      out.energy[static_cast<std::size_t>(idx)] =
          detail::hyperfine_energy(atom, HalfInt(2)) +
          muB * detail::zeeman_coupled(atom, HalfInt(2), HalfInt(2), hm);
      continue;
    }
    const int i1 = ground_index(GroundState{HalfInt(1), hm});
    const int i2 = ground_index(GroundState{HalfInt(2), hm});
    const double h11 = detail::hyperfine_energy(atom, HalfInt(1)) +
                       muB * detail::zeeman_coupled(atom, HalfInt(1), HalfInt(1), hm);
    const double h22 = detail::hyperfine_energy(atom, HalfInt(2)) +
                       muB * detail::zeeman_coupled(atom, HalfInt(2), HalfInt(2), hm);
    const double h12 = muB * detail::zeeman_coupled(atom, HalfInt(1), HalfInt(2), hm);

    // 2x2 symmetric eigenproblem; theta is the F=1 <-> F=2 mixing angle.
    const double theta = 0.5 * std::atan2(2.0 * h12, h11 - h22);
    const double c = std::cos(theta), s = std::sin(theta);
    const double e_plus = h11 * c * c + h22 * s * s + 2.0 * h12 * s * c;
    const double e_minus = h11 * s * s + h22 * c * c - 2.0 * h12 * s * c;

    // Adiabatic labelling: the state with dominant (positive) |F=1,m>
    // component keeps the F=1 label.
    out.mixing(i1, i1) = c;
    out.mixing(i1, i2) = s;
    out.energy[static_cast<std::size_t>(i1)] = e_plus;
    out.mixing(i2, i1) = -s;
    out.mixing(i2, i2) = c;
    out.energy[static_cast<std::size_t>(i2)] = e_minus;
    if (std::abs(c) < std::abs(s)) {  // never at the fields used here
      out.mixing.row(i1).swap(out.mixing.row(i2));
      std::swap(out.energy[static_cast<std::size_t>(i1)],
                out.energy[static_cast<std::size_t>(i2)]);
    }
    for (int r : {i1, i2})
      if (out.mixing(r, r) < 0) out.mixing.row(r) *= -1.0;
  }
  return out;
}

/// E(F=1,mF=1) - E(F=2,mF=0): the qubit splitting implied by the Breit-Rabi
/// constants; should reproduce AtomConstants::qubit_splitting at the working
/// field (first-order field-independent there).
inline double qubit_splitting(const GroundBasis& basis) {
  const auto up = static_cast<std::size_t>(ground_index(spin_up()));
  const auto down = static_cast<std::size_t>(ground_index(spin_down()));
  return basis.energy[up] - basis.energy[down];
}

}  // namespace hfs
