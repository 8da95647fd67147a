#pragma once

#include <array>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hfscatter/constants.hpp"
#include "hfscatter/dipole.hpp"
#include "hfscatter/polarization.hpp"
#include "hfscatter/states.hpp"
#include "hfscatter/zeeman.hpp"

// Kramers-Heisenberg scattering rates for the 8 ground sublevels, the
// Raman/Rayleigh split, and the differential AC Stark shift of the qubit.
//
// For one incident spherical component k the rate of i -> f scattering is
//
//   Gamma_{i,f} = g^2 gamma | a^(1/2)/Delta_i + a^(3/2)/(Delta_i - Delta_f) |^2
//
// where a^(J) sums the dipole products through every sublevel of the 2P_J
// manifold, Delta is referenced to the |down> -> 2P_1/2 line and picks up
// +Delta_hf for channels starting in F = 1.  Elliptic polarizations enter
// through their intensity weights |c_k|^2: each incident component scatters
// into a distinct photon mode, so there are no polarization cross terms.

namespace hfs {

/// Raised when a detuning comes within 10 gamma of a 2P resonance, where the
/// non-resonant rate formula (no linewidth in the denominators) is invalid.
struct NearResonanceError : std::domain_error {
  using std::domain_error::domain_error;
};

struct LaserParams {
  double detuning = 0.0;   // rad/s, from |down> -> 2P_1/2
  double coupling = 0.0;   // g = E mu / 2 hbar, rad/s
  Polarization polarization = Polarization::sigma_plus();
};

/// The pair (a^(1/2), a^(3/2)) of effective amplitudes of one i -> f channel,
/// in units of mu^2.  Raman channels have a_half == -a_three_half, Rayleigh
/// channels carry equal signs.
struct AmplitudePair {
  double a_half = 0.0;
  double a_three_half = 0.0;
};

/// Scattering rates out of one initial state (1/s), split by channel.
struct RateSet {
  GroundState initial;
  std::array<double, kGroundCount> channel{};  // indexed by final state
  double raman = 0.0;     // sum over f != i
  double rayleigh = 0.0;  // f == i
  double total = 0.0;     // raman + rayleigh, by construction
};

struct StarkShift {
  double shift_up = 0.0;      // rad/s
  double shift_down = 0.0;    // rad/s
  double differential = 0.0;  // shift_up - shift_down
};

struct RatioPoint {
  double delta_hz;                  // detuning /2pi
  double total_over_stark;          // qubit-state mean of Gamma_total / |Stark|
  double raman_over_stark;          // qubit-state mean of Gamma_Raman / |Stark|
  double raman_up_over_stark;       // per-state columns
  double raman_down_over_stark;
  double total_over_raman;          // photon budget per coherence loss
};

struct ScanError {
  double delta_hz;
  std::string message;
};

struct RatioScan {
  std::vector<RatioPoint> points;
  std::vector<ScanError> errors;
};

class ScatteringModel {
 public:
  explicit ScatteringModel(const AtomConstants& atom = AtomConstants{})
      : atom_(atom), basis_(ground_basis(atom, atom.b_field)) {
    atom_.validate();
    build_mixed_table();
  }

  const AtomConstants& atom() const { return atom_; }
  const GroundBasis& basis() const { return basis_; }

  /// Detuning seen by channels starting in state i: +Delta_hf when i carries
  /// the F = 1 label (F = 1 lies above F = 2 in 9Be+).
  double initial_detuning(int i, double delta) const {
    return delta + (enumerate_ground()[static_cast<std::size_t>(i)].F == HalfInt(1)
                        ? atom_.qubit_splitting
                        : 0.0);
  }

  void check_off_resonant(double delta) const {
    const double guard = 10.0 * atom_.gamma;
    const std::array<double, 4> denominators = {
        delta, delta - atom_.fine_splitting, delta + atom_.qubit_splitting,
        delta + atom_.qubit_splitting - atom_.fine_splitting};
    for (double d : denominators)
      if (std::abs(d) < guard)
        throw NearResonanceError("detuning " + std::to_string(in_hz(delta)) +
                                 " Hz is within 10 gamma of a 2P resonance");
  }

  /// Amplitude pair of channel i -> f for one pure incident spherical
  /// component k.  The emitted component is fixed by m conservation, so this
  /// is a well-defined scalar pair.
  AmplitudePair component_amplitude(int i, int f, int k) const {
    AmplitudePair pair;
    for (int e = 0; e < kExcitedCount; ++e) {
      double sum = 0.0;
      for (int q = -1; q <= 1; ++q) sum += mixed_(e, f, q) * mixed_(e, i, k);
      if (e < kJHalfCount)
        pair.a_half += sum;
      else
        pair.a_three_half += sum;
    }
    return pair;
  }

  /// Effective amplitude pair for an arbitrary polarization: the per-component
  /// pairs combined with the intensity weights |c_k|^2.  For a pure basis
  /// polarization this is the bare Kramers-Heisenberg pair of the channel.
  AmplitudePair effective_amplitude(const GroundState& i, const GroundState& f,
                                    const Polarization& pol) const {
    pol.validate();
    const int gi = ground_index(i), gf = ground_index(f);
    AmplitudePair out;
    for (int k = -1; k <= 1; ++k) {
      const double w = pol.weight(k);
      if (w == 0.0) continue;
      const AmplitudePair p = component_amplitude(gi, gf, k);
      out.a_half += w * p.a_half;
      out.a_three_half += w * p.a_three_half;
    }
    return out;
  }

  /// Gamma_{i,f} in 1/s.
  double channel_rate(const GroundState& i, const GroundState& f,
                      const LaserParams& laser) const {
    validate_laser(laser);
    return laser.coupling * laser.coupling * atom_.gamma *
           channel_factor(ground_index(i), ground_index(f), laser.detuning,
                          laser.polarization);
  }

  RateSet rate_set(const GroundState& i, const LaserParams& laser) const {
    validate_laser(laser);
    RateSet set;
    set.initial = i;
    const int gi = ground_index(i);
    const double scale = laser.coupling * laser.coupling * atom_.gamma;
    for (int f = 0; f < kGroundCount; ++f) {
      const double r =
          scale * channel_factor(gi, f, laser.detuning, laser.polarization);
      set.channel[static_cast<std::size_t>(f)] = r;
      if (f == gi)
        set.rayleigh += r;
      else
        set.raman += r;
    }
    set.total = set.raman + set.rayleigh;
    return set;
  }

  /// Differential AC Stark shift of the |down> -> |up> transition.
  StarkShift differential_stark(const LaserParams& laser) const {
    validate_laser(laser);
    const double g2 = laser.coupling * laser.coupling;
    StarkShift s;
    s.shift_up = g2 * stark_factor(ground_index(spin_up()), laser.detuning,
                                   laser.polarization);
    s.shift_down = g2 * stark_factor(ground_index(spin_down()), laser.detuning,
                                     laser.polarization);
    s.differential = s.shift_up - s.shift_down;
    return s;
  }

  /// Rate/shift ratio table over a detuning list.  Ratios are formed from
  /// per-unit-coupling factors, so they are exactly independent of g.  Points
  /// failing the off-resonance guard are reported and skipped.
  RatioScan ratio_scan(std::span<const double> detunings,
                       const LaserParams& laser) const {
    RatioScan scan;
    const int up = ground_index(spin_up());
    const int down = ground_index(spin_down());
    for (double delta : detunings) {
      try {
        check_off_resonant(delta);
        double raman_up = 0.0, raman_down = 0.0, total_up = 0.0, total_down = 0.0;
        for (int f = 0; f < kGroundCount; ++f) {
          const double ru = channel_factor(up, f, delta, laser.polarization);
          const double rd = channel_factor(down, f, delta, laser.polarization);
          total_up += ru;
          total_down += rd;
          if (f != up) raman_up += ru;
          if (f != down) raman_down += rd;
        }
        const double stark =
            std::abs((stark_factor(up, delta, laser.polarization) -
                      stark_factor(down, delta, laser.polarization))) /
            atom_.gamma;
        RatioPoint p{};
        p.delta_hz = in_hz(delta);
        p.total_over_stark = 0.5 * (total_up + total_down) / stark;
        p.raman_over_stark = 0.5 * (raman_up + raman_down) / stark;
        p.raman_up_over_stark = raman_up / stark;
        p.raman_down_over_stark = raman_down / stark;
        p.total_over_raman = (total_up + total_down) / (raman_up + raman_down);
        scan.points.push_back(p);
      } catch (const NearResonanceError& err) {
        scan.errors.push_back({in_hz(delta), err.what()});
      }
    }
    return scan;
  }

  /// Total decay strength sum_{g,q} |<e|d_q|g>|^2 of excited sublevel e in the
  /// field-mixed ground basis; equals 1 for every e (single-gamma sum rule).
  double decay_strength(int e) const {
    double sum = 0.0;
    for (int g = 0; g < kGroundCount; ++g)
      for (int q = -1; q <= 1; ++q) sum += mixed_(e, g, q) * mixed_(e, g, q);
    return sum;
  }

 private:
  static constexpr int kJHalfCount = 8;  // 2P_1/2 sublevels precede 2P_3/2

  void validate_laser(const LaserParams& laser) const {
    if (laser.coupling < 0) throw std::invalid_argument("negative coupling g");
    laser.polarization.validate();
    check_off_resonant(laser.detuning);
  }

  // Gamma_{i,f} / (g^2 gamma): units 1/(rad/s)^2.
  double channel_factor(int i, int f, double delta, const Polarization& pol) const {
    const double d_i = initial_detuning(i, delta);
    const double d_fine = d_i - atom_.fine_splitting;
    double sum = 0.0;
    for (int k = -1; k <= 1; ++k) {
      const double w = pol.weight(k);
      if (w == 0.0) continue;
      const AmplitudePair p = component_amplitude(i, f, k);
      const double amp = p.a_half / d_i + p.a_three_half / d_fine;
      sum += w * amp * amp;
    }
    return sum;
  }

  // Level shift / g^2 of ground state x: the forward (Rayleigh) amplitudes
  // divided by their detunings.
  double stark_factor(int x, double delta, const Polarization& pol) const {
    const double d_x = initial_detuning(x, delta);
    const double d_fine = d_x - atom_.fine_splitting;
    double sum = 0.0;
    for (int k = -1; k <= 1; ++k) {
      const double w = pol.weight(k);
      if (w == 0.0) continue;
      const AmplitudePair p = component_amplitude(x, x, k);
      sum += w * (p.a_half / d_x + p.a_three_half / d_fine);
    }
    return sum;
  }

  // Dipole table rotated into the field-mixed ground basis.
  double mixed_(int e, int g, int q) const {
    return mixed_table_[static_cast<std::size_t>(e)][static_cast<std::size_t>(g)]
                       [static_cast<std::size_t>(q + 1)];
  }

  void build_mixed_table() {
    const DipoleTable pure = build_dipole_table();
    for (int e = 0; e < kExcitedCount; ++e)
      for (int g = 0; g < kGroundCount; ++g)
        for (int q = -1; q <= 1; ++q) {
          double v = 0.0;
          for (int c = 0; c < kGroundCount; ++c)
            v += basis_.mixing(g, c) * pure(e, c, q);
          mixed_table_[static_cast<std::size_t>(e)][static_cast<std::size_t>(g)]
                      [static_cast<std::size_t>(q + 1)] = v;
        }
  }

  AtomConstants atom_;
  GroundBasis basis_;
  std::array<std::array<std::array<double, 3>, kGroundCount>, kExcitedCount>
      mixed_table_{};
};

/// Plateau constant of Gamma_total/|Stark| in units of gamma/Delta_hf,
/// evaluated at the given detuning (dimensionless; approaches a constant for
/// |Delta| >> Delta_f).
inline double plateau_coefficient(const ScatteringModel& model, double delta) {
  LaserParams laser;
  laser.coupling = 1.0;
  laser.detuning = delta;
  const double total = 0.5 * (model.rate_set(spin_up(), laser).total +
                              model.rate_set(spin_down(), laser).total);
  const double stark = std::abs(model.differential_stark(laser).differential);
  return (total / stark) * model.atom().qubit_splitting / model.atom().gamma;
}

}  // namespace hfs
