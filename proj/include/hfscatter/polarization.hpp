#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace hfs {

/// Laser polarization on the spherical basis (sigma-, pi, sigma+) relative to
/// the quantization (magnetic-field) axis.  Unit normalized:
/// |c-|^2 + |c0|^2 + |c+|^2 = 1.
struct Polarization {
  std::array<std::complex<double>, 3> amplitude{};  // q = -1, 0, +1

  static Polarization sigma_minus() { return basis(0); }
  static Polarization pi_linear() { return basis(1); }
  static Polarization sigma_plus() { return basis(2); }

  static Polarization from_amplitudes(std::complex<double> cm, std::complex<double> c0,
                                      std::complex<double> cp) {
    Polarization p{{cm, c0, cp}};
    p.validate();
    return p;
  }

  std::complex<double> component(int q) const {
    return amplitude[static_cast<std::size_t>(q + 1)];
  }
  /// Intensity weight |c_q|^2 of spherical component q.
  double weight(int q) const { return std::norm(component(q)); }

  void validate() const {
    const double n = weight(-1) + weight(0) + weight(+1);
    if (std::abs(n - 1.0) > 1e-9)
      throw std::invalid_argument("Polarization: components must be unit normalized");
  }

 private:
  static Polarization basis(std::size_t k) {
    Polarization p;
    p.amplitude[k] = 1.0;
    return p;
  }
};

}  // namespace hfs
