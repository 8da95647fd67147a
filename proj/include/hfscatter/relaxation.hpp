#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "hfscatter/expmat.hpp"
#include "hfscatter/fit.hpp"
#include "hfscatter/scattering.hpp"

// Population dynamics over the 8 ground sublevels and the two-level survival
// model
//
//   P(t) = e^{-beta t} [ kappa sinh(alpha t) + 2 alpha cosh(alpha t) ] / (2 alpha)
//
// that the relaxation measurements are fitted with.  The two-level constants
// come from reducing the 8-level generator to the qubit pair with independent
// leakage; the fit inverts that reduction to recover the Raman rate.

namespace hfs {

using Populations = Eigen::Matrix<double, kGroundCount, 1>;

/// Generator of population flow: entry (f, i) is the i -> f scattering rate,
/// diagonal entries hold minus the total loss so columns sum to zero.
struct RateMatrix {
  Eigen::Matrix<double, kGroundCount, kGroundCount> generator;
};

inline RateMatrix build_rate_matrix(const ScatteringModel& model,
                                    const LaserParams& laser) {
  RateMatrix m;
  m.generator.setZero();
  const auto& states = enumerate_ground();
  for (int i = 0; i < kGroundCount; ++i) {
    const RateSet rates = model.rate_set(states[static_cast<std::size_t>(i)], laser);
    double out = 0.0;
    for (int f = 0; f < kGroundCount; ++f) {
      if (f == i) continue;
      const double r = rates.channel[static_cast<std::size_t>(f)];
      m.generator(f, i) = r;
      out += r;
    }
    m.generator(i, i) = -out;
  }
  return m;
}

/// Propagate populations by exp(G t).  Entries are clamped at zero against
/// roundoff (never below -1e-12); the total stays 1 to 1e-9.
inline Populations evolve_populations(const RateMatrix& m, const Populations& p0,
                                      double t) {
  if (t < 0) throw std::invalid_argument("evolve_populations: negative time");
  if (p0.minCoeff() < -1e-12 || std::abs(p0.sum() - 1.0) > 1e-9)
    throw std::invalid_argument("evolve_populations: p0 is not a distribution");
  Populations p = matrix_exponential(m.generator * t) * p0;
  for (int i = 0; i < kGroundCount; ++i) {
    if (p[i] < -1e-12)
      throw std::runtime_error("evolve_populations: negative population beyond roundoff");
    if (p[i] < 0) p[i] = 0.0;
  }
  return p;
}

enum class QubitLevel { up, down };

/// Constants of the two-level survival law, Eq. style P(t) above.
struct TwoLevelModel {
  double alpha = 0.0;   // 1/s
  double beta = 0.0;    // 1/s
  double kappa = 0.0;   // 1/s
  QubitLevel initial = QubitLevel::up;
};

/// Survival probability at time t; P(0) = 1 exactly.  The alpha -> 0 limit is
/// a removable singularity handled by series expansion.
inline double eval_two_level(const TwoLevelModel& m, double t) {
  if (t < 0) throw std::invalid_argument("eval_two_level: negative time");
  const double at = m.alpha * t;
  const double envelope = std::exp(-m.beta * t);
  if (std::abs(at) < 1e-4) {
    // sinh(at)/a -> t (1 + (at)^2/6), cosh(at) -> 1 + (at)^2/2
    return envelope *
           (1.0 + 0.5 * m.kappa * t + at * at * (m.kappa * t / 12.0 + 0.5));
  }
  return envelope * (m.kappa * std::sinh(at) + 2.0 * m.alpha * std::cosh(at)) /
         (2.0 * m.alpha);
}

/// Reduce the 8-level generator to the {up, down} pair: exchange rates plus
/// independent leakage into the six spectator states.  The survival of the
/// chosen initial state under the 2x2 sub-dynamics is exactly the two-level
/// law with these constants (back-flow from leaked states is dropped, as in
/// the measurement model).
inline TwoLevelModel reduce_to_two_level(const RateMatrix& m, QubitLevel initial) {
  const int up = ground_index(spin_up());
  const int down = ground_index(spin_down());
  const double out_up = -m.generator(up, up);      // total Raman rate out of up
  const double out_down = -m.generator(down, down);
  const double exch_ud = m.generator(up, down);    // down -> up feeding
  const double exch_du = m.generator(down, up);

  TwoLevelModel model;
  model.initial = initial;
  model.beta = 0.5 * (out_up + out_down);
  model.alpha = std::sqrt(0.25 * (out_up - out_down) * (out_up - out_down) +
                          exch_ud * exch_du);
  model.kappa = (initial == QubitLevel::up) ? (out_down - out_up)
                                            : (out_up - out_down);
  return model;
}

/// Total Raman loss rate out of state x (1/s).
inline double raman_out_rate(const RateMatrix& m, QubitLevel x) {
  const int idx = ground_index(x == QubitLevel::up ? spin_up() : spin_down());
  return -m.generator(idx, idx);
}

/// Model coherence decay rate: half the summed Raman loss out of the two
/// qubit states.
inline double gamma_dec(const RateMatrix& m) {
  return 0.5 * (raman_out_rate(m, QubitLevel::up) +
                raman_out_rate(m, QubitLevel::down));
}

struct FitResult {
  double estimate = 0.0;
  double std_error = 0.0;
  bool converged = false;
  bool degenerate = false;
  int iterations = 0;
  double residual_norm = 0.0;
};

struct RelaxSample {
  double time;         // s
  double probability;  // measured survival
  double weight;       // 1/variance; <= 0 means unit weight
};

struct RelaxationFit {
  FitResult gamma_raman;  // estimate in 1/s
  TwoLevelModel model;    // fitted constants
};

namespace detail {

// Log-linear decay-rate estimate from the positive samples; the fit seed.
inline double crude_rate(std::span<const RelaxSample> samples) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (const auto& s : samples) {
    if (s.probability <= 1e-6) continue;
    const double y = std::log(s.probability);
    sx += s.time;
    sy += y;
    sxx += s.time * s.time;
    sxy += s.time * y;
    ++n;
  }
  if (n < 2) return 0.0;
  const double denom = n * sxx - sx * sx;
  if (denom <= 0) return 0.0;
  return std::max(0.0, -(n * sxy - sx * sy) / denom);
}

}  // namespace detail

/// Fit the two-level law to survival data and recover the Raman loss rate of
/// the prepared state via Gamma_Raman = beta - kappa/2.  If alpha comes out
/// statistically consistent with zero the degenerate limit form
/// e^{-beta t}(1 + kappa t / 2) is refitted instead.
inline RelaxationFit fit_relaxation(std::span<const RelaxSample> samples,
                                    QubitLevel initial = QubitLevel::up) {
  if (samples.size() < 5)
    throw std::invalid_argument("fit_relaxation: need at least 5 samples");

  std::vector<double> w(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i)
    w[i] = samples[i].weight > 0 ? std::sqrt(samples[i].weight) : 1.0;

  const auto residuals_full = [&](const Eigen::VectorXd& x) {
    TwoLevelModel m{std::abs(x[0]), x[1], x[2], initial};
    Eigen::VectorXd r(static_cast<Eigen::Index>(samples.size()));
    for (std::size_t i = 0; i < samples.size(); ++i)
      r[static_cast<Eigen::Index>(i)] =
          w[i] * (eval_two_level(m, samples[i].time) - samples[i].probability);
    return r;
  };
  const auto residuals_limit = [&](const Eigen::VectorXd& x) {
    TwoLevelModel m{0.0, x[0], x[1], initial};
    Eigen::VectorXd r(static_cast<Eigen::Index>(samples.size()));
    for (std::size_t i = 0; i < samples.size(); ++i)
      r[static_cast<Eigen::Index>(i)] =
          w[i] * (eval_two_level(m, samples[i].time) - samples[i].probability);
    return r;
  };

  const double rate0 = detail::crude_rate(samples);
  Eigen::Vector3d x0(0.5 * rate0, rate0, 0.0);
  LeastSquares ls = levenberg_marquardt(residuals_full, x0);

  RelaxationFit fit;
  bool use_limit = false;
  if (ls.converged) {
    const double alpha = std::abs(ls.params[0]);
    const double sigma_alpha = std::sqrt(std::max(0.0, ls.covariance(0, 0)));
    use_limit = alpha <= sigma_alpha;
  } else {
    use_limit = true;
  }

  if (use_limit) {
    Eigen::Vector2d y0(std::max(rate0, 0.0), 0.0);
    const LeastSquares lim = levenberg_marquardt(residuals_limit, y0);
    fit.model = TwoLevelModel{0.0, lim.params[0], lim.params[1], initial};
    fit.gamma_raman.estimate = lim.params[0] - 0.5 * lim.params[1];
    fit.gamma_raman.std_error =
        std::sqrt(std::max(0.0, lim.covariance(0, 0) + 0.25 * lim.covariance(1, 1) -
                                    lim.covariance(0, 1)));
    fit.gamma_raman.converged = lim.converged;
    fit.gamma_raman.iterations = lim.iterations;
    fit.gamma_raman.residual_norm = lim.residual_norm;
  } else {
    fit.model = TwoLevelModel{std::abs(ls.params[0]), ls.params[1], ls.params[2], initial};
    fit.gamma_raman.estimate = ls.params[1] - 0.5 * ls.params[2];
    fit.gamma_raman.std_error =
        std::sqrt(std::max(0.0, ls.covariance(1, 1) + 0.25 * ls.covariance(2, 2) -
                                    ls.covariance(1, 2)));
    fit.gamma_raman.converged = ls.converged;
    fit.gamma_raman.iterations = ls.iterations;
    fit.gamma_raman.residual_norm = ls.residual_norm;
  }

  // Flat data: no resolvable decay.
  const double rate = fit.gamma_raman.estimate;
  fit.gamma_raman.degenerate =
      !(rate > 0.0) || fit.gamma_raman.std_error >= std::abs(rate);
  return fit;
}

}  // namespace hfs
