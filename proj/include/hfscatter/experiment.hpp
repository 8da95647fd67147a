#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <future>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <thread>
#include <vector>

#include "hfscatter/relaxation.hpp"
#include "hfscatter/scattering.hpp"

// The coherence-relaxation experiment: two Ramsey pi/2 pulses around a train
// of alternating-phase spin-echo pi pulses, with the decohering beam applied
// in the gaps.  The run is repeated with final-pulse phase 0 and pi; the
// signal difference is the Ramsey contrast.  Two simulation channels are
// provided: an analytic qubit map (populations from the reduced rate model,
// coherence decaying at gamma_dec with the deterministic Stark phase), and a
// quantum-trajectory Monte Carlo over the full 8-level manifold in which a
// Raman event collapses the superposition and a Rayleigh event does nothing.

namespace hfs {

struct EchoSequence {
  struct Window {
    double start;     // s, absolute within the sequence
    double duration;  // s
  };

  double tau_echo = 0.0;             // s, first/last free gap; middle gaps 2 tau
  int n_pi = 2;                      // number of spin-echo pulses
  double pi_time = 5e-6;             // s; pulses treated as instantaneous
  double ramsey_phase = 0.0;         // phase of the final pi/2 for run_once
  std::vector<double> pi_phases;     // alternating {0, pi}
  std::vector<Window> windows;       // decohering-beam windows, one per gap

  /// Time of the k-th pi pulse (k = 0 .. n_pi-1); the first Ramsey pulse sits
  /// at t = 0 and the final one at 2 n_pi tau_echo.
  double pulse_time(int k) const { return tau_echo + 2.0 * tau_echo * k; }
  double end_time() const { return 2.0 * tau_echo * n_pi; }

  double gap_start(int gap) const { return gap == 0 ? 0.0 : pulse_time(gap - 1); }
  double gap_end(int gap) const { return gap < n_pi ? pulse_time(gap) : end_time(); }

  /// Total decohering-beam exposure tau.
  double decohering_time() const {
    double t = 0.0;
    for (const auto& w : windows) t += w.duration;
    return t;
  }

  void validate() const {
    if (tau_echo <= 0) throw std::invalid_argument("EchoSequence: tau_echo must be positive");
    if (n_pi < 2 || n_pi > 18)
      throw std::invalid_argument("EchoSequence: n_pi must lie between 2 and 18");
    if (pi_time <= 0) throw std::invalid_argument("EchoSequence: bad pi_time");
    if (pi_phases.size() != static_cast<std::size_t>(n_pi))
      throw std::invalid_argument("EchoSequence: need one phase per pi pulse");
    if (windows.size() != static_cast<std::size_t>(n_pi) + 1)
      throw std::invalid_argument("EchoSequence: need one window per gap");
    for (std::size_t g = 0; g < windows.size(); ++g) {
      const auto& w = windows[g];
      if (w.duration < 0) throw std::invalid_argument("EchoSequence: negative window");
      const int gi = static_cast<int>(g);
      if (w.start < gap_start(gi) - 1e-15 ||
          w.start + w.duration > gap_end(gi) + 1e-15)
        throw std::invalid_argument("EchoSequence: window extends outside its gap");
    }
  }

  /// The standard sequence: beam on during every full gap, pi phases
  /// alternating 0, pi.
  static EchoSequence ramsey_echo(double tau_echo, int n_pi, double pi_time = 5e-6) {
    EchoSequence s;
    s.tau_echo = tau_echo;
    s.n_pi = n_pi;
    s.pi_time = pi_time;
    for (int k = 0; k < n_pi; ++k)
      s.pi_phases.push_back(k % 2 == 0 ? 0.0 : std::numbers::pi);
    for (int g = 0; g <= n_pi; ++g)
      s.windows.push_back({s.gap_start(g), s.gap_end(g) - s.gap_start(g)});
    s.validate();
    return s;
  }
};

/// Qubit density matrix on {|up>, |down>} plus the population that has leaked
/// into the six spectator Zeeman states (never recaptured by the pulses).
struct QubitState {
  Eigen::Matrix2cd rho = Eigen::Matrix2cd::Zero();
  double leaked = 0.0;

  static QubitState up() {
    QubitState s;
    s.rho(0, 0) = 1.0;
    return s;
  }

  double p_up() const { return rho(0, 0).real(); }
  double p_down() const { return rho(1, 1).real(); }

  void check(double tol = 1e-9) const {
    const double tr = p_up() + p_down();
    if (std::abs(tr + leaked - 1.0) > tol)
      throw std::runtime_error("QubitState: trace + leaked != 1");
    if (p_up() < -tol || p_down() < -tol || leaked < -tol)
      throw std::runtime_error("QubitState: negative population");
    if (std::norm(rho(0, 1)) > p_up() * p_down() + tol)
      throw std::runtime_error("QubitState: coherence exceeds population bound");
    if (std::abs(rho(0, 1) - std::conj(rho(1, 0))) > tol)
      throw std::runtime_error("QubitState: not Hermitian");
  }
};

/// Ideal rotation by theta about the equatorial axis at azimuth phi.  Leaked
/// population is untouched: the pulses address only the qubit transition.
inline QubitState rotate(const QubitState& state, double theta, double phi) {
  const std::complex<double> i(0.0, 1.0);
  const double c = std::cos(0.5 * theta), s = std::sin(0.5 * theta);
  Eigen::Matrix2cd u;
  u << c, -i * std::exp(-i * phi) * s, -i * std::exp(i * phi) * s, c;
  QubitState out = state;
  out.rho = u * state.rho * u.adjoint();
  return out;
}

/// Precomputed action of the decohering beam on the qubit.
struct DecoherenceChannel {
  double gamma_dec = 0.0;   // 1/s; = (out_up + out_down)/2
  double stark = 0.0;       // rad/s, differential phase rate on rho_01
  double out_up = 0.0;      // total Raman loss rates
  double out_down = 0.0;
  Eigen::Matrix2d qubit_generator = Eigen::Matrix2d::Zero();  // population flow
  /// Extra dephasing from the Rayleigh-rate-difference mechanism.  The
  /// experiment this models found it negligible; off (zero) by default.
  double rayleigh_difference_rate = 0.0;
};

inline DecoherenceChannel make_channel(const ScatteringModel& model,
                                       const LaserParams& laser) {
  const RateMatrix m = build_rate_matrix(model, laser);
  const int up = ground_index(spin_up());
  const int down = ground_index(spin_down());
  DecoherenceChannel ch;
  ch.out_up = -m.generator(up, up);
  ch.out_down = -m.generator(down, down);
  ch.gamma_dec = 0.5 * (ch.out_up + ch.out_down);
  ch.stark = model.differential_stark(laser).differential;
  ch.qubit_generator << -ch.out_up, m.generator(up, down),
      m.generator(down, up), -ch.out_down;
  return ch;
}

/// Analytic beam window: populations follow the reduced 2x2 rate model (loss
/// going to `leaked`), the coherence decays at gamma_dec -- Rayleigh
/// scattering contributes nothing -- and picks up the deterministic Stark
/// phase.
inline QubitState decohere_window(const QubitState& state, const DecoherenceChannel& ch,
                                  double dt) {
  if (dt < 0) throw std::invalid_argument("decohere_window: negative duration");
  QubitState out = state;
  const Eigen::Vector2d p0(state.p_up(), state.p_down());
  const Eigen::Vector2d p = matrix_exponential(ch.qubit_generator * dt) * p0;
  out.leaked += p0.sum() - p.sum();
  const std::complex<double> i(0.0, 1.0);
  const std::complex<double> coherence =
      state.rho(0, 1) *
      std::exp(-(ch.gamma_dec + ch.rayleigh_difference_rate) * dt) *
      std::exp(-i * ch.stark * dt);
  out.rho(0, 0) = p[0];
  out.rho(1, 1) = p[1];
  out.rho(0, 1) = coherence;
  out.rho(1, 0) = std::conj(coherence);
  return out;
}

struct SignalPair {
  double p_up_phi0 = 0.0;
  double p_up_phipi = 0.0;
  int n_pi = 0;

  /// Ramsey contrast.  With an even pulse count phi_R = pi is the bright
  /// readout; an odd count swaps the roles, hence the sign.
  double contrast() const {
    return (p_up_phipi - p_up_phi0) * (n_pi % 2 == 0 ? 1.0 : -1.0);
  }
};

namespace detail {

inline QubitState run_once(const EchoSequence& seq, const DecoherenceChannel& ch,
                           double phi_r, bool debug_checks = false) {
  QubitState state = QubitState::up();
  state = rotate(state, std::numbers::pi / 2, 0.0);
  for (int g = 0; g <= seq.n_pi; ++g) {
    state = decohere_window(state, ch, seq.windows[static_cast<std::size_t>(g)].duration);
    if (debug_checks) state.check();
    if (g < seq.n_pi)
      state = rotate(state, std::numbers::pi, seq.pi_phases[static_cast<std::size_t>(g)]);
  }
  state = rotate(state, std::numbers::pi / 2, phi_r);
  if (debug_checks) state.check();
  return state;
}

}  // namespace detail

/// Run the full sequence in the analytic channel for both readout phases.
inline SignalPair run_sequence(const EchoSequence& seq, const DecoherenceChannel& ch,
                               bool debug_checks = false) {
  seq.validate();
  SignalPair out;
  out.n_pi = seq.n_pi;
  out.p_up_phi0 = detail::run_once(seq, ch, 0.0, debug_checks).p_up();
  out.p_up_phipi = detail::run_once(seq, ch, std::numbers::pi, debug_checks).p_up();
  return out;
}

inline SignalPair run_sequence(const EchoSequence& seq, const ScatteringModel& model,
                               const LaserParams& laser) {
  return run_sequence(seq, make_channel(model, laser));
}

struct ContrastPoint {
  double tau = 0.0;        // s of decohering exposure
  double contrast = 0.0;
  double std_error = 0.0;  // 0 for the analytic channel
};

struct DetectionParams {
  double bright_mean = 12.0;  // photons when the ion reads bright
  double dark_mean = 1.0;
  int repetitions = 400;
};

struct TrajectoryResult {
  std::vector<ContrastPoint> contrast_curve;
  /// Mean detected photon counts per point for phi_R = 0 and pi (filled when
  /// detection parameters are supplied).
  std::vector<std::array<double, 2>> mean_counts;
  std::uint64_t seed = 0;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

inline std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t point,
                                 std::uint64_t phase, std::uint64_t traj) {
  return splitmix64(splitmix64(splitmix64(seed ^ 0xA5A5A5A5A5A5A5A5ull) + point * 0x9E37ull +
                               phase) +
                    traj);
}

}  // namespace detail

/// Photon-count samples for one readout: each repetition drawn from
/// Poisson(bright) with probability p_signal, else Poisson(dark).
inline std::vector<int> simulate_detection(double p_signal, int repetitions,
                                           std::uint64_t seed,
                                           const DetectionParams& det = {}) {
  if (p_signal < -1e-12 || p_signal > 1.0 + 1e-12)
    throw std::invalid_argument("simulate_detection: probability out of range");
  p_signal = std::clamp(p_signal, 0.0, 1.0);
  std::mt19937_64 rng(detail::splitmix64(seed));
  std::bernoulli_distribution bright(p_signal);
  std::poisson_distribution<int> pb(det.bright_mean), pd(det.dark_mean);
  std::vector<int> counts(static_cast<std::size_t>(repetitions));
  for (auto& c : counts) c = bright(rng) ? pb(rng) : pd(rng);
  return counts;
}

/// Stochastic unraveling of the scattering model over the full 8-level
/// manifold.  Between events the superposition keeps its no-jump weights; a
/// Raman event collapses it onto a single Zeeman state (which the following
/// pulses re-address only if it is |up> or |down>); Rayleigh events carry no
/// which-state information and are not sampled at all.
class TrajectorySimulator {
 public:
  TrajectorySimulator(const ScatteringModel& model, const LaserParams& laser)
      : matrix_(build_rate_matrix(model, laser)),
        channel_(make_channel(model, laser)) {}

  const DecoherenceChannel& channel() const { return channel_; }

  TrajectoryResult run(std::span<const EchoSequence> seqs, int n_traj,
                       std::uint64_t seed,
                       const std::optional<DetectionParams>& detection = {}) const {
    if (n_traj < 1) throw std::invalid_argument("TrajectorySimulator: n_traj >= 1");
    TrajectoryResult result;
    result.seed = seed;
    for (std::size_t point = 0; point < seqs.size(); ++point) {
      const EchoSequence& seq = seqs[point];
      seq.validate();
      std::array<double, 2> mean{};
      std::array<double, 2> var{};
      for (int phase = 0; phase < 2; ++phase) {
        const double phi_r = phase == 0 ? 0.0 : std::numbers::pi;
        const std::vector<double> p = survival_samples(seq, phi_r, n_traj, seed, point, phase);
        double m = 0.0;
        for (double v : p) m += v;
        m /= static_cast<double>(n_traj);
        double s2 = 0.0;
        for (double v : p) s2 += (v - m) * (v - m);
        s2 /= std::max(1.0, static_cast<double>(n_traj - 1));
        mean[static_cast<std::size_t>(phase)] = m;
        var[static_cast<std::size_t>(phase)] = s2 / static_cast<double>(n_traj);
      }
      ContrastPoint cp;
      cp.tau = seq.decohering_time();
      cp.contrast = (mean[1] - mean[0]) * (seq.n_pi % 2 == 0 ? 1.0 : -1.0);
      cp.std_error = std::sqrt(var[0] + var[1]);
      result.contrast_curve.push_back(cp);
      if (detection) {
        std::array<double, 2> counts{};
        for (int phase = 0; phase < 2; ++phase) {
          const auto samples = simulate_detection(
              mean[static_cast<std::size_t>(phase)], detection->repetitions,
              detail::stream_seed(seed, point, static_cast<std::uint64_t>(phase) + 2, 0),
              *detection);
          double c = 0.0;
          for (int v : samples) c += v;
          counts[static_cast<std::size_t>(phase)] = c / static_cast<double>(samples.size());
        }
        result.mean_counts.push_back(counts);
      }
    }
    return result;
  }

  /// Mean final 8-level populations (leaked diagnostics for cross-checks
  /// against the rate-equation evolution).
  Populations population_stats(const EchoSequence& seq, double phi_r, int n_traj,
                               std::uint64_t seed) const {
    Populations acc = Populations::Zero();
    for (int t = 0; t < n_traj; ++t) {
      std::mt19937_64 rng(detail::stream_seed(seed, 0, 9, static_cast<std::uint64_t>(t)));
      acc += final_populations(seq, phi_r, rng);
    }
    return acc / static_cast<double>(n_traj);
  }

 private:
  struct TrajState {
    bool coherent = true;
    std::complex<double> a_up{1.0, 0.0};
    std::complex<double> a_down{0.0, 0.0};
    int basis = 0;  // ground index when collapsed
  };

  std::vector<double> survival_samples(const EchoSequence& seq, double phi_r,
                                       int n_traj, std::uint64_t seed,
                                       std::size_t point, int phase) const {
    std::vector<double> out(static_cast<std::size_t>(n_traj));
    const auto worker = [&](int begin, int end) {
      for (int t = begin; t < end; ++t) {
        std::mt19937_64 rng(detail::stream_seed(seed, point,
                                                static_cast<std::uint64_t>(phase),
                                                static_cast<std::uint64_t>(t)));
        out[static_cast<std::size_t>(t)] = run_single(seq, phi_r, rng);
      }
    };
    const unsigned hw = std::thread::hardware_concurrency();
    const int workers =
        n_traj >= 512 ? static_cast<int>(std::clamp(hw, 1u, 8u)) : 1;
    if (workers == 1) {
      worker(0, n_traj);
    } else {
      // Pre-split streams; each worker fills disjoint slots, so the result is
      // identical to the serial order.
      std::vector<std::future<void>> futures;
      const int chunk = (n_traj + workers - 1) / workers;
      for (int w = 0; w < workers; ++w) {
        const int begin = w * chunk;
        const int end = std::min(n_traj, begin + chunk);
        if (begin >= end) break;
        futures.push_back(std::async(std::launch::async, worker, begin, end));
      }
      for (auto& f : futures) f.get();
    }
    return out;
  }

  // Survival probability of |up> at readout for one stochastic realization.
  double run_single(const EchoSequence& seq, double phi_r, std::mt19937_64& rng) const {
    TrajState st = initial_state(rng);
    run_pulses_and_windows(seq, phi_r, st, rng);
    if (st.coherent) return std::norm(st.a_up);
    return st.basis == ground_index(spin_up()) ? 1.0 : 0.0;
  }

  Populations final_populations(const EchoSequence& seq, double phi_r,
                                std::mt19937_64& rng) const {
    TrajState st = initial_state(rng);
    run_pulses_and_windows(seq, phi_r, st, rng);
    Populations p = Populations::Zero();
    if (st.coherent) {
      p[ground_index(spin_up())] = std::norm(st.a_up);
      p[ground_index(spin_down())] = std::norm(st.a_down);
    } else {
      p[st.basis] = 1.0;
    }
    return p;
  }

  static TrajState initial_state(std::mt19937_64&) {
    TrajState st;
    const double s = std::numbers::sqrt2 / 2.0;
    st.a_up = s;
    st.a_down = std::complex<double>(0.0, -s);  // pi/2 pulse from |up>
    return st;
  }

  void run_pulses_and_windows(const EchoSequence& seq, double phi_r, TrajState& st,
                              std::mt19937_64& rng) const {
    for (int g = 0; g <= seq.n_pi; ++g) {
      window(st, seq.windows[static_cast<std::size_t>(g)].duration, rng);
      if (g < seq.n_pi)
        pulse(st, std::numbers::pi, seq.pi_phases[static_cast<std::size_t>(g)]);
    }
    pulse(st, std::numbers::pi / 2, phi_r);
  }

  void pulse(TrajState& st, double theta, double phi) const {
    if (!st.coherent) {
      if (st.basis == ground_index(spin_up())) {
        st.coherent = true;
        st.a_up = 1.0;
        st.a_down = 0.0;
      } else if (st.basis == ground_index(spin_down())) {
        st.coherent = true;
        st.a_up = 0.0;
        st.a_down = 1.0;
      } else {
        return;  // leaked; pulses address only the qubit transition
      }
    }
    const std::complex<double> i(0.0, 1.0);
    const double c = std::cos(0.5 * theta), s = std::sin(0.5 * theta);
    const std::complex<double> u = st.a_up, d = st.a_down;
    st.a_up = c * u - i * std::exp(-i * phi) * s * d;
    st.a_down = -i * std::exp(i * phi) * s * u + c * d;
  }

  void window(TrajState& st, double duration, std::mt19937_64& rng) const {
    double remaining = duration;
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    while (remaining > 0.0) {
      if (!st.coherent) {
        const double rate = -matrix_.generator(st.basis, st.basis);
        if (rate <= 0.0) return;
        std::exponential_distribution<double> expd(rate);
        const double dt = expd(rng);
        if (dt >= remaining) return;
        remaining -= dt;
        st.basis = pick_destination(st.basis, uni(rng));
        continue;
      }

      const double wu = std::norm(st.a_up), wd = std::norm(st.a_down);
      const double ru = channel_.out_up, rd = channel_.out_down;
      const double rx = channel_.rayleigh_difference_rate;
      const auto survival = [&](double t) {
        return (wu * std::exp(-ru * t) + wd * std::exp(-rd * t)) * std::exp(-rx * t);
      };
      const double xi = uni(rng);
      if (survival(remaining) >= xi) {
        advance_coherent(st, remaining);
        return;
      }
      // Invert S(t*) = xi by bisection (S is strictly decreasing).
      double lo = 0.0, hi = remaining;
      for (int it = 0; it < 200 && (hi - lo) > 1e-15 * remaining; ++it) {
        const double mid = 0.5 * (lo + hi);
        (survival(mid) >= xi ? lo : hi) = mid;
      }
      const double t_jump = 0.5 * (lo + hi);
      advance_coherent(st, t_jump);
      remaining -= t_jump;

      // Branch: which state scattered (or a pure dephasing event when the
      // Rayleigh-difference hook is enabled).
      const double pu = std::norm(st.a_up), pd = std::norm(st.a_down);
      const double hu = pu * ru, hd = pd * rd, hx = (pu + pd) * rx;
      const double z = uni(rng) * (hu + hd + hx);
      if (z < hu) {
        st.coherent = false;
        st.basis = pick_destination(ground_index(spin_up()), uni(rng));
      } else if (z < hu + hd) {
        st.coherent = false;
        st.basis = pick_destination(ground_index(spin_down()), uni(rng));
      } else {
        st.coherent = false;
        st.basis = uni(rng) * (pu + pd) < pu ? ground_index(spin_up())
                                             : ground_index(spin_down());
      }
    }
  }

  void advance_coherent(TrajState& st, double t) const {
    const std::complex<double> i(0.0, 1.0);
    st.a_up *= std::exp(-0.5 * channel_.out_up * t) * std::exp(-i * channel_.stark * t);
    st.a_down *= std::exp(-0.5 * channel_.out_down * t);
    const double n = std::sqrt(std::norm(st.a_up) + std::norm(st.a_down));
    st.a_up /= n;
    st.a_down /= n;
  }

  int pick_destination(int from, double u) const {
    const double total = -matrix_.generator(from, from);
    double acc = 0.0;
    int last = -1;
    for (int f = 0; f < kGroundCount; ++f) {
      if (f == from) continue;
      const double r = matrix_.generator(f, from);
      if (r <= 0.0) continue;
      acc += r / total;
      last = f;
      if (u < acc) return f;
    }
    return last >= 0 ? last : from;
  }

  RateMatrix matrix_;
  DecoherenceChannel channel_;
};

struct CoherenceFit {
  FitResult tau_dec;   // estimate in seconds
  double amplitude = 0.0;
};

/// Exponential fit A e^{-tau/tau_dec} of a contrast curve.
inline CoherenceFit fit_coherence_decay(std::span<const ContrastPoint> points) {
  if (points.size() < 5)
    throw std::invalid_argument("fit_coherence_decay: need at least 5 points");

  std::vector<double> w(points.size());
  for (std::size_t i = 0; i < points.size(); ++i)
    w[i] = points[i].std_error > 0 ? 1.0 / points[i].std_error : 1.0;

  // Log-linear seed over the clearly positive samples.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (const auto& p : points) {
    if (p.contrast <= 1e-6) continue;
    sx += p.tau;
    sy += std::log(p.contrast);
    sxx += p.tau * p.tau;
    sxy += p.tau * std::log(p.contrast);
    ++n;
  }
  double rate0 = 0.0, amp0 = 1.0;
  if (n >= 2 && n * sxx - sx * sx > 0) {
    rate0 = std::max(0.0, -(n * sxy - sx * sy) / (n * sxx - sx * sx));
    amp0 = std::exp((sy + rate0 * sx) / n);
  }

  const auto residuals = [&](const Eigen::VectorXd& x) {
    Eigen::VectorXd r(static_cast<Eigen::Index>(points.size()));
    for (std::size_t i = 0; i < points.size(); ++i)
      r[static_cast<Eigen::Index>(i)] =
          w[i] * (x[0] * std::exp(-x[1] * points[i].tau) - points[i].contrast);
    return r;
  };

  const LeastSquares ls = levenberg_marquardt(residuals, Eigen::Vector2d(amp0, rate0));

  CoherenceFit fit;
  fit.amplitude = ls.params[0];
  const double rate = ls.params[1];
  const double sigma_rate = std::sqrt(std::max(0.0, ls.covariance(1, 1)));
  fit.tau_dec.converged = ls.converged;
  fit.tau_dec.iterations = ls.iterations;
  fit.tau_dec.residual_norm = ls.residual_norm;
  fit.tau_dec.degenerate = !(rate > 0.0) || sigma_rate >= rate;
  fit.tau_dec.estimate = rate > 0.0 ? 1.0 / rate : 0.0;
  fit.tau_dec.std_error = rate > 0.0 ? sigma_rate / (rate * rate) : 0.0;
  return fit;
}

}  // namespace hfs
