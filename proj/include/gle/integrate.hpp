#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "gle/history.hpp"
#include "gle/kernel.hpp"
#include "gle/noise.hpp"
#include "gle/potential.hpp"
#include "gle/rng.hpp"

namespace gle {

// A NaN/overflow appeared while stepping; in exact dynamics the energy
// estimate rules this out, so it signals a dt too large for the config.
class NonFiniteError : public std::runtime_error {
 public:
  NonFiniteError(std::size_t step, std::uint64_t path)
      : std::runtime_error("non-finite state at step " + std::to_string(step) +
                           " (path " + std::to_string(path) + ")"),
        step(step), path_index(path) {}
  std::size_t step;
  std::uint64_t path_index;
};

inline double hamiltonian(double x, double v, const Potential& potential) {
  return 0.5 * v * v + potential.value(x);
}

// Markovian-embedding state (x, v, z_1..z_M) with the weighted-norm exponent s.
struct ExtendedState {
  double x = 0.0;
  double v = 0.0;
  std::vector<double> z;
  double s_param = 1.0;
};

// Validates 2s > 1 (and 2s < alpha*beta when the kernel carries power-law
// parameters) and that z matches the kernel's mode count.
ExtendedState make_extended_state(const SumExpKernel& k, double x, double v,
                                  std::vector<double> z, double s_param);

// ||X||_{-s}^2 = x^2 + v^2 + sum_l l^{-2s} z_l^2, returned as the norm.
double embed_norm(const ExtendedState& state);

struct Trajectory {
  double t0 = 0.0;
  double dt = 0.0;
  std::size_t stride = 1;
  std::vector<double> t, x, v, H;
  std::string scheme;
  std::uint64_t seed = 0;
  std::uint64_t path_index = 0;
  std::string config_hash;
};

// Increment sources.  Integrators consume steps in increasing order; both
// schemes share the Wiener stream, and the embedded scheme's auxiliary
// streams coincide with the forcing-mode streams so that direct and embedded
// runs can be driven by the same draws.
class GaussianIncrements {
 public:
  GaussianIncrements(const SumExpKernel& k, double dt, const StreamConfig& stream)
      : wiener_(stream.seed, rng::stream_id(stream.path_index, rng::Role::Wiener)),
        sqrt_dt_(std::sqrt(dt)) {
    aux_.reserve(k.mode_count());
    for (std::size_t l = 0; l < k.mode_count(); ++l)
      aux_.emplace_back(stream.seed,
                        rng::stream_id(stream.path_index, rng::Role::ForcingMode, l));
  }

  double wiener(std::size_t) { return sqrt_dt_ * wiener_.next(); }
  // Negated so that the auxiliary noise, which reaches the velocity through
  // -sqrt(c) z, reproduces the forcing built from the same mode streams; the
  // law is unchanged (the draws are symmetric).
  double aux(std::size_t mode, std::size_t) { return -sqrt_dt_ * aux_[mode].next(); }

 private:
  rng::NormalStream wiener_;
  std::vector<rng::NormalStream> aux_;
  double sqrt_dt_;
};

struct ZeroIncrements {
  double wiener(std::size_t) { return 0.0; }
  double aux(std::size_t, std::size_t) { return 0.0; }
};

// Direct scheme: explicit Euler-Maruyama with the memory term split into the
// analytic initial-past part and a trapezoid convolution over the computed
// trajectory, truncated at lag memory_window.
template <class Inc>
Trajectory run_direct(const SumExpKernel& k, const Potential& potential,
                      const InitialPast& past, const ForcingPath& forcing, double dt,
                      std::size_t n_steps, double memory_window, Inc& inc,
                      std::size_t record_stride = 1, std::uint64_t path_index = 0) {
  if (!(dt > 0.0)) throw std::invalid_argument("run_direct: dt must be > 0");
  if (!(memory_window >= 0.0))
    throw std::invalid_argument("run_direct: memory_window must be >= 0");
  if (forcing.values.size() < n_steps ||
      (n_steps > 0 && std::abs(forcing.dt - dt) > 1e-12 * dt))
    throw std::invalid_argument("run_direct: forcing grid does not match (dt, n_steps)");
  if (record_stride == 0) record_stride = 1;

  const std::vector<double> past_moments = past_velocity_moments(k, past);
  const auto window_lags =
      static_cast<std::size_t>(std::llround(memory_window / dt));
  std::vector<double> kernel_table(std::min(window_lags, n_steps) + 1);
  for (std::size_t j = 0; j < kernel_table.size(); ++j)
    kernel_table[j] = k.eval(dt * static_cast<double>(j));

  Trajectory traj;
  traj.t0 = 0.0;
  traj.dt = dt;
  traj.stride = record_stride;
  traj.scheme = "direct";
  traj.path_index = path_index;

  std::vector<double> v_hist;
  v_hist.reserve(n_steps + 1);
  double x = past.x_end();
  double v = past.v_end();
  v_hist.push_back(v);

  auto record = [&](std::size_t n) {
    traj.t.push_back(dt * static_cast<double>(n));
    traj.x.push_back(x);
    traj.v.push_back(v);
    traj.H.push_back(hamiltonian(x, v, potential));
  };
  record(0);

  for (std::size_t n = 0; n < n_steps; ++n) {
    const double t = dt * static_cast<double>(n);
    double mem = memory_integral(k, std::span<const double>(past_moments), t);
    // Trapezoid of K(t - r) v(r) over stored history within the window.
    const std::size_t jmin = n > window_lags ? n - window_lags : 0;
    if (n > jmin) {
      double conv = 0.5 * (kernel_table[n - jmin] * v_hist[jmin] + kernel_table[0] * v);
      for (std::size_t j = jmin + 1; j < n; ++j)
        conv += kernel_table[n - j] * v_hist[j];
      mem += conv * dt;
    }
    const double f = forcing.values[n];
    const double v_new =
        v + dt * (-v - potential.grad(x) - mem + f) + std::sqrt(2.0) * inc.wiener(n);
    const double x_new = x + dt * v;
    x = x_new;
    v = v_new;
    v_hist.push_back(v);
    if (!std::isfinite(x) || !std::isfinite(v)) throw NonFiniteError(n, path_index);
    if ((n + 1) % record_stride == 0 || n + 1 == n_steps) record(n + 1);
  }
  return traj;
}

// Embedded scheme stepping with an observer called as obs(step, x, v) for
// every step including step 0.  The z-update uses exact OU decay for the
// linear part and Euler for the velocity coupling.
template <class Inc, class Obs>
void step_embedded(const SumExpKernel& k, const Potential& potential, ExtendedState& state,
                   double dt, std::size_t n_steps, Inc& inc, Obs&& obs,
                   std::uint64_t path_index = 0) {
  if (!(dt > 0.0)) throw std::invalid_argument("run_embedded: dt must be > 0");
  const std::size_t m = k.mode_count();
  if (state.z.size() != m)
    throw std::invalid_argument("run_embedded: state does not match kernel");
  std::vector<double> decay(m), sqrt_c(m), noise_scale(m);
  for (std::size_t l = 0; l < m; ++l) {
    decay[l] = std::exp(-k.modes()[l].lambda * dt);
    sqrt_c[l] = std::sqrt(k.modes()[l].c);
    noise_scale[l] = std::sqrt(2.0 * k.modes()[l].lambda);
  }
  obs(std::size_t{0}, state.x, state.v);
  for (std::size_t n = 0; n < n_steps; ++n) {
    double coupling = 0.0;
    for (std::size_t l = 0; l < m; ++l) coupling += sqrt_c[l] * state.z[l];
    const double v_new = state.v +
                         dt * (-state.v - potential.grad(state.x) - coupling) +
                         std::sqrt(2.0) * inc.wiener(n);
    const double x_new = state.x + dt * state.v;
    for (std::size_t l = 0; l < m; ++l)
      state.z[l] = decay[l] * state.z[l] + sqrt_c[l] * state.v * dt +
                   noise_scale[l] * inc.aux(l, n);
    state.x = x_new;
    state.v = v_new;
    if (!std::isfinite(state.x) || !std::isfinite(state.v))
      throw NonFiniteError(n, path_index);
    obs(n + 1, state.x, state.v);
  }
}

template <class Inc>
Trajectory run_embedded(const SumExpKernel& k, const Potential& potential,
                        ExtendedState state, double dt, std::size_t n_steps, Inc& inc,
                        std::size_t record_stride = 1, std::uint64_t path_index = 0) {
  if (record_stride == 0) record_stride = 1;
  Trajectory traj;
  traj.t0 = 0.0;
  traj.dt = dt;
  traj.stride = record_stride;
  traj.scheme = "embedded";
  traj.path_index = path_index;
  step_embedded(k, potential, state, dt, n_steps, inc,
                [&](std::size_t n, double x, double v) {
                  if (n % record_stride == 0 || n == n_steps) {
                    traj.t.push_back(dt * static_cast<double>(n));
                    traj.x.push_back(x);
                    traj.v.push_back(v);
                    traj.H.push_back(hamiltonian(x, v, potential));
                  }
                },
                path_index);
  return traj;
}

struct EnergyDiagnostic {
  double e_sup_h = 0.0;
  double std_error = 0.0;
  bool finite = true;
  std::vector<std::size_t> nonfinite_paths;
};

// Monte Carlo estimate of E sup_t H over an ensemble of trajectories sharing
// a config; paths containing non-finite rows are reported, not averaged.
EnergyDiagnostic energy_diagnostic(const std::vector<Trajectory>& ensemble);

}  // namespace gle
