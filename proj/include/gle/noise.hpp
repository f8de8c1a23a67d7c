#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "gle/kernel.hpp"

namespace gle {

// Identifies the random draws of one ensemble member: streams are derived
// from (seed, path_index, role), never from call order.
struct StreamConfig {
  std::uint64_t seed = 0;
  std::uint64_t path_index = 0;
};

// A sampled realization of the stationary Gaussian forcing F on a uniform
// grid, with per-mode OU component values at the final grid point so a path
// can be continued exactly.
struct ForcingPath {
  double t0 = 0.0;
  double dt = 0.0;
  std::vector<double> values;       // F at t0 + i*dt, i = 0..n_steps
  std::vector<double> mode_states;  // per-mode component at the final point
  StreamConfig stream;
  std::uint64_t draws_per_mode = 0;  // normals consumed on each mode stream
};

struct AutocovEstimate {
  std::vector<double> lags;
  std::vector<double> estimates;
  std::vector<double> std_errors;
  std::size_t n_paths = 0;
};

class NegativeEigenvalueError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Stationary forcing: each mode starts from its exact stationary law
// f_l ~ N(0, c_l) and advances by the exact OU update, so every one-point
// marginal is N(0, K(0)) with no discretization bias.
ForcingPath sample_forcing_ou(const SumExpKernel& k, double t0, double dt,
                              std::size_t n_steps, const StreamConfig& stream);

// Forcing started from given mode states (no stationary initial draw); with
// all-zero states this is the forcing seen by a zero initial past, and its
// per-step normals line up one-to-one with the embedded scheme's auxiliary
// increments.
ForcingPath sample_forcing_from_states(const SumExpKernel& k,
                                       std::vector<double> mode_states, double t0,
                                       double dt, std::size_t n_steps,
                                       const StreamConfig& stream,
                                       std::uint64_t draws_already_taken);

// Exact continuation: appends n_steps more points, consuming the next draws
// of the same per-mode streams.
ForcingPath continue_forcing(const SumExpKernel& k, const ForcingPath& prev,
                             std::size_t n_steps);

// Exact sampler for a general stationary covariance via circulant embedding.
// Throws NegativeEigenvalueError when the embedding is not PSD.
ForcingPath sample_forcing_circulant(const std::function<double(double)>& cov, double dt,
                                     std::size_t n_steps, const StreamConfig& stream);

// Unbiased cross-ensemble autocovariance with per-lag Monte Carlo standard
// errors; lags must be grid-aligned and all paths must share the grid.
AutocovEstimate empirical_autocov(const std::vector<ForcingPath>& paths,
                                  const std::vector<double>& lags);

struct SupSquareEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n_paths = 0;
};

// Monte Carlo estimate of E sup_{[0,T]} F(t)^2 over the sampling grid.
SupSquareEstimate sup_square_statistic(const SumExpKernel& k, double horizon,
                                       std::size_t n_paths, double dt,
                                       std::uint64_t seed);

}  // namespace gle
