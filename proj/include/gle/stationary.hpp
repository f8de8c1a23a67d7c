#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "gle/history.hpp"
#include "gle/integrate.hpp"
#include "gle/kernel.hpp"
#include "gle/noise.hpp"
#include "gle/potential.hpp"

namespace gle {

// Tabulated inverse CDF of the density proportional to exp(-U) on a range
// covering all but ~1e-12 of the mass.  Deterministic and reusable.
class BoltzmannSampler {
 public:
  explicit BoltzmannSampler(const Potential& potential);
  double sample(double uniform01) const;  // inverse CDF
  double cdf(double x) const;

 private:
  std::vector<double> grid_, cdf_;
};

// Draw from the invariant measure: v and every z_l standard normal, x from
// exp(-U) (exact normal for the quadratic potential).
ExtendedState sample_invariant(const Potential& potential, const SumExpKernel& k,
                               double s_param, std::uint64_t seed,
                               std::uint64_t path_index);

// Stationary covariance of the quadratic-potential embedded system, from the
// continuous Lyapunov equation A S + S A^T + B B^T = 0.  Independent of the
// simulation path; any drift-assembly error shows up as S != I.
Eigen::MatrixXd lyapunov_oracle(const SumExpKernel& k);

struct MsdReport {
  std::vector<double> times;
  std::vector<double> msd;
  std::vector<double> std_errors;
  double fitted_exponent = 0.0;
  double exponent_ci_low = 0.0;
  double exponent_ci_high = 0.0;
  double fit_window_start = 0.0;
  double fit_window_end = 0.0;
};

struct MsdConfig {
  SumExpKernel kernel = SumExpKernel::zero();
  std::size_t n_paths = 100;
  double horizon = 1000.0;
  double dt = 0.05;
  std::uint64_t seed = 0;
  std::size_t n_times = 48;  // log-spaced sample times
};

// Ensemble MSD from x(0) = v(0) = 0 with stationary z(0); exponent fitted by
// least squares on the final decade of log-times, CI by path bootstrap.
MsdReport msd_estimate(const MsdConfig& config);

struct KsResult {
  double ks_x = 0.0;
  double ks_v = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

// Two-sided KS of the (x, v) samples against the exp(-H) marginals; passes
// iff both statistics are below 1.63 / sqrt(n)  (alpha ~ 0.01).
KsResult ks_marginal_test(std::vector<double> xs, std::vector<double> vs,
                          const Potential& potential);

struct CouplingReport {
  std::vector<double> horizons;
  std::vector<double> gap_x, gap_v, gap_h;  // |avg1 - avg2| of running time averages
  std::uint64_t seed = 0;
};

struct CouplingConfig {
  double dt = 0.01;
  double memory_window = 50.0;
  std::uint64_t seed = 0;
  std::uint64_t path_index = 0;
  double h_clip = 10.0;  // cap for the clipped-Hamiltonian functional
};

// Evolves two initial pasts (equal endpoints required) under identical
// Wiener and forcing draws and reports the gap of running time averages at
// each ladder horizon.
CouplingReport coupling_experiment(const SumExpKernel& k, const Potential& potential,
                                   const InitialPast& past1, const InitialPast& past2,
                                   const std::vector<double>& horizon_ladder,
                                   const CouplingConfig& config);

struct GrowthWindowStats {
  std::vector<double> bin_upper;      // window-index bin edges
  std::vector<double> exceed_fraction;  // fraction of windows with sup|x| > (n+1)^rho
};

// Fraction of unit windows [n-1, n] whose sup|x| exceeds (n+1)^rho, binned in
// n: a summability proxy for the moderate-growth class.
GrowthWindowStats growth_window_stats(const Trajectory& traj, double rho,
                                      std::size_t n_bins);

}  // namespace gle
