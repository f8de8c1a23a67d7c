#include "gle/stationary.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>

#include "gle/parallel.hpp"

namespace gle {

namespace {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max(d, std::abs(f - static_cast<double>(i) / n));
    d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
  }
  return d;
}

}  // namespace

BoltzmannSampler::BoltzmannSampler(const Potential& potential) {
  // Range: everything but ~1e-12 of the mass for the built-in potentials.
  double lo = -50.0, hi = 50.0;
  const double edge_u = std::min(potential.value(lo), potential.value(hi));
  double min_u = edge_u;
  const int coarse = 4096;
  for (int i = 0; i <= coarse; ++i) {
    const double x = lo + (hi - lo) * static_cast<double>(i) / coarse;
    min_u = std::min(min_u, potential.value(x));
  }
  if (edge_u - min_u < 40.0)
    throw std::invalid_argument(
        "invariant sampler: exp(-U) does not decay within the scan range; "
        "potential looks non-normalizable");
  // Shrink to where the density is representable.
  while (potential.value(lo + 1.0) - min_u > 60.0) lo += 1.0;
  while (potential.value(hi - 1.0) - min_u > 60.0) hi -= 1.0;

  const std::size_t n = (1u << 17) + 1;
  grid_.resize(n);
  cdf_.resize(n);
  const double h = (hi - lo) / static_cast<double>(n - 1);
  double acc = 0.0;
  double prev = std::exp(-(potential.value(lo) - min_u));
  grid_[0] = lo;
  cdf_[0] = 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    const double x = lo + h * static_cast<double>(i);
    const double cur = std::exp(-(potential.value(x) - min_u));
    acc += 0.5 * (prev + cur) * h;
    grid_[i] = x;
    cdf_[i] = acc;
    prev = cur;
  }
  for (double& c : cdf_) c /= acc;
}

double BoltzmannSampler::sample(double uniform01) const {
  const double u = std::clamp(uniform01, 0.0, 1.0);
  const auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
  if (it == cdf_.begin()) return grid_.front();
  if (it == cdf_.end()) return grid_.back();
  const std::size_t i = static_cast<std::size_t>(it - cdf_.begin());
  const double c0 = cdf_[i - 1], c1 = cdf_[i];
  const double w = c1 > c0 ? (u - c0) / (c1 - c0) : 0.0;
  return grid_[i - 1] + w * (grid_[i] - grid_[i - 1]);
}

double BoltzmannSampler::cdf(double x) const {
  if (x <= grid_.front()) return 0.0;
  if (x >= grid_.back()) return 1.0;
  const auto it = std::lower_bound(grid_.begin(), grid_.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - grid_.begin());
  const double x0 = grid_[i - 1], x1 = grid_[i];
  const double w = (x - x0) / (x1 - x0);
  return cdf_[i - 1] + w * (cdf_[i] - cdf_[i - 1]);
}

ExtendedState sample_invariant(const Potential& potential, const SumExpKernel& k,
                               double s_param, std::uint64_t seed,
                               std::uint64_t path_index) {
  rng::NormalStream normals(seed, rng::stream_id(path_index, rng::Role::InvariantDraw));
  double x;
  if (potential.kind() == Potential::Kind::Quadratic) {
    x = normals.next();
  } else {
    static thread_local const Potential* cached_pot = nullptr;
    static thread_local std::unique_ptr<BoltzmannSampler> cached;
    if (cached_pot != &potential) {
      cached = std::make_unique<BoltzmannSampler>(potential);
      cached_pot = &potential;
    }
    rng::UniformStream uniforms(seed,
                                rng::stream_id(path_index, rng::Role::InvariantUniform));
    x = cached->sample(uniforms.next());
  }
  const double v = normals.next();
  std::vector<double> z(k.mode_count());
  for (double& zl : z) zl = normals.next();
  return make_extended_state(k, x, v, std::move(z), s_param);
}

Eigen::MatrixXd lyapunov_oracle(const SumExpKernel& k) {
  const std::size_t m = k.mode_count();
  if (m > 256) throw std::invalid_argument("lyapunov_oracle: at most 256 modes");
  const auto n = static_cast<Eigen::Index>(2 + m);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(n, n);
  a(0, 1) = 1.0;
  a(1, 0) = -1.0;  // U'(x) = x
  a(1, 1) = -1.0;
  q(1, 1) = 2.0;
  for (std::size_t l = 0; l < m; ++l) {
    const auto i = static_cast<Eigen::Index>(2 + l);
    const double sc = std::sqrt(k.modes()[l].c);
    a(1, i) = -sc;
    a(i, 1) = sc;
    a(i, i) = -k.modes()[l].lambda;
    q(i, i) = 2.0 * k.modes()[l].lambda;
  }

  // Bartels-Stewart via complex Schur: A = U T U*, solve T X + X T* = -U* Q U.
  Eigen::ComplexSchur<Eigen::MatrixXd> schur(a);
  if (schur.info() != Eigen::Success)
    throw std::runtime_error("lyapunov_oracle: Schur decomposition failed");
  const Eigen::MatrixXcd t = schur.matrixT();
  const Eigen::MatrixXcd u = schur.matrixU();
  Eigen::MatrixXcd rhs = -(u.adjoint() * q * u);
  Eigen::MatrixXcd x = Eigen::MatrixXcd::Zero(n, n);
  for (Eigen::Index j = n - 1; j >= 0; --j) {
    for (Eigen::Index i = n - 1; i >= 0; --i) {
      std::complex<double> acc = rhs(i, j);
      for (Eigen::Index kk = i + 1; kk < n; ++kk) acc -= t(i, kk) * x(kk, j);
      for (Eigen::Index kk = j + 1; kk < n; ++kk) acc -= x(i, kk) * std::conj(t(j, kk));
      const std::complex<double> denom = t(i, i) + std::conj(t(j, j));
      if (std::abs(denom) < 1e-14)
        throw std::runtime_error("lyapunov_oracle: ill-conditioned drift (eigenvalue pair "
                                 "summing to ~0)");
      x(i, j) = acc / denom;
    }
  }
  Eigen::MatrixXd sigma = (u * x * u.adjoint()).real();
  return 0.5 * (sigma + sigma.transpose());
}

MsdReport msd_estimate(const MsdConfig& config) {
  const SumExpKernel& k = config.kernel;
  if (config.n_paths < 2) throw std::invalid_argument("msd: need at least 2 paths");
  if (!(config.horizon > 0.0) || !(config.dt > 0.0))
    throw std::invalid_argument("msd: horizon and dt must be > 0");
  const auto n_steps = static_cast<std::size_t>(std::llround(config.horizon / config.dt));

  // Log-spaced sample times over three decades up to the horizon.
  std::vector<std::size_t> steps;
  std::vector<double> times;
  for (std::size_t i = 0; i < config.n_times; ++i) {
    const double frac = static_cast<double>(i) / static_cast<double>(config.n_times - 1);
    const double t = config.horizon * std::pow(1e-3, 1.0 - frac);
    const auto s = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(t / config.dt)));
    if (!steps.empty() && s <= steps.back()) continue;
    steps.push_back(std::min(s, n_steps));
    times.push_back(config.dt * static_cast<double>(steps.back()));
  }

  const Potential potential = Potential::free();
  const std::size_t nt = steps.size();
  std::vector<double> xsq(config.n_paths * nt);
  parallel_for(config.n_paths, [&](std::size_t p) {
    ExtendedState state;
    state.x = 0.0;
    state.v = 0.0;
    state.z.resize(k.mode_count());
    rng::NormalStream init(config.seed, rng::stream_id(p, rng::Role::InvariantDraw));
    for (double& zl : state.z) zl = init.next();
    GaussianIncrements inc(k, config.dt, StreamConfig{config.seed, p});
    std::size_t cursor = 0;
    step_embedded(k, potential, state, config.dt, n_steps, inc,
                  [&](std::size_t n, double x, double) {
                    while (cursor < nt && steps[cursor] == n) {
                      xsq[p * nt + cursor] = x * x;
                      ++cursor;
                    }
                  },
                  p);
  });

  MsdReport report;
  report.times = times;
  report.msd.resize(nt);
  report.std_errors.resize(nt);
  const double np = static_cast<double>(config.n_paths);
  for (std::size_t i = 0; i < nt; ++i) {
    double sum = 0.0, sumsq = 0.0;
    for (std::size_t p = 0; p < config.n_paths; ++p) {
      const double v = xsq[p * nt + i];
      sum += v;
      sumsq += v * v;
    }
    report.msd[i] = sum / np;
    const double var = std::max(0.0, (sumsq - np * report.msd[i] * report.msd[i]) / (np - 1.0));
    report.std_errors[i] = std::sqrt(var / np);
  }

  // Least-squares slope of log(msd) vs log(t) over the final decade.
  report.fit_window_start = config.horizon / 10.0;
  report.fit_window_end = config.horizon;
  std::vector<std::size_t> fit_idx;
  for (std::size_t i = 0; i < nt; ++i)
    if (times[i] >= report.fit_window_start * (1.0 - 1e-9)) fit_idx.push_back(i);
  const auto slope_of = [&](const std::vector<double>& msd_at) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i : fit_idx) {
      const double lx = std::log(times[i]);
      const double ly = std::log(std::max(msd_at[i], 1e-300));
      sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
    }
    const double n = static_cast<double>(fit_idx.size());
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
  };
  report.fitted_exponent = slope_of(report.msd);

  // Path bootstrap for the exponent interval.
  const int n_boot = 200;
  std::vector<double> boot(n_boot);
  rng::UniformStream pick(config.seed, rng::stream_id(0, rng::Role::Bootstrap));
  std::vector<double> resampled(nt);
  for (int b = 0; b < n_boot; ++b) {
    std::fill(resampled.begin(), resampled.end(), 0.0);
    for (std::size_t p = 0; p < config.n_paths; ++p) {
      const auto pi = std::min<std::size_t>(
          config.n_paths - 1,
          static_cast<std::size_t>(pick.next() * static_cast<double>(config.n_paths)));
      for (std::size_t i = 0; i < nt; ++i) resampled[i] += xsq[pi * nt + i];
    }
    for (double& v : resampled) v /= np;
    boot[b] = slope_of(resampled);
  }
  std::sort(boot.begin(), boot.end());
  report.exponent_ci_low = boot[static_cast<std::size_t>(0.025 * n_boot)];
  report.exponent_ci_high = boot[static_cast<std::size_t>(0.975 * n_boot) - 1];
  return report;
}

KsResult ks_marginal_test(std::vector<double> xs, std::vector<double> vs,
                          const Potential& potential) {
  if (xs.empty() || xs.size() != vs.size())
    throw std::invalid_argument("ks test: need equal nonempty samples");
  KsResult r;
  r.threshold = 1.63 / std::sqrt(static_cast<double>(xs.size()));
  r.ks_v = ks_statistic(std::move(vs), normal_cdf);
  if (potential.kind() == Potential::Kind::Quadratic) {
    r.ks_x = ks_statistic(std::move(xs), normal_cdf);
  } else {
    BoltzmannSampler sampler(potential);
    r.ks_x = ks_statistic(std::move(xs), [&](double x) { return sampler.cdf(x); });
  }
  r.pass = r.ks_x < r.threshold && r.ks_v < r.threshold;
  return r;
}

CouplingReport coupling_experiment(const SumExpKernel& k, const Potential& potential,
                                   const InitialPast& past1, const InitialPast& past2,
                                   const std::vector<double>& horizon_ladder,
                                   const CouplingConfig& config) {
  if (horizon_ladder.empty())
    throw std::invalid_argument("coupling: horizon ladder must be nonempty");
  if (std::abs(past1.x_end() - past2.x_end()) > 1e-12 ||
      std::abs(past1.v_end() - past2.v_end()) > 1e-12)
    throw std::invalid_argument("coupling: pasts must agree at the endpoint r = 0");
  if (k.has_powerlaw_params() && k.alpha() > 0.5) {
    const double rho = 0.999 * (k.alpha() - 0.5);
    if (!std::isfinite(growth_norm(past1, rho)) || !std::isfinite(growth_norm(past2, rho)))
      throw std::invalid_argument("coupling: pasts must have finite moderate-growth norm");
  }

  const double dt = config.dt;
  const auto n_steps =
      static_cast<std::size_t>(std::llround(horizon_ladder.back() / dt));
  const StreamConfig stream{config.seed, config.path_index};
  const ForcingPath forcing = sample_forcing_ou(k, 0.0, dt, n_steps, stream);

  GaussianIncrements inc1(k, dt, stream);
  GaussianIncrements inc2(k, dt, stream);  // identical draws by construction
  const Trajectory t1 = run_direct(k, potential, past1, forcing, dt, n_steps,
                                   config.memory_window, inc1, 1, config.path_index);
  const Trajectory t2 = run_direct(k, potential, past2, forcing, dt, n_steps,
                                   config.memory_window, inc2, 1, config.path_index);

  CouplingReport report;
  report.seed = config.seed;
  report.horizons = horizon_ladder;
  double ax1 = 0, av1 = 0, ah1 = 0, ax2 = 0, av2 = 0, ah2 = 0;
  std::size_t row = 1;
  for (double horizon : horizon_ladder) {
    const auto upto = static_cast<std::size_t>(std::llround(horizon / dt));
    if (upto > n_steps) throw std::invalid_argument("coupling: ladder exceeds run length");
    for (; row <= upto; ++row) {
      ax1 += t1.x[row]; av1 += t1.v[row]; ah1 += std::min(t1.H[row], config.h_clip);
      ax2 += t2.x[row]; av2 += t2.v[row]; ah2 += std::min(t2.H[row], config.h_clip);
    }
    const double n = static_cast<double>(upto);
    report.gap_x.push_back(std::abs(ax1 - ax2) / n);
    report.gap_v.push_back(std::abs(av1 - av2) / n);
    report.gap_h.push_back(std::abs(ah1 - ah2) / n);
  }
  return report;
}

GrowthWindowStats growth_window_stats(const Trajectory& traj, double rho,
                                      std::size_t n_bins) {
  if (!(rho > 0.0)) throw std::invalid_argument("growth stats: rho must be > 0");
  if (n_bins == 0) throw std::invalid_argument("growth stats: need at least one bin");
  const double t_end = traj.t.back();
  const auto n_windows = static_cast<std::size_t>(std::floor(t_end));
  if (n_windows < n_bins)
    throw std::invalid_argument("growth stats: trajectory shorter than bin count");
  std::vector<std::size_t> exceed(n_bins, 0), total(n_bins, 0);
  std::size_t row = 0;
  for (std::size_t n = 1; n <= n_windows; ++n) {
    double sup = 0.0;
    while (row < traj.t.size() && traj.t[row] <= static_cast<double>(n) + 1e-12) {
      if (traj.t[row] >= static_cast<double>(n - 1))
        sup = std::max(sup, std::abs(traj.x[row]));
      ++row;
    }
    if (row > 0) --row;  // window boundary row belongs to the next window too
    const std::size_t bin = (n - 1) * n_bins / n_windows;
    ++total[bin];
    if (sup > std::pow(static_cast<double>(n + 1), rho)) ++exceed[bin];
  }
  GrowthWindowStats stats;
  for (std::size_t b = 0; b < n_bins; ++b) {
    stats.bin_upper.push_back(static_cast<double>((b + 1) * n_windows) /
                              static_cast<double>(n_bins));
    stats.exceed_fraction.push_back(static_cast<double>(exceed[b]) /
                                    static_cast<double>(total[b]));
  }
  return stats;
}

}  // namespace gle
