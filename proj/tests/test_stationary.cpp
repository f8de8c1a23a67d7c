#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <vector>

#include "gle/parallel.hpp"
#include "gle/stationary.hpp"

using gle::CouplingConfig;
using gle::GaussianIncrements;
using gle::InitialPast;
using gle::Mode;
using gle::Potential;
using gle::StreamConfig;
using gle::SumExpKernel;
using gle::Tail;

TEST_CASE("lyapunov identity: stationary covariance is the identity") {
  for (std::size_t m : {1, 4, 16, 64}) {
    const auto k = SumExpKernel::power_law_modes(1.0, 2.0, m);
    const auto sigma = gle::lyapunov_oracle(k);
    const auto n = sigma.rows();
    REQUIRE(n == static_cast<Eigen::Index>(2 + m));
    const double dev =
        (sigma - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff();
    CHECK(dev < 1e-8);
  }
  // empty kernel: classical Langevin, 2x2
  const auto sigma = gle::lyapunov_oracle(SumExpKernel::zero());
  REQUIRE(sigma.rows() == 2);
  CHECK((sigma - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("invariant sampler: quadratic x and aux marginals") {
  const auto k = SumExpKernel::power_law_modes(1.0, 2.0, 4);
  const std::size_t n = 20000;
  double sx = 0, sxx = 0, sz = 0, szz = 0;
  for (std::size_t p = 0; p < n; ++p) {
    const auto st = gle::sample_invariant(Potential::quadratic(), k, 0.75, 5, p);
    sx += st.x;
    sxx += st.x * st.x;
    sz += st.z[3];
    szz += st.z[3] * st.z[3];
  }
  const double dn = static_cast<double>(n);
  const double se_mean = 1.0 / std::sqrt(dn);
  const double se_var = std::sqrt(2.0 / dn);
  CHECK(std::abs(sx / dn) < 4.0 * se_mean);
  CHECK(std::abs(sxx / dn - 1.0) < 4.0 * se_var);
  CHECK(std::abs(sz / dn) < 4.0 * se_mean);
  CHECK(std::abs(szz / dn - 1.0) < 4.0 * se_var);
}

TEST_CASE("invariant sampler: double-well histogram, chi-square") {
  const auto pot = Potential::double_well();
  const auto k = SumExpKernel::power_law_modes(1.0, 2.0, 1);
  const gle::BoltzmannSampler target(pot);
  // 64 equal-probability bins via the tabulated CDF
  const std::size_t bins = 64, n = 20000;
  std::vector<std::size_t> counts(bins, 0);
  for (std::size_t p = 0; p < n; ++p) {
    const auto st = gle::sample_invariant(pot, k, 0.75, 6, p);
    auto b = static_cast<std::size_t>(target.cdf(st.x) * static_cast<double>(bins));
    counts[std::min(b, bins - 1)]++;
  }
  const double expected = static_cast<double>(n) / static_cast<double>(bins);
  double stat = 0.0;
  for (std::size_t b = 0; b < bins; ++b) {
    const double d = static_cast<double>(counts[b]) - expected;
    stat += d * d / expected;
  }
  const boost::math::chi_squared dist(static_cast<double>(bins - 1));
  CHECK(stat < boost::math::quantile(dist, 0.99));  // p > 0.01
}

TEST_CASE("boltzmann sampler round trip") {
  const gle::BoltzmannSampler s(Potential::double_well());
  for (double u : {0.05, 0.3, 0.5, 0.7, 0.95})
    CHECK(s.cdf(s.sample(u)) == doctest::Approx(u).epsilon(1e-6));
}

TEST_CASE("ks marginal test: own target passes, shifted fails") {
  const auto k = SumExpKernel::power_law_modes(1.0, 2.0, 2);
  const std::size_t n = 10000;
  std::vector<double> xs(n), vs(n);
  for (std::size_t p = 0; p < n; ++p) {
    const auto st = gle::sample_invariant(Potential::quadratic(), k, 0.75, 7, p);
    xs[p] = st.x;
    vs[p] = st.v;
  }
  CHECK(gle::ks_marginal_test(xs, vs, Potential::quadratic()).pass);
  std::vector<double> shifted = xs;
  for (double& x : shifted) x += 1.0;
  CHECK_FALSE(gle::ks_marginal_test(shifted, vs, Potential::quadratic()).pass);
}

TEST_CASE("stationarity propagates under the embedded dynamics") {
  const auto k = SumExpKernel::power_law_modes(1.0, 2.0, 16);
  const auto pot = Potential::quadratic();
  const double dt = 1e-3;
  const std::size_t n_steps = 1000, paths = 2000;
  std::vector<double> xs(paths), vs(paths);
  gle::parallel_for(paths, [&](std::size_t p) {
    auto st = gle::sample_invariant(pot, k, 0.75, 31, p);
    GaussianIncrements inc(k, dt, StreamConfig{31, p});
    gle::step_embedded(k, pot, st, dt, n_steps, inc, [](std::size_t, double, double) {});
    xs[p] = st.x;
    vs[p] = st.v;
  });
  CHECK(gle::ks_marginal_test(xs, vs, pot).pass);
}

TEST_CASE("msd exponents: classical diffusion") {
  gle::MsdConfig c;
  c.kernel = SumExpKernel::zero();
  c.n_paths = 500;
  c.horizon = 1e4;
  c.dt = 0.1;
  c.seed = 77;
  const auto rep = gle::msd_estimate(c);
  CHECK(rep.fitted_exponent == doctest::Approx(1.0).epsilon(0.1));
  CHECK(rep.exponent_ci_low < rep.fitted_exponent);
  CHECK(rep.exponent_ci_high > rep.fitted_exponent);
  for (double m : rep.msd) CHECK(m >= 0.0);

  c.kernel = SumExpKernel::power_law_modes(1.0, 2.0, 1);
  const auto single = gle::msd_estimate(c);
  CHECK(single.fitted_exponent == doctest::Approx(1.0).epsilon(0.15));
}

TEST_CASE("coupling: identical pasts give zero gap") {
  const auto k = SumExpKernel::power_law_modes(1.0, 2.0, 2);
  const auto past = InitialPast::point(0.5, 0.0);
  CouplingConfig cc;
  cc.seed = 3;
  const auto rep = gle::coupling_experiment(k, Potential::quadratic(), past, past,
                                            {1.0, 5.0, 10.0}, cc);
  for (double g : rep.gap_x) CHECK(g == 0.0);
  for (double g : rep.gap_v) CHECK(g == 0.0);
}

TEST_CASE("coupling: endpoint mismatch rejected") {
  const auto k = SumExpKernel::power_law_modes(1.0, 2.0, 2);
  CouplingConfig cc;
  CHECK_THROWS(gle::coupling_experiment(k, Potential::quadratic(),
                                        InitialPast::point(0.0, 0.0),
                                        InitialPast::point(1.0, 0.0), {1.0}, cc));
}

TEST_CASE("coupling: gap decays for pasts differing before r = -1") {
  const auto k = SumExpKernel::power_law(0.8, 2.0, 1e-4);
  const double dt = 0.01;
  const auto n = static_cast<std::size_t>(std::llround(2.0 / dt));
  std::vector<double> zeros(n + 1, 0.0), v2(n + 1, 0.0);
  for (std::size_t i = 0; i <= n; ++i) {
    const double r = -2.0 + dt * static_cast<double>(i);
    if (r < -1.0) v2[i] = 3.0 * std::pow(std::sin(M_PI * (r + 1.0)), 2);
  }
  const InitialPast p1(-2.0, dt, zeros, zeros, Tail::zero());
  const InitialPast p2(-2.0, dt, zeros, v2, Tail::zero());
  CouplingConfig cc;
  cc.dt = dt;
  cc.memory_window = 100.0;
  cc.seed = 2024;
  const std::vector<double> ladder = {10.0, 30.0, 100.0, 300.0, 1000.0};
  const auto rep =
      gle::coupling_experiment(k, Potential::quadratic(), p1, p2, ladder, cc);
  // monotone decay over the ladder, and last < first for both functionals
  for (std::size_t j = 1; j < ladder.size(); ++j) {
    CHECK(rep.gap_x[j] < rep.gap_x[j - 1]);
    CHECK(rep.gap_v[j] < rep.gap_v[j - 1]);
  }
  CHECK(rep.gap_x.back() < rep.gap_x.front());
  CHECK(rep.gap_v.back() < rep.gap_v.front());
}

TEST_CASE("constant x-difference reaches the drift through -K'") {
  // inner integral of the measure-change drift: for xbar == 1 and K = e^-t,
  // -sum c lambda m e^{-lambda t} = -e^-t, so -1 at t = 0
  const auto k = SumExpKernel::from_modes({Mode{1.0, 1.0}});
  const std::size_t n = 1000;
  std::vector<double> xs(n + 1, 1.0), vs(n + 1, 0.0);
  const InitialPast ones(-1.0, 1e-3, xs, vs, Tail::constant(1.0, 0.0));
  const auto m = gle::past_position_moments(k, ones);
  double inner0 = 0.0;
  for (std::size_t l = 0; l < m.size(); ++l)
    inner0 -= k.modes()[l].c * k.modes()[l].lambda * m[l];
  CHECK(inner0 == doctest::Approx(-1.0).epsilon(1e-6));
}

TEST_CASE("moderate growth: window exceedance fractions decay") {
  const auto k = SumExpKernel::power_law_modes(1.0, 2.0, 4);
  const auto pot = Potential::quadratic();
  const double dt = 0.01;
  const auto n = static_cast<std::size_t>(std::llround(1000.0 / dt));
  auto st = gle::sample_invariant(pot, k, 0.75, 12, 0);
  GaussianIncrements inc(k, dt, StreamConfig{12, 0});
  const auto traj = gle::run_embedded(k, pot, st, dt, n, inc);
  const auto stats = gle::growth_window_stats(traj, 1.0, 5);
  for (std::size_t b = 1; b < stats.exceed_fraction.size(); ++b)
    CHECK(stats.exceed_fraction[b] <= stats.exceed_fraction[b - 1]);
  CHECK(stats.exceed_fraction.back() == doctest::Approx(0.0));
}
