#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "gle/kernel.hpp"
#include "gle/noise.hpp"
#include "gle/parallel.hpp"

using gle::ForcingPath;
using gle::Mode;
using gle::StreamConfig;
using gle::SumExpKernel;

namespace {

std::vector<ForcingPath> ou_ensemble(const SumExpKernel& k, double dt,
                                     std::size_t n_steps, std::size_t n_paths,
                                     std::uint64_t seed) {
  std::vector<ForcingPath> paths(n_paths);
  gle::parallel_for(n_paths, [&](std::size_t i) {
    paths[i] = gle::sample_forcing_ou(k, 0.0, dt, n_steps, StreamConfig{seed, i});
  });
  return paths;
}

}  // namespace

TEST_CASE("stationary OU forcing: variance matches K(0)") {
  const auto k = SumExpKernel::from_modes({Mode{1.0, 1.0}});
  const auto paths = ou_ensemble(k, 0.5, 8, 20000, 11);
  // one-point marginal exact at every grid point: within 4 s.e. of K(0)
  for (std::size_t i = 0; i <= 8; ++i) {
    double m2 = 0.0;
    for (const auto& p : paths) m2 += p.values[i] * p.values[i];
    m2 /= static_cast<double>(paths.size());
    const double se = m2 * std::sqrt(2.0 / static_cast<double>(paths.size()));
    CHECK(std::abs(m2 - k.at_zero()) < 4.0 * se);
  }
}

TEST_CASE("single mode lagged covariance matches e^{-tau}") {
  const auto k = SumExpKernel::from_modes({Mode{1.0, 1.0}});
  const auto paths = ou_ensemble(k, 0.25, 8, 100000, 3);
  const auto est = gle::empirical_autocov(paths, {0.0, 1.0, 2.0});
  const double targets[] = {1.0, std::exp(-1.0), std::exp(-2.0)};
  for (std::size_t j = 0; j < 3; ++j)
    CHECK(std::abs(est.estimates[j] - targets[j]) < 3.0 * est.std_errors[j]);
}

TEST_CASE("deterministic decay over one step (structure check)") {
  // f(t+dt) = e^{-lambda dt} f(t) + noise; with dt = ln 2 the decay factor is
  // exactly 1/2.  Verified through two paths sharing every draw but shifted
  // initial states is not expressible via the public API, so check the exact
  // recursion constants instead via a 1-step variance identity:
  // Var(f1 - decay f0) = c (1 - decay^2).
  const double dt = std::log(2.0);
  const auto k = SumExpKernel::from_modes({Mode{1.0, 1.0}});
  const std::size_t n = 200000;
  double m2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto p = gle::sample_forcing_ou(k, 0.0, dt, 1, StreamConfig{99, i});
    const double innov = p.values[1] - 0.5 * p.values[0];
    m2 += innov * innov;
  }
  m2 /= static_cast<double>(n);
  const double target = 1.0 - 0.25;
  const double se = target * std::sqrt(2.0 / static_cast<double>(n));
  CHECK(std::abs(m2 - target) < 4.0 * se);
}

TEST_CASE("FDT: autocovariance matches kernel_eval at lags 0,1,2,5") {
  for (const auto& k : {SumExpKernel::power_law(1.0, 2.0, 1e-4),
                        SumExpKernel::from_modes({Mode{0.8, 0.6}})}) {
    const double dt = 0.5;
    const auto paths = ou_ensemble(k, dt, 10, 10000, 17);
    const std::vector<double> lags = {0.0, 1.0, 2.0, 5.0};
    const auto est = gle::empirical_autocov(paths, lags);
    for (std::size_t j = 0; j < lags.size(); ++j)
      CHECK(std::abs(est.estimates[j] - k.eval(lags[j])) < 3.0 * est.std_errors[j]);
  }
}

TEST_CASE("autocov at lag 0 for powerlaw(1,2) recovers K(0) ~ zeta(3)") {
  const auto k = SumExpKernel::power_law(1.0, 2.0, 1e-6);
  const auto paths = ou_ensemble(k, 1.0, 4, 10000, 5);
  const auto est = gle::empirical_autocov(paths, {0.0});
  CHECK(std::abs(est.estimates[0] - 1.2020569) < 3.0 * est.std_errors[0]);
}

TEST_CASE("autocov degenerate input: constant zero path") {
  ForcingPath p;
  p.t0 = 0.0;
  p.dt = 1.0;
  p.values = {0.0, 0.0, 0.0, 0.0};
  const auto est = gle::empirical_autocov({p}, {0.0, 1.0});
  CHECK(est.estimates[0] == 0.0);
  CHECK(est.estimates[1] == 0.0);
  CHECK(est.std_errors[0] == 0.0);
}

TEST_CASE("autocov rejects mismatched grids and off-grid lags") {
  const auto k = SumExpKernel::from_modes({Mode{1.0, 1.0}});
  auto a = gle::sample_forcing_ou(k, 0.0, 0.5, 4, StreamConfig{1, 0});
  auto b = gle::sample_forcing_ou(k, 0.0, 0.25, 4, StreamConfig{1, 1});
  CHECK_THROWS(gle::empirical_autocov({a, b}, {0.0}));
  CHECK_THROWS(gle::empirical_autocov({a}, {0.3}));
}

TEST_CASE("circulant sampler: lag-1 correlation of e^{-t}") {
  const std::size_t n = 100000;
  double sum0 = 0.0, sum1 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto p = gle::sample_forcing_circulant(
        [](double t) { return std::exp(-t); }, 1.0, 1, StreamConfig{7, i});
    sum0 += p.values[0] * p.values[0];
    sum1 += p.values[0] * p.values[1];
  }
  const double var = sum0 / static_cast<double>(n);
  const double cov = sum1 / static_cast<double>(n);
  const double se = std::sqrt(2.0 / static_cast<double>(n));
  CHECK(std::abs(var - 1.0) < 4.0 * se);
  CHECK(std::abs(cov - std::exp(-1.0)) < 4.0 * se);
}

TEST_CASE("circulant sampler: white covariance gives i.i.d. draws") {
  const double sigma2 = 2.5;
  const auto cov = [&](double t) { return t == 0.0 ? sigma2 : 0.0; };
  const std::size_t n = 50000;
  double m2 = 0.0, cross = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto p = gle::sample_forcing_circulant(cov, 1.0, 3, StreamConfig{21, i});
    for (double v : p.values) m2 += v * v;
    cross += p.values[0] * p.values[1];
  }
  m2 /= static_cast<double>(4 * n);
  cross /= static_cast<double>(n);
  CHECK(m2 == doctest::Approx(sigma2).epsilon(0.03));
  CHECK(std::abs(cross) < 4.0 * sigma2 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("circulant sampler: constant covariance gives a flat path") {
  const auto p = gle::sample_forcing_circulant([](double) { return 4.0; }, 0.5, 5,
                                               StreamConfig{2, 0});
  for (double v : p.values) CHECK(v == doctest::Approx(p.values[0]).epsilon(1e-9));
}

TEST_CASE("circulant sampler rejects non-PSD embeddings") {
  // a deep negative dip makes the even extension indefinite
  const auto cov = [](double t) { return t == 0.0 ? 1.0 : -0.9; };
  CHECK_THROWS_AS(gle::sample_forcing_circulant(cov, 1.0, 4, StreamConfig{0, 0}),
                  gle::NegativeEigenvalueError);
}

TEST_CASE("samplers cross-validate on a single-mode kernel") {
  const auto k = SumExpKernel::from_modes({Mode{1.0, 1.0}});
  const std::size_t n = 30000;
  double ou0 = 0.0, ou1 = 0.0, ci0 = 0.0, ci1 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto a = gle::sample_forcing_ou(k, 0.0, 1.0, 1, StreamConfig{31, i});
    const auto b = gle::sample_forcing_circulant(
        [&](double t) { return k.eval(t); }, 1.0, 1, StreamConfig{32, i});
    ou0 += a.values[0] * a.values[0];
    ou1 += a.values[0] * a.values[1];
    ci0 += b.values[0] * b.values[0];
    ci1 += b.values[0] * b.values[1];
  }
  const double dn = static_cast<double>(n);
  const double se = 4.0 * std::sqrt(2.0 / dn);  // generous joint band
  CHECK(std::abs(ou0 / dn - ci0 / dn) < se);
  CHECK(std::abs(ou1 / dn - ci1 / dn) < se);
}

TEST_CASE("continuation equals one long sample, bit for bit") {
  const auto k = SumExpKernel::power_law(1.0, 2.0, 1e-2);
  const StreamConfig stream{123, 7};
  const auto full = gle::sample_forcing_ou(k, 0.0, 0.25, 40, stream);
  const auto head = gle::sample_forcing_ou(k, 0.0, 0.25, 20, stream);
  // the continuation starts at the junction point and appends 20 new values
  const auto cont = gle::continue_forcing(k, head, 20);
  REQUIRE(cont.values.size() == 21);
  CHECK(cont.t0 == doctest::Approx(5.0));
  for (std::size_t i = 0; i <= 20; ++i)
    CHECK(cont.values[i] == full.values[20 + i]);
  for (std::size_t l = 0; l < k.mode_count(); ++l)
    CHECK(cont.mode_states[l] == full.mode_states[l]);
}

TEST_CASE("determinism: identical (seed, config) gives identical bytes") {
  const auto k = SumExpKernel::power_law(1.0, 2.0, 1e-2);
  const auto a = gle::sample_forcing_ou(k, 0.0, 0.1, 50, StreamConfig{5, 2});
  const auto b = gle::sample_forcing_ou(k, 0.0, 0.1, 50, StreamConfig{5, 2});
  CHECK(a.values == b.values);
  CHECK(a.mode_states == b.mode_states);
  const auto c = gle::sample_forcing_ou(k, 0.0, 0.1, 50, StreamConfig{5, 3});
  CHECK(a.values != c.values);
}

TEST_CASE("sup-square statistic: lower bound and grid-limit behavior") {
  const auto k = SumExpKernel::from_modes({Mode{1.0, 1.0}});
  const auto est = gle::sup_square_statistic(k, 1.0, 20000, 0.02, 42);
  CHECK(est.mean >= k.at_zero() - 3.0 * est.std_error);

  // T -> 0: single-interval grid, estimate near E F^2 = K(0)
  const auto tiny = gle::sup_square_statistic(k, 1e-9, 4000, 1e-9, 42);
  CHECK(tiny.mean == doctest::Approx(k.at_zero()).epsilon(0.1));

  // stability under dt halving (self-refinement)
  const auto half = gle::sup_square_statistic(k, 1.0, 20000, 0.01, 42);
  CHECK(std::abs(half.mean - est.mean) < 0.05 * est.mean);
}

TEST_CASE("forcing precondition violations") {
  const auto k = SumExpKernel::from_modes({Mode{1.0, 1.0}});
  CHECK_THROWS(gle::sample_forcing_ou(k, 0.0, 0.0, 5, StreamConfig{0, 0}));
  CHECK_THROWS(gle::sample_forcing_ou(k, 0.0, -0.5, 5, StreamConfig{0, 0}));
  CHECK_THROWS(gle::sample_forcing_ou(k, 0.0, 0.5, 0, StreamConfig{0, 0}));
}
