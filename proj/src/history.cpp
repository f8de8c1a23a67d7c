#include "gle/history.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <limits>

namespace gle {

namespace {

constexpr double kSpliceTol = 1e-9;

// int_{-inf}^{g} e^{lambda r} |r|^p dr  =  lambda^-(1+p) Gamma(1+p, lambda|g|),
// for g <= 0, p >= 0.
double tail_power_moment(double lambda, double g, double p) {
  return std::pow(lambda, -(1.0 + p)) * boost::math::tgamma(1.0 + p, lambda * std::abs(g));
}

// Trapezoid of e^{lambda r} f(r) over the grid [g, 0].
double grid_moment(double lambda, double grid_start, double dt,
                   const std::vector<double>& f) {
  if (f.size() < 2) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double r = grid_start + dt * static_cast<double>(i);
    const double w = (i == 0 || i + 1 == f.size()) ? 0.5 : 1.0;
    acc += w * std::exp(lambda * r) * f[i];
  }
  return acc * dt;
}

double tail_moment_x(const Tail& tail, double lambda, double g) {
  switch (tail.kind) {
    case Tail::Kind::Zero:
      return 0.0;
    case Tail::Kind::Constant:
      return tail.x_c * std::exp(lambda * g) / lambda;
    case Tail::Kind::PowerGrowth:
      return tail.coeff * (std::exp(lambda * g) / lambda +
                           tail_power_moment(lambda, g, tail.rho));
  }
  return 0.0;
}

double tail_moment_v(const Tail& tail, double lambda, double g) {
  switch (tail.kind) {
    case Tail::Kind::Zero:
      return 0.0;
    case Tail::Kind::Constant:
      return tail.v_c * std::exp(lambda * g) / lambda;
    case Tail::Kind::PowerGrowth:
      if (tail.rho == 0.0) return 0.0;
      // v(r) = -coeff * rho * |r|^(rho-1)
      return -tail.coeff * tail.rho * std::pow(lambda, -tail.rho) *
             boost::math::tgamma(tail.rho, lambda * std::abs(g));
  }
  return 0.0;
}

std::vector<double> moments(const SumExpKernel& k, const InitialPast& past, bool velocity) {
  std::vector<double> w(k.mode_count());
  const auto& f = velocity ? past.v_values() : past.x_values();
  for (std::size_t l = 0; l < k.mode_count(); ++l) {
    const double lambda = k.modes()[l].lambda;
    const double grid = grid_moment(lambda, past.grid_start(), past.dt(), f);
    const double tail = velocity ? tail_moment_v(past.tail(), lambda, past.grid_start())
                                 : tail_moment_x(past.tail(), lambda, past.grid_start());
    w[l] = grid + tail;
  }
  return w;
}

}  // namespace

double Tail::x_at(double r) const {
  switch (kind) {
    case Kind::Zero: return 0.0;
    case Kind::Constant: return x_c;
    case Kind::PowerGrowth: return coeff * (1.0 + std::pow(std::abs(r), rho));
  }
  return 0.0;
}

double Tail::v_at(double r) const {
  switch (kind) {
    case Kind::Zero: return 0.0;
    case Kind::Constant: return v_c;
    case Kind::PowerGrowth:
      if (rho == 0.0) return 0.0;
      return -coeff * rho * std::pow(std::abs(r), rho - 1.0);
  }
  return 0.0;
}

InitialPast::InitialPast(double grid_start, double dt, std::vector<double> x_values,
                         std::vector<double> v_values, Tail tail)
    : grid_start_(grid_start), dt_(dt), x_(std::move(x_values)), v_(std::move(v_values)),
      tail_(tail) {
  if (!(grid_start <= 0.0)) throw std::invalid_argument("past: grid_start must be <= 0");
  if (x_.empty() || x_.size() != v_.size())
    throw std::invalid_argument("past: x and v grids must be nonempty and equal length");
  if (x_.size() == 1 && grid_start != 0.0)
    throw std::invalid_argument("past: a single-point grid must sit at r = 0");
  if (x_.size() > 1) {
    if (!(dt > 0.0)) throw std::invalid_argument("past: dt must be > 0");
    const double span = dt * static_cast<double>(x_.size() - 1);
    if (std::abs(span + grid_start) > 1e-9 * (1.0 + std::abs(grid_start)))
      throw std::invalid_argument("past: grid must end at r = 0");
  }
  // A single point at r = 0 carries no history, only the start values, so the
  // splice check does not apply to it (the jump is invisible to every
  // integral over the past).
  if (x_.size() > 1 &&
      (std::abs(tail_.x_at(grid_start) - x_.front()) > kSpliceTol ||
       std::abs(tail_.v_at(grid_start) - v_.front()) > kSpliceTol))
    throw std::invalid_argument("past: tail does not splice onto the grid at grid_start");
}

InitialPast InitialPast::point(double x0, double v0) {
  return InitialPast(0.0, 0.0, {x0}, {v0}, Tail::zero());
}

std::vector<double> past_velocity_moments(const SumExpKernel& k, const InitialPast& past) {
  return moments(k, past, true);
}

std::vector<double> past_position_moments(const SumExpKernel& k, const InitialPast& past) {
  return moments(k, past, false);
}

double memory_integral(const SumExpKernel& k, std::span<const double> velocity_moments,
                       double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("memory_integral: t must be >= 0");
  double acc = 0.0;
  for (std::size_t l = 0; l < k.mode_count(); ++l)
    acc += k.modes()[l].c * std::exp(-k.modes()[l].lambda * t) * velocity_moments[l];
  return acc;
}

double memory_integral(const SumExpKernel& k, const InitialPast& past, double t) {
  const std::vector<double> w = past_velocity_moments(k, past);
  return memory_integral(k, std::span<const double>(w), t);
}

double growth_norm(const InitialPast& past, double rho) {
  if (!(rho > 0.0)) throw std::invalid_argument("growth_norm: rho must be > 0");
  double sup = 0.0;
  for (std::size_t i = 0; i < past.x_values().size(); ++i) {
    const double r = past.grid_start() + past.dt() * static_cast<double>(i);
    sup = std::max(sup, std::abs(past.x_values()[i]) / (1.0 + std::pow(std::abs(r), rho)));
  }
  const Tail& tail = past.tail();
  const double g = std::abs(past.grid_start());
  switch (tail.kind) {
    case Tail::Kind::Zero:
      break;
    case Tail::Kind::Constant:
      // |x_c| / (1 + |r|^rho) decreases as r recedes; sup on the tail at r = g.
      sup = std::max(sup, std::abs(tail.x_c) / (1.0 + std::pow(g, rho)));
      break;
    case Tail::Kind::PowerGrowth: {
      if (tail.rho > rho) return std::numeric_limits<double>::infinity();
      const double a = std::abs(tail.coeff);
      if (tail.rho == rho) {
        sup = std::max(sup, a);
        break;
      }
      // Ratio tends to 0 at infinity; scan a log grid for the max.
      const double lo = std::max(g, 1e-12);
      double best = a * (1.0 + std::pow(g, tail.rho)) / (1.0 + std::pow(g, rho));
      for (int i = 0; i <= 4096; ++i) {
        const double u = lo * std::pow(1e10 / lo, static_cast<double>(i) / 4096.0);
        best = std::max(best, a * (1.0 + std::pow(u, tail.rho)) / (1.0 + std::pow(u, rho)));
      }
      sup = std::max(sup, best);
      break;
    }
  }
  return sup;
}

NovikovReport novikov_integral(const SumExpKernel& k, const InitialPast& xbar,
                               const std::vector<double>& horizon_ladder) {
  if (horizon_ladder.empty())
    throw std::invalid_argument("novikov: horizon ladder must be nonempty");
  for (std::size_t j = 1; j < horizon_ladder.size(); ++j)
    if (!(horizon_ladder[j] > horizon_ladder[j - 1]) || !(horizon_ladder[0] > 0.0))
      throw std::invalid_argument("novikov: horizon ladder must be positive and increasing");

  // Inner integral int_{-inf}^0 K'(t-r) xbar(r) dr = -sum_l a_l e^{-lambda_l t}
  // with a_l = c_l lambda_l * (position moment); the squared t-integral is
  // then a pairwise closed form.
  const std::vector<double> m = past_position_moments(k, xbar);
  const std::size_t n = k.mode_count();
  std::vector<double> a(n);
  for (std::size_t l = 0; l < n; ++l) a[l] = k.modes()[l].c * k.modes()[l].lambda * m[l];

  NovikovReport report;
  report.horizons = horizon_ladder;
  report.partial_integrals.reserve(horizon_ladder.size());
  for (double T : horizon_ladder) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i; j < n; ++j) {
        const double rate = k.modes()[i].lambda + k.modes()[j].lambda;
        const double pair = a[i] * a[j] * (1.0 - std::exp(-rate * T)) / rate;
        acc += (i == j) ? pair : 2.0 * pair;
      }
    }
    report.partial_integrals.push_back(acc);
  }
  report.limit_estimate = report.partial_integrals.back();
  if (report.partial_integrals.size() >= 3) {
    const std::size_t last = report.partial_integrals.size() - 1;
    const double inc1 = report.partial_integrals[last] - report.partial_integrals[last - 1];
    const double inc2 =
        report.partial_integrals[last - 1] - report.partial_integrals[last - 2];
    const double gate = 1e-6 * (1.0 + report.limit_estimate);
    report.converged = inc1 < gate && inc2 < gate;
  }
  return report;
}

}  // namespace gle
