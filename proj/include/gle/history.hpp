#pragma once

#include <vector>

#include "gle/kernel.hpp"

namespace gle {

// Analytic model of the trajectory on (-inf, grid_start).
struct Tail {
  enum class Kind { Zero, Constant, PowerGrowth };
  Kind kind = Kind::Zero;
  double x_c = 0.0, v_c = 0.0;    // Constant
  double coeff = 0.0, rho = 0.0;  // PowerGrowth: x(r) = coeff * (1 + |r|^rho)

  static Tail zero() { return Tail{}; }
  static Tail constant(double x, double v) {
    return Tail{Kind::Constant, x, v, 0.0, 0.0};
  }
  static Tail power_growth(double coeff, double rho) {
    return Tail{Kind::PowerGrowth, 0.0, 0.0, coeff, rho};
  }

  double x_at(double r) const;
  double v_at(double r) const;
};

// A trajectory on (-inf, 0]: uniform grid samples on [grid_start, 0] plus an
// analytic tail.  The tail must splice continuously onto the first grid
// sample (checked to 1e-9 at construction).
class InitialPast {
 public:
  InitialPast(double grid_start, double dt, std::vector<double> x_values,
              std::vector<double> v_values, Tail tail);

  // Degenerate past: single grid point at r = 0, zero tail.
  static InitialPast point(double x0, double v0);

  double grid_start() const { return grid_start_; }
  double dt() const { return dt_; }
  const std::vector<double>& x_values() const { return x_; }
  const std::vector<double>& v_values() const { return v_; }
  const Tail& tail() const { return tail_; }

  double x_end() const { return x_.back(); }  // x(0)
  double v_end() const { return v_.back(); }  // v(0)

 private:
  double grid_start_;
  double dt_;
  std::vector<double> x_, v_;
  Tail tail_;
};

// Per-mode weighted moments w_l = int_{-inf}^0 e^{lambda_l r} f(r) dr for
// f = v (memory integral) or f = x (Novikov inner integral); grid part by
// trapezoid, tail part in closed form.
std::vector<double> past_velocity_moments(const SumExpKernel& k, const InitialPast& past);
std::vector<double> past_position_moments(const SumExpKernel& k, const InitialPast& past);

// int_{-inf}^0 K(t - r) v0(r) dr for t >= 0.
double memory_integral(const SumExpKernel& k, const InitialPast& past, double t);

// Same, but with precomputed velocity moments (for per-step use).
double memory_integral(const SumExpKernel& k, std::span<const double> velocity_moments,
                       double t);

// sup_{r<=0} |x0(r)| / (1 + |r|^rho); +inf when the tail outgrows rho.
double growth_norm(const InitialPast& past, double rho);

struct NovikovReport {
  std::vector<double> horizons;
  std::vector<double> partial_integrals;
  bool converged = false;
  double limit_estimate = 0.0;
};

// Partial values of int_0^T ( int_{-inf}^0 K'(t-r) xbar(r) dr )^2 dt on an
// increasing horizon ladder; converged when the last two ladder increments
// drop below 1e-6 * (1 + limit_estimate).
NovikovReport novikov_integral(const SumExpKernel& k, const InitialPast& xbar,
                               const std::vector<double>& horizon_ladder);

}  // namespace gle
