#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace gle {

// Raised when alpha*beta <= 1: the weighted phase space needs an exponent s
// with 1 < 2s < alpha*beta, so such kernels are rejected outright.
class PhaseSpaceError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Mode {
  double c;       // weight, > 0
  double lambda;  // decay rate, > 0
};

// Memory kernel K(t) = sum_l c_l exp(-lambda_l t), modes sorted by
// decreasing lambda.  Immutable after construction.
class SumExpKernel {
 public:
  // Power-law family c_l = l^-(1+alpha*beta), lambda_l = l^-beta, truncated at
  // the smallest M whose integral tail bound M^(-alpha*beta)/(alpha*beta)
  // drops below tail_tol * K(0).
  static SumExpKernel power_law(double alpha, double beta, double tail_tol);

  // First `m` modes of the power-law family (tail mass recorded, not bounded
  // by a tolerance).
  static SumExpKernel power_law_modes(double alpha, double beta, std::size_t m);

  static SumExpKernel from_modes(std::vector<Mode> modes);

  // The empty kernel K == 0 (classical Langevin).
  static SumExpKernel zero() { return SumExpKernel(); }

  double eval(double t) const;
  double deriv(double t) const;
  double at_zero() const { return k0_; }

  // Provable envelope for sup_s K(t+s)/K(s) of the truncated kernel.
  double tail_ratio_bound(double t) const;

  std::size_t mode_count() const { return modes_.size(); }
  const std::vector<Mode>& modes() const { return modes_; }
  bool empty() const { return modes_.empty(); }

  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  bool has_powerlaw_params() const { return beta_ > 1.0; }
  double tail_mass() const { return tail_mass_; }
  double lambda_min() const;

 private:
  SumExpKernel() = default;
  std::vector<Mode> modes_;
  double alpha_ = 0.0;
  double beta_ = 0.0;
  double k0_ = 0.0;
  double tail_mass_ = 0.0;
};

struct ChainingReport {
  double horizon;
  double max_abs_kprime;
  double series_constant;
  double gamma2_bound;
};

// Value of sqrt(2) + sum_{n>=1} 2^((n+1)/2) / 2^(2^(n-1)).
double chaining_series_constant();

// Deterministic bound on the gamma_2 functional of F over [0, T]:
// sqrt(T * max |K'|) times the admissible-sequence series constant.
ChainingReport chaining_bound(const SumExpKernel& k, double horizon);

// Checks int_0^inf J(t+r) J(r) dr == c exp(-lambda t) for a single mode by
// adaptive quadrature; returns the max absolute deviation over t_grid.
double verify_component_consistency(const Mode& mode, std::span<const double> t_grid);

}  // namespace gle
