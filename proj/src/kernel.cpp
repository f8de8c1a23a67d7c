#include "gle/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gle {

namespace {

void check_time(double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("kernel: t must be >= 0");
}

// Adaptive Simpson on [a, b].
template <class F>
double adaptive_simpson(const F& f, double a, double b, double fa, double fm, double fb,
                        double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return adaptive_simpson(f, a, m, fa, flm, fm, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, 0.5 * tol, depth - 1);
}

template <class F>
double integrate(const F& f, double a, double b, double tol) {
  const double m = 0.5 * (a + b);
  return adaptive_simpson(f, a, b, f(a), f(m), f(b), tol, 40);
}

}  // namespace

SumExpKernel SumExpKernel::power_law(double alpha, double beta, double tail_tol) {
  if (!(alpha > 0.0)) throw std::invalid_argument("power_law: alpha must be > 0");
  if (!(beta > 1.0)) throw std::invalid_argument("power_law: beta must be > 1");
  if (!(tail_tol > 0.0 && tail_tol < 1.0))
    throw std::invalid_argument("power_law: tail_tol must lie in (0, 1)");
  const double ab = alpha * beta;
  if (ab <= 1.0)
    throw PhaseSpaceError(
        "power_law: alpha*beta must exceed 1 (no admissible phase-space exponent s "
        "with 1 < 2s < alpha*beta)");

  SumExpKernel k;
  k.alpha_ = alpha;
  k.beta_ = beta;
  double partial = 0.0;
  std::size_t m = 0;
  double tail = std::numeric_limits<double>::infinity();
  while (true) {
    ++m;
    const double l = static_cast<double>(m);
    partial += std::pow(l, -(1.0 + ab));
    tail = std::pow(l, -ab) / ab;
    if (tail <= tail_tol * partial) break;
    if (m > 50'000'000)
      throw std::invalid_argument("power_law: tail_tol requires too many modes");
  }
  k.modes_.reserve(m);
  for (std::size_t l = 1; l <= m; ++l) {
    const double ld = static_cast<double>(l);
    k.modes_.push_back(Mode{std::pow(ld, -(1.0 + ab)), std::pow(ld, -beta)});
  }
  k.k0_ = partial;
  k.tail_mass_ = tail;
  return k;
}

SumExpKernel SumExpKernel::power_law_modes(double alpha, double beta, std::size_t m) {
  if (!(alpha > 0.0)) throw std::invalid_argument("power_law_modes: alpha must be > 0");
  if (!(beta > 1.0)) throw std::invalid_argument("power_law_modes: beta must be > 1");
  if (m == 0) throw std::invalid_argument("power_law_modes: need at least one mode");
  const double ab = alpha * beta;
  if (ab <= 1.0)
    throw PhaseSpaceError(
        "power_law_modes: alpha*beta must exceed 1 (no admissible phase-space exponent s "
        "with 1 < 2s < alpha*beta)");
  SumExpKernel k;
  k.alpha_ = alpha;
  k.beta_ = beta;
  k.modes_.reserve(m);
  double partial = 0.0;
  for (std::size_t l = 1; l <= m; ++l) {
    const double ld = static_cast<double>(l);
    const double c = std::pow(ld, -(1.0 + ab));
    partial += c;
    k.modes_.push_back(Mode{c, std::pow(ld, -beta)});
  }
  k.k0_ = partial;
  k.tail_mass_ = std::pow(static_cast<double>(m), -ab) / ab;
  return k;
}

SumExpKernel SumExpKernel::from_modes(std::vector<Mode> modes) {
  for (const Mode& mode : modes) {
    if (!(mode.c > 0.0)) throw std::invalid_argument("from_modes: weights must be > 0");
    if (!(mode.lambda > 0.0)) throw std::invalid_argument("from_modes: rates must be > 0");
  }
  std::sort(modes.begin(), modes.end(),
            [](const Mode& a, const Mode& b) { return a.lambda > b.lambda; });
  SumExpKernel k;
  k.modes_ = std::move(modes);
  for (const Mode& mode : k.modes_) k.k0_ += mode.c;
  return k;
}

double SumExpKernel::eval(double t) const {
  check_time(t);
  double s = 0.0;
  for (const Mode& m : modes_) s += m.c * std::exp(-m.lambda * t);
  return s;
}

double SumExpKernel::deriv(double t) const {
  check_time(t);
  double s = 0.0;
  for (const Mode& m : modes_) s += m.c * m.lambda * std::exp(-m.lambda * t);
  return -s;
}

double SumExpKernel::lambda_min() const {
  if (modes_.empty()) return std::numeric_limits<double>::infinity();
  return modes_.back().lambda;  // sorted by decreasing lambda
}

double SumExpKernel::tail_ratio_bound(double t) const {
  check_time(t);
  if (modes_.empty()) return t == 0.0 ? 1.0 : 0.0;
  return std::exp(-lambda_min() * t);
}

double chaining_series_constant() {
  double s = std::sqrt(2.0);
  for (int n = 1; n <= 12; ++n) {
    const double term =
        std::exp2(0.5 * (n + 1)) / std::exp2(std::exp2(static_cast<double>(n - 1)));
    s += term;
    if (term < 1e-300) break;
  }
  return s;
}

ChainingReport chaining_bound(const SumExpKernel& k, double horizon) {
  if (!(horizon >= 0.0)) throw std::invalid_argument("chaining_bound: horizon must be >= 0");
  ChainingReport r;
  r.horizon = horizon;
  // |K'| is decreasing for a sum of exponentials, so the max over [0, T] sits
  // at t = 0.
  r.max_abs_kprime = std::abs(k.deriv(0.0));
  r.series_constant = chaining_series_constant();
  r.gamma2_bound = std::sqrt(horizon * r.max_abs_kprime) * r.series_constant;
  return r;
}

double verify_component_consistency(const Mode& mode, std::span<const double> t_grid) {
  const double c = mode.c;
  const double lam = mode.lambda;
  const double amp = 2.0 * c * lam;  // J(t) J(r) prefactor
  double worst = 0.0;
  for (double t : t_grid) {
    check_time(t);
    // int_0^inf J(t+r) J(r) dr with J(u) = sqrt(2 c lam) e^{-lam u};
    // integrate out to where the integrand is below machine noise.
    const double upper = 40.0 / lam;
    const auto f = [&](double r) { return amp * std::exp(-lam * (t + 2.0 * r)); };
    const double got = integrate(f, 0.0, upper, 1e-12 * c);
    const double want = c * std::exp(-lam * t);
    worst = std::max(worst, std::abs(got - want));
  }
  return worst;
}

}  // namespace gle
