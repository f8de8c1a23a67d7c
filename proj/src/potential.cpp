#include "gle/potential.hpp"

#include <cmath>

namespace gle {

Potential Potential::quadratic() {
  Potential p;
  p.kind_ = Kind::Quadratic;
  p.u_ = [](double x) { return 0.5 * x * x; };
  p.du_ = [](double x) { return x; };
  p.b_ = 2.0;
  p.delta_ = 1.0;
  p.name_ = "quadratic";
  return p;
}

Potential Potential::double_well() {
  Potential p;
  p.kind_ = Kind::DoubleWell;
  p.u_ = [](double x) { return 0.25 * x * x * x * x - 0.5 * x * x + 0.25; };
  p.du_ = [](double x) { return x * x * x - x; };
  p.b_ = 4.0;
  p.delta_ = 1.0;
  p.name_ = "doublewell";
  return p;
}

Potential Potential::free() {
  Potential p;
  p.kind_ = Kind::Free;
  p.u_ = [](double) { return 0.0; };
  p.du_ = [](double) { return 0.0; };
  p.name_ = "free";
  return p;
}

Potential Potential::custom(std::function<double(double)> u,
                            std::function<double(double)> du, double witness_b,
                            double witness_delta) {
  Potential p;
  p.kind_ = Kind::Custom;
  p.u_ = std::move(u);
  p.du_ = std::move(du);
  p.b_ = witness_b;
  p.delta_ = witness_delta;
  p.name_ = "custom";
  return p;
}

double Potential::value(double x) const { return u_(x); }
double Potential::grad(double x) const { return du_(x); }

void Potential::check_assumption() const {
  if (kind_ == Kind::Free) return;
  if (!(b_ > 0.0) || !(delta_ > 0.0 && delta_ <= 1.0))
    throw std::invalid_argument("potential: witness requires b > 0 and delta in (0, 1]");
  const int n = 2000;
  const double h = 1e-5;
  for (int i = 0; i <= n; ++i) {
    const double x = -50.0 + 100.0 * static_cast<double>(i) / n;
    if (b_ * (u_(x) + 1.0) < std::pow(std::abs(x), 1.0 + delta_))
      throw std::invalid_argument("potential: coercivity witness fails at x = " +
                                  std::to_string(x));
    const double fd = (u_(x + h) - u_(x - h)) / (2.0 * h);
    if (std::abs(fd - du_(x)) > 1e-6 * (1.0 + std::abs(du_(x))) + 1e2 * h * h * std::abs(x))
      throw std::invalid_argument("potential: U' disagrees with finite differences at x = " +
                                  std::to_string(x));
  }
}

}  // namespace gle
