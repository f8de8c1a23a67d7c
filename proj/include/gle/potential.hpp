#pragma once

#include <functional>
#include <stdexcept>
#include <string>

namespace gle {

// Confining potential with a stored witness (b, delta) for the coercivity
// estimate b (U(x) + 1) >= |x|^(1+delta).
class Potential {
 public:
  enum class Kind { Quadratic, DoubleWell, Free, Custom };

  static Potential quadratic();    // U = x^2 / 2
  static Potential double_well();  // U = x^4/4 - x^2/2 + 1/4
  // U == 0; used only for unconstrained diffusion runs, exempt from the
  // coercivity check.
  static Potential free();
  static Potential custom(std::function<double(double)> u,
                          std::function<double(double)> du, double witness_b,
                          double witness_delta);

  double value(double x) const;
  double grad(double x) const;
  Kind kind() const { return kind_; }
  double witness_b() const { return b_; }
  double witness_delta() const { return delta_; }
  const std::string& name() const { return name_; }

  // Scans x in [-50, 50]: the witness inequality must hold and U' must match
  // central differences of U to O(h^2).  Throws on violation.
  void check_assumption() const;

 private:
  Kind kind_ = Kind::Free;
  std::function<double(double)> u_, du_;
  double b_ = 0.0, delta_ = 0.0;
  std::string name_;
};

}  // namespace gle
