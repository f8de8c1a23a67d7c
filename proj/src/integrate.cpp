#include "gle/integrate.hpp"

#include <limits>

namespace gle {

ExtendedState make_extended_state(const SumExpKernel& k, double x, double v,
                                  std::vector<double> z, double s_param) {
  if (z.size() != k.mode_count())
    throw std::invalid_argument("extended state: z must have one entry per mode");
  if (!(2.0 * s_param > 1.0))
    throw std::invalid_argument("extended state: need 2s > 1");
  if (k.has_powerlaw_params() && !(2.0 * s_param < k.alpha() * k.beta()))
    throw std::invalid_argument("extended state: need 2s < alpha*beta");
  ExtendedState state;
  state.x = x;
  state.v = v;
  state.z = std::move(z);
  state.s_param = s_param;
  return state;
}

double embed_norm(const ExtendedState& state) {
  double sq = state.x * state.x + state.v * state.v;
  for (std::size_t l = 0; l < state.z.size(); ++l) {
    const double weight = std::pow(static_cast<double>(l + 1), -2.0 * state.s_param);
    sq += weight * state.z[l] * state.z[l];
  }
  return std::sqrt(sq);
}

EnergyDiagnostic energy_diagnostic(const std::vector<Trajectory>& ensemble) {
  EnergyDiagnostic diag;
  double sum = 0.0, sumsq = 0.0;
  std::size_t good = 0;
  for (std::size_t p = 0; p < ensemble.size(); ++p) {
    double sup = -std::numeric_limits<double>::infinity();
    bool ok = !ensemble[p].H.empty();
    for (double h : ensemble[p].H) {
      if (!std::isfinite(h)) {
        ok = false;
        break;
      }
      sup = std::max(sup, h);
    }
    if (!ok) {
      diag.finite = false;
      diag.nonfinite_paths.push_back(ensemble[p].path_index);
      continue;
    }
    sum += sup;
    sumsq += sup * sup;
    ++good;
  }
  if (good > 0) {
    const double n = static_cast<double>(good);
    diag.e_sup_h = sum / n;
    if (good > 1) {
      const double var = std::max(0.0, (sumsq - n * diag.e_sup_h * diag.e_sup_h) / (n - 1.0));
      diag.std_error = std::sqrt(var / n);
    }
  }
  return diag;
}

}  // namespace gle
