#include "gle.h"

#include <cmath>
#include <cstring>
#include <string>

#include "gle/config.hpp"
#include "gle/experiment.hpp"
#include "gle/kernel.hpp"

namespace {

thread_local std::string g_last_error;

void set_error(const char* what) { g_last_error = what; }

gle::SumExpKernel* unwrap(gle_kernel* k) {
  return reinterpret_cast<gle::SumExpKernel*>(k);
}
const gle::SumExpKernel* unwrap(const gle_kernel* k) {
  return reinterpret_cast<const gle::SumExpKernel*>(k);
}
const gle::ExperimentConfig* unwrap(const gle_config* c) {
  return reinterpret_cast<const gle::ExperimentConfig*>(c);
}

template <class Fn>
double eval_or_nan(Fn&& fn) {
  try {
    return fn();
  } catch (const std::exception& err) {
    set_error(err.what());
    return std::nan("");
  }
}

}  // namespace

extern "C" {

const char* gle_last_error(void) { return g_last_error.c_str(); }

gle_kernel* gle_kernel_powerlaw(double alpha, double beta, double tail_tol) {
  try {
    auto* k = new gle::SumExpKernel(gle::SumExpKernel::power_law(alpha, beta, tail_tol));
    return reinterpret_cast<gle_kernel*>(k);
  } catch (const std::exception& err) {
    set_error(err.what());
    return nullptr;
  }
}

gle_kernel* gle_kernel_modes(const double* c, const double* lambda, size_t n) {
  try {
    std::vector<gle::Mode> modes;
    modes.reserve(n);
    for (size_t i = 0; i < n; ++i) modes.push_back(gle::Mode{c[i], lambda[i]});
    auto* k = new gle::SumExpKernel(gle::SumExpKernel::from_modes(std::move(modes)));
    return reinterpret_cast<gle_kernel*>(k);
  } catch (const std::exception& err) {
    set_error(err.what());
    return nullptr;
  }
}

void gle_kernel_free(gle_kernel* k) { delete unwrap(k); }

double gle_kernel_eval(const gle_kernel* k, double t) {
  return eval_or_nan([&] { return unwrap(k)->eval(t); });
}

double gle_kernel_deriv(const gle_kernel* k, double t) {
  return eval_or_nan([&] { return unwrap(k)->deriv(t); });
}

double gle_kernel_tail_ratio_bound(const gle_kernel* k, double t) {
  return eval_or_nan([&] { return unwrap(k)->tail_ratio_bound(t); });
}

size_t gle_kernel_mode_count(const gle_kernel* k) { return unwrap(k)->mode_count(); }

double gle_kernel_tail_mass(const gle_kernel* k) { return unwrap(k)->tail_mass(); }

double gle_kernel_gamma2_bound(const gle_kernel* k, double horizon) {
  return eval_or_nan([&] { return gle::chaining_bound(*unwrap(k), horizon).gamma2_bound; });
}

gle_config* gle_config_parse(const char* text) {
  try {
    auto* c = new gle::ExperimentConfig(gle::ExperimentConfig::parse(text));
    return reinterpret_cast<gle_config*>(c);
  } catch (const std::exception& err) {
    set_error(err.what());
    return nullptr;
  }
}

void gle_config_free(gle_config* config) {
  delete reinterpret_cast<gle::ExperimentConfig*>(config);
}

int gle_config_hash(const gle_config* config, char* buf, size_t len) {
  const std::string h = unwrap(config)->hash();
  if (len < h.size() + 1) {
    set_error("buffer too small for config hash");
    return GLE_ERR_VALIDATION;
  }
  std::memcpy(buf, h.c_str(), h.size() + 1);
  return GLE_OK;
}

size_t gle_config_serialize(const gle_config* config, char* buf, size_t len) {
  const std::string s = unwrap(config)->serialize();
  if (buf != nullptr && len > 0) {
    const size_t n = std::min(len - 1, s.size());
    std::memcpy(buf, s.data(), n);
    buf[n] = '\0';
  }
  return s.size();
}

int gle_run(const gle_config* config, const char* subcommand) {
  try {
    return gle::run_experiment(*unwrap(config), subcommand);
  } catch (const std::exception& err) {
    set_error(err.what());
    return GLE_ERR_INTERNAL;
  }
}

}  // extern "C"
