#include "gle/experiment.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>

#include "gle/integrate.hpp"
#include "gle/noise.hpp"
#include "gle/parallel.hpp"
#include "gle/stationary.hpp"

namespace gle {

namespace {

using nlohmann::json;

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << content;
}

void write_json(const std::string& path, const json& j) {
  write_text(path, j.dump(2) + "\n");
}

struct Ctx {
  const ExperimentConfig& config;
  std::string out;
  std::string hash;
  std::uint64_t seed;

  explicit Ctx(const ExperimentConfig& c)
      : config(c),
        out(c.str("out", "out")),
        hash(c.hash()),
        seed(static_cast<std::uint64_t>(c.integer("seed", 0))) {}

  json report_base() const { return json{{"config_hash", hash}, {"seed", seed}}; }
};

std::string trajectory_csv(const Trajectory& traj) {
  std::string csv = "t,x,v,H\n";
  for (std::size_t i = 0; i < traj.t.size(); ++i) {
    csv += format_double(traj.t[i]);
    csv += ',';
    csv += format_double(traj.x[i]);
    csv += ',';
    csv += format_double(traj.v[i]);
    csv += ',';
    csv += format_double(traj.H[i]);
    csv += '\n';
  }
  return csv;
}

double default_memory_window(const Ctx& ctx, const SumExpKernel& k, double horizon) {
  if (ctx.config.has("memory_window")) return ctx.config.number("memory_window", 0.0);
  if (k.empty()) return 0.0;
  return std::min(horizon, 12.0 / k.lambda_min());
}

double default_s_param(const Ctx& ctx, const SumExpKernel& k) {
  if (ctx.config.has("s_param")) return ctx.config.number("s_param", 0.75);
  if (k.has_powerlaw_params()) {
    // Midpoint of the admissible band 1 < 2s < alpha*beta.
    return 0.25 * (1.0 + k.alpha() * k.beta());
  }
  return 0.75;
}

int cmd_kernel_info(const Ctx& ctx) {
  const SumExpKernel k = ctx.config.kernel();
  const double horizon = ctx.config.number("horizon", 1.0);
  const ChainingReport chain = chaining_bound(k, horizon);
  json j = ctx.report_base();
  j["m"] = k.mode_count();
  j["k0"] = k.at_zero();
  j["kprime0"] = k.deriv(0.0);
  j["tail_mass"] = k.tail_mass();
  j["lambda_min"] = k.empty() ? json() : json(k.lambda_min());
  j["gamma2"] = {{"horizon", chain.horizon},
                 {"max_abs_kprime", chain.max_abs_kprime},
                 {"series_constant", chain.series_constant},
                 {"gamma2_bound", chain.gamma2_bound}};
  std::cout << "K(0) = " << format_double(k.at_zero())
            << "\nK'(0) = " << format_double(k.deriv(0.0)) << "\nM = " << k.mode_count()
            << "\ntail_mass = " << format_double(k.tail_mass())
            << "\ngamma2_bound(T=" << format_double(horizon)
            << ") = " << format_double(chain.gamma2_bound) << "\n";
  write_json(ctx.out + "_kernel_info.json", j);
  return kExitOk;
}

int cmd_sample_noise(const Ctx& ctx) {
  const SumExpKernel k = ctx.config.kernel();
  const double dt = ctx.config.number("dt", 0.01);
  const auto steps = static_cast<std::size_t>(ctx.config.integer("steps", 1000));
  const auto n_paths = static_cast<std::size_t>(ctx.config.integer("paths", 1));
  const std::string sampler = ctx.config.str("sampler", "ou");

  std::vector<ForcingPath> paths(n_paths);
  parallel_for(n_paths, [&](std::size_t p) {
    const StreamConfig stream{ctx.seed, p};
    if (sampler == "circulant") {
      paths[p] = sample_forcing_circulant([&](double t) { return k.eval(t); }, dt, steps,
                                          stream);
    } else {
      paths[p] = sample_forcing_ou(k, 0.0, dt, steps, stream);
    }
  });

  std::string csv = "t,F\n";
  for (std::size_t i = 0; i < paths[0].values.size(); ++i) {
    csv += format_double(dt * static_cast<double>(i));
    csv += ',';
    csv += format_double(paths[0].values[i]);
    csv += '\n';
  }
  write_text(ctx.out + "_noise.csv", csv);

  if (ctx.config.has("sup_window")) {
    const double window = ctx.config.number("sup_window", 1.0);
    double sum = 0.0, sumsq = 0.0;
    for (const ForcingPath& path : paths) {
      double sup = 0.0;
      const auto last = std::min(
          path.values.size() - 1, static_cast<std::size_t>(std::llround(window / dt)));
      for (std::size_t i = 0; i <= last; ++i)
        sup = std::max(sup, path.values[i] * path.values[i]);
      sum += sup;
      sumsq += sup * sup;
    }
    const double n = static_cast<double>(n_paths);
    const double mean = sum / n;
    const double var = n > 1 ? std::max(0.0, (sumsq - n * mean * mean) / (n - 1.0)) : 0.0;
    const ChainingReport chain = chaining_bound(k, window);
    json j = ctx.report_base();
    j["window"] = window;
    j["dt"] = dt;
    j["n_paths"] = n_paths;
    j["e_sup_f2"] = mean;
    j["se"] = std::sqrt(var / n);
    j["k0"] = k.at_zero();
    j["gamma2"] = {{"series_constant", chain.series_constant},
                   {"gamma2_bound", chain.gamma2_bound}};
    write_json(ctx.out + "_supsq.json", j);
  }

  if (const json* lags_spec = ctx.config.raw("lags")) {
    const std::vector<double> lags = lags_spec->get<std::vector<double>>();
    const AutocovEstimate est = empirical_autocov(paths, lags);
    json j = ctx.report_base();
    j["lags"] = est.lags;
    j["estimates"] = est.estimates;
    j["std_errors"] = est.std_errors;
    j["n_paths"] = est.n_paths;
    std::vector<double> kv;
    for (double lag : lags) kv.push_back(k.eval(lag));
    j["kernel_values"] = kv;
    write_json(ctx.out + "_autocov.json", j);
  }
  return kExitOk;
}

int cmd_simulate(const Ctx& ctx) {
  const SumExpKernel k = ctx.config.kernel();
  const Potential potential = ctx.config.potential();
  potential.check_assumption();
  const std::string scheme = ctx.config.str("scheme", "embedded");
  const double dt = ctx.config.number("dt", 0.01);
  const auto steps = static_cast<std::size_t>(ctx.config.integer("steps", 1000));
  const auto n_paths = static_cast<std::size_t>(ctx.config.integer("paths", 1));
  const auto stride = static_cast<std::size_t>(ctx.config.integer("stride", 1));
  const double horizon = dt * static_cast<double>(steps);
  const double window = default_memory_window(ctx, k, horizon);
  const double s_param = default_s_param(ctx, k);
  const std::string init = ctx.config.str("init", "zero");

  json summary = ctx.report_base();
  summary["scheme"] = scheme;
  summary["n_paths"] = n_paths;
  if (steps == 0) {
    write_text(ctx.out + "_trajectory.csv", "t,x,v,H\n");
    summary["e_sup_H"] = 0.0;
    summary["se"] = 0.0;
    summary["nonfinite_count"] = 0;
    write_json(ctx.out + "_summary.json", summary);
    return kExitOk;
  }

  std::vector<Trajectory> ensemble(n_paths);
  std::vector<json> failures(n_paths);
  parallel_for(n_paths, [&](std::size_t p) {
    try {
      const StreamConfig stream{ctx.seed, p};
      GaussianIncrements inc(k, dt, stream);
      if (scheme == "direct") {
        const InitialPast past = ctx.config.initial_past("past");
        // zero_state forcing starts every mode at 0 instead of its stationary
        // draw; it is the forcing seen by a zero past and lines up draw-for-
        // draw with the embedded scheme's auxiliary increments.
        const ForcingPath forcing =
            ctx.config.str("forcing", "stationary") == "zero_state"
                ? sample_forcing_from_states(k, std::vector<double>(k.mode_count(), 0.0),
                                             0.0, dt, steps, stream, 0)
                : sample_forcing_ou(k, 0.0, dt, steps, stream);
        ensemble[p] = run_direct(k, potential, past, forcing, dt, steps, window, inc,
                                 stride, p);
      } else {
        ExtendedState state;
        if (init == "invariant") {
          state = sample_invariant(potential, k, s_param, ctx.seed, p);
        } else {
          state = make_extended_state(k, ctx.config.number("x0", 0.0),
                                      ctx.config.number("v0", 0.0),
                                      std::vector<double>(k.mode_count(), 0.0), s_param);
        }
        ensemble[p] = run_embedded(k, potential, std::move(state), dt, steps, inc,
                                   stride, p);
      }
      ensemble[p].seed = ctx.seed;
      ensemble[p].config_hash = ctx.hash;
    } catch (const NonFiniteError& err) {
      failures[p] = json{{"path", p}, {"step", err.step}};
    }
  });

  std::size_t nonfinite = 0;
  json failure_list = json::array();
  for (std::size_t p = 0; p < n_paths; ++p)
    if (!failures[p].is_null()) {
      ++nonfinite;
      failure_list.push_back(failures[p]);
    }

  if (failures[0].is_null()) write_text(ctx.out + "_trajectory.csv", trajectory_csv(ensemble[0]));

  std::vector<Trajectory> completed;
  for (std::size_t p = 0; p < n_paths; ++p)
    if (failures[p].is_null()) completed.push_back(std::move(ensemble[p]));
  const EnergyDiagnostic diag =
      completed.empty() ? EnergyDiagnostic{} : energy_diagnostic(completed);
  summary["e_sup_H"] = diag.e_sup_h;
  summary["se"] = diag.std_error;
  summary["nonfinite_count"] = nonfinite;
  if (nonfinite > 0) summary["nonfinite"] = failure_list;
  write_json(ctx.out + "_summary.json", summary);
  if (nonfinite > 0) {
    std::cerr << "non-finite state; first failure: " << failure_list[0].dump() << "\n";
    return kExitNonFinite;
  }
  return kExitOk;
}

int cmd_msd(const Ctx& ctx) {
  MsdConfig mc;
  mc.kernel = ctx.config.kernel();
  mc.n_paths = static_cast<std::size_t>(ctx.config.integer("paths", 200));
  mc.horizon = ctx.config.number("horizon", 1000.0);
  mc.dt = ctx.config.number("dt", 0.05);
  mc.seed = ctx.seed;
  const MsdReport report = msd_estimate(mc);

  std::string csv = "t,msd,se\n";
  for (std::size_t i = 0; i < report.times.size(); ++i) {
    csv += format_double(report.times[i]);
    csv += ',';
    csv += format_double(report.msd[i]);
    csv += ',';
    csv += format_double(report.std_errors[i]);
    csv += '\n';
  }
  write_text(ctx.out + "_msd.csv", csv);

  json j = ctx.report_base();
  j["n_paths"] = mc.n_paths;
  j["fitted_exponent"] = report.fitted_exponent;
  j["exponent_ci"] = {report.exponent_ci_low, report.exponent_ci_high};
  j["fit_window"] = {report.fit_window_start, report.fit_window_end};
  write_json(ctx.out + "_msd.json", j);
  return kExitOk;
}

int cmd_stationarity(const Ctx& ctx) {
  const SumExpKernel k = ctx.config.kernel();
  const Potential potential = ctx.config.potential();
  potential.check_assumption();
  const double dt = ctx.config.number("dt", 1e-3);
  const auto n_paths = static_cast<std::size_t>(ctx.config.integer("paths", 10000));
  const double s_param = default_s_param(ctx, k);
  std::vector<double> times{1.0, 5.0, 10.0};
  if (const json* t = ctx.config.raw("times")) times = t->get<std::vector<double>>();

  std::vector<std::size_t> steps_at;
  for (double t : times)
    steps_at.push_back(static_cast<std::size_t>(std::llround(t / dt)));
  const std::size_t n_steps = steps_at.back();
  const std::size_t nt = times.size();

  std::vector<double> xs(n_paths * nt), vs(n_paths * nt);
  parallel_for(n_paths, [&](std::size_t p) {
    ExtendedState state = sample_invariant(potential, k, s_param, ctx.seed, p);
    GaussianIncrements inc(k, dt, StreamConfig{ctx.seed, p});
    std::size_t cursor = 0;
    step_embedded(k, potential, state, dt, n_steps, inc,
                  [&](std::size_t n, double x, double v) {
                    while (cursor < nt && steps_at[cursor] == n) {
                      xs[p * nt + cursor] = x;
                      vs[p * nt + cursor] = v;
                      ++cursor;
                    }
                  },
                  p);
  });

  json j = ctx.report_base();
  j["potential"] = potential.name();
  j["n_paths"] = n_paths;
  j["results"] = json::array();
  bool all_pass = true;
  for (std::size_t i = 0; i < nt; ++i) {
    std::vector<double> xi(n_paths), vi(n_paths);
    for (std::size_t p = 0; p < n_paths; ++p) {
      xi[p] = xs[p * nt + i];
      vi[p] = vs[p * nt + i];
    }
    const KsResult r = ks_marginal_test(std::move(xi), std::move(vi), potential);
    all_pass = all_pass && r.pass;
    j["results"].push_back({{"t", times[i]},
                            {"ks_x", r.ks_x},
                            {"ks_v", r.ks_v},
                            {"threshold", r.threshold},
                            {"pass", r.pass}});
  }
  j["pass"] = all_pass;
  write_json(ctx.out + "_stationarity.json", j);
  return kExitOk;
}

int cmd_coupling(const Ctx& ctx) {
  const SumExpKernel k = ctx.config.kernel();
  const Potential potential = ctx.config.potential();
  potential.check_assumption();
  const InitialPast past1 = ctx.config.initial_past("past1");
  const InitialPast past2 = ctx.config.initial_past("past2");
  std::vector<double> ladder{10.0, 100.0, 1000.0};
  if (const json* l = ctx.config.raw("ladder")) ladder = l->get<std::vector<double>>();
  CouplingConfig cc;
  cc.dt = ctx.config.number("dt", 0.01);
  cc.memory_window = default_memory_window(ctx, k, ladder.back());
  cc.seed = ctx.seed;
  const CouplingReport report = coupling_experiment(k, potential, past1, past2, ladder, cc);

  std::string csv = "horizon,gap_x,gap_v\n";
  for (std::size_t i = 0; i < report.horizons.size(); ++i) {
    csv += format_double(report.horizons[i]);
    csv += ',';
    csv += format_double(report.gap_x[i]);
    csv += ',';
    csv += format_double(report.gap_v[i]);
    csv += '\n';
  }
  write_text(ctx.out + "_coupling.csv", csv);

  json j = ctx.report_base();
  j["horizons"] = report.horizons;
  j["gap_x"] = report.gap_x;
  j["gap_v"] = report.gap_v;
  j["gap_H_clipped"] = report.gap_h;
  write_json(ctx.out + "_coupling.json", j);
  return kExitOk;
}

int cmd_novikov(const Ctx& ctx) {
  const SumExpKernel k = ctx.config.kernel();
  InitialPast xbar = ctx.config.has("past")
                         ? ctx.config.initial_past("past")
                         : power_growth_past(ctx.config.number("coeff", 1.0),
                                             ctx.config.number("rho", 0.2));
  std::vector<double> ladder;
  if (const json* l = ctx.config.raw("ladder")) {
    ladder = l->get<std::vector<double>>();
  } else {
    for (int i = 0; i <= 15; ++i) ladder.push_back(10.0 * std::pow(10.0, i / 3.0));
  }
  const NovikovReport report = novikov_integral(k, xbar, ladder);

  std::string csv = "T,partial_integral\n";
  for (std::size_t i = 0; i < report.horizons.size(); ++i) {
    csv += format_double(report.horizons[i]);
    csv += ',';
    csv += format_double(report.partial_integrals[i]);
    csv += '\n';
  }
  write_text(ctx.out + "_novikov.csv", csv);

  json j = ctx.report_base();
  j["horizons"] = report.horizons;
  j["partial_integrals"] = report.partial_integrals;
  j["converged"] = report.converged;
  j["limit_estimate"] = report.limit_estimate;
  write_json(ctx.out + "_novikov.json", j);
  return kExitOk;
}

int cmd_lyapunov(const Ctx& ctx) {
  const SumExpKernel k = ctx.config.kernel();
  const Eigen::MatrixXd sigma = lyapunov_oracle(k);
  double max_dev = 0.0;
  for (Eigen::Index i = 0; i < sigma.rows(); ++i)
    for (Eigen::Index jj = 0; jj < sigma.cols(); ++jj) {
      const double target = i == jj ? 1.0 : 0.0;
      max_dev = std::max(max_dev, std::abs(sigma(i, jj) - target));
    }
  json j = ctx.report_base();
  j["dim"] = sigma.rows();
  j["max_abs_dev_from_identity"] = max_dev;
  write_json(ctx.out + "_lyapunov.json", j);
  return kExitOk;
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

int run_experiment(const ExperimentConfig& config, const std::string& subcommand) {
  const Ctx ctx(config);
  try {
    if (subcommand == "kernel-info") return cmd_kernel_info(ctx);
    if (subcommand == "sample-noise") return cmd_sample_noise(ctx);
    if (subcommand == "simulate") return cmd_simulate(ctx);
    if (subcommand == "msd") return cmd_msd(ctx);
    if (subcommand == "stationarity") return cmd_stationarity(ctx);
    if (subcommand == "coupling") return cmd_coupling(ctx);
    if (subcommand == "novikov") return cmd_novikov(ctx);
    if (subcommand == "lyapunov") return cmd_lyapunov(ctx);
    std::cerr << "unknown subcommand: " << subcommand << "\n";
    return kExitValidation;
  } catch (const NonFiniteError& err) {
    std::cerr << err.what() << "\n";
    return kExitNonFinite;
  } catch (const std::exception& err) {
    std::cerr << err.what() << "\n";
    return kExitValidation;
  }
}

}  // namespace gle
