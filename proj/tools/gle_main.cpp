// Command-line front end; links only the shared C API.
#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "gle.h"

namespace {

struct CommonArgs {
  std::string config_file;
  std::vector<std::string> overrides;  // key=value
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_file, "config file (key = value lines)");
  cmd->add_option("--set", args.overrides, "override a config key (key=value)")
      ->take_all();
}

int run(const std::string& subcommand, const CommonArgs& args,
        const std::vector<std::string>& extra = {}) {
  std::ostringstream text;
  if (!args.config_file.empty()) {
    std::ifstream in(args.config_file);
    if (!in) {
      std::fprintf(stderr, "cannot read config file: %s\n", args.config_file.c_str());
      return GLE_ERR_VALIDATION;
    }
    text << in.rdbuf() << "\n";
  }
  for (const std::string& kv : extra) text << kv << "\n";
  for (const std::string& kv : args.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      std::fprintf(stderr, "--set expects key=value, got: %s\n", kv.c_str());
      return GLE_ERR_VALIDATION;
    }
    text << kv.substr(0, eq) << " = " << kv.substr(eq + 1) << "\n";
  }

  gle_config* config = gle_config_parse(text.str().c_str());
  if (config == nullptr) {
    std::fprintf(stderr, "%s\n", gle_last_error());
    return GLE_ERR_VALIDATION;
  }
  const int code = gle_run(config, subcommand.c_str());
  if (code != GLE_OK) std::fprintf(stderr, "%s\n", gle_last_error());
  gle_config_free(config);
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generalized Langevin equation laboratory"};
  app.require_subcommand(1);

  const std::vector<std::string> plain = {"kernel-info", "sample-noise", "msd",
                                          "stationarity", "coupling", "novikov",
                                          "lyapunov"};
  std::vector<CommonArgs> plain_args(plain.size());
  for (std::size_t i = 0; i < plain.size(); ++i) {
    CLI::App* cmd = app.add_subcommand(plain[i]);
    add_common(cmd, plain_args[i]);
  }

  // `simulate` additionally exposes its config keys as flags.
  CommonArgs sim_args;
  struct {
    std::string scheme, kernel, potential, out;
    double dt = -1.0, memory_window = -1.0;
    std::int64_t steps = -1, seed = -1, paths = -1;
  } sim;
  CLI::App* simulate = app.add_subcommand("simulate");
  add_common(simulate, sim_args);
  simulate->add_option("--scheme", sim.scheme, "direct|embedded");
  simulate->add_option("--kernel", sim.kernel,
                       "kernel spec file, or inline like alpha=1,beta=2");
  simulate->add_option("--potential", sim.potential, "quadratic|doublewell|free");
  simulate->add_option("--dt", sim.dt);
  simulate->add_option("--steps", sim.steps);
  simulate->add_option("--memory-window", sim.memory_window);
  simulate->add_option("--seed", sim.seed);
  simulate->add_option("--paths", sim.paths);
  simulate->add_option("--out", sim.out, "output file prefix");

  CLI11_PARSE(app, argc, argv);

  for (std::size_t i = 0; i < plain.size(); ++i)
    if (app.got_subcommand(plain[i])) return run(plain[i], plain_args[i]);

  std::vector<std::string> extra;
  if (!sim.scheme.empty()) extra.push_back("scheme = " + sim.scheme);
  if (!sim.potential.empty()) extra.push_back("potential = " + sim.potential);
  if (!sim.out.empty()) extra.push_back("out = \"" + sim.out + "\"");
  if (sim.dt > 0) extra.push_back("dt = " + std::to_string(sim.dt));
  if (sim.memory_window >= 0)
    extra.push_back("memory_window = " + std::to_string(sim.memory_window));
  if (sim.steps >= 0) extra.push_back("steps = " + std::to_string(sim.steps));
  if (sim.seed >= 0) extra.push_back("seed = " + std::to_string(sim.seed));
  if (sim.paths >= 0) extra.push_back("paths = " + std::to_string(sim.paths));
  if (!sim.kernel.empty()) {
    std::ifstream in(sim.kernel);
    if (in) {
      std::ostringstream buf;
      buf << in.rdbuf();
      extra.push_back(buf.str());
    } else {
      // inline form: alpha=1,beta=2[,tail_tol=...]
      std::string spec = sim.kernel;
      for (char& ch : spec)
        if (ch == ',') ch = '\n';
      extra.push_back(spec);
    }
  }
  return run("simulate", sim_args, extra);
}
