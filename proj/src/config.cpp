#include "gle/config.hpp"

#include <cmath>
#include <sstream>

namespace gle {

namespace {

std::string join(const std::vector<std::string>& parts) {
  std::string out = "invalid config:";
  for (const auto& p : parts) {
    out += "\n  - ";
    out += p;
  }
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> violations)
    : std::runtime_error(join(violations)), violations_(std::move(violations)) {}

ExperimentConfig ExperimentConfig::parse(const std::string& text) {
  ExperimentConfig config;
  std::vector<std::string> violations;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash_pos = line.find('#');
    if (hash_pos != std::string::npos) line = line.substr(0, hash_pos);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      violations.push_back("line " + std::to_string(lineno) + ": expected key = value");
      continue;
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      violations.push_back("line " + std::to_string(lineno) + ": empty key");
      continue;
    }
    nlohmann::json parsed = nlohmann::json::parse(value, nullptr, false);
    if (parsed.is_discarded()) {
      // Bare words (e.g. scheme = direct) read as strings.
      parsed = value;
    }
    config.values_[key] = std::move(parsed);
  }
  if (!violations.empty()) throw ConfigError(std::move(violations));
  config.validate();
  return config;
}

void ExperimentConfig::validate() const {
  std::vector<std::string> violations;
  const auto note = [&](const std::string& msg) { violations.push_back(msg); };

  const bool has_modes = has("modes");
  const bool has_ab = has("alpha") || has("beta");
  double alpha = number("alpha", 0.0), beta = number("beta", 0.0);
  if (has_modes && has_ab)
    note("kernel: give either explicit `modes` or (alpha, beta), not both");
  if (has_ab) {
    if (!has("alpha") || !has("beta"))
      note("kernel: alpha and beta must be given together");
    else {
      if (!(alpha > 0.0)) note("alpha: must be > 0");
      if (!(beta > 1.0)) note("beta: must be > 1");
      if (alpha > 0.0 && beta > 1.0 && alpha * beta <= 1.0)
        note("alpha*beta must exceed 1, required by the phase-space condition 1 < 2s < "
             "alpha*beta");
    }
    const double tol = number("tail_tol", 1e-4);
    if (!(tol > 0.0 && tol < 1.0)) note("tail_tol: must lie in (0, 1)");
  }
  if (has_modes) {
    const nlohmann::json& m = *raw("modes");
    if (!m.is_array() || m.empty())
      note("modes: must be a nonempty array of [c, lambda] pairs");
    else
      for (const auto& entry : m)
        if (!entry.is_array() || entry.size() != 2 || !(entry[0].get<double>() > 0.0) ||
            !(entry[1].get<double>() > 0.0)) {
          note("modes: every entry must be [c > 0, lambda > 0]");
          break;
        }
  }
  if (has("s_param")) {
    const double s = number("s_param", 0.0);
    if (!(2.0 * s > 1.0)) note("s_param: need 2s > 1");
    if (has_ab && alpha > 0.0 && beta > 1.0 && !(2.0 * s < alpha * beta))
      note("s_param: need 2s < alpha*beta (phase-space condition)");
  }
  if (has("dt") && !(number("dt", 0.0) > 0.0)) note("dt: must be > 0");
  if (has("steps") && integer("steps", 0) < 0) note("steps: must be >= 0");
  if (has("paths") && integer("paths", 1) < 1) note("paths: must be >= 1");
  if (has("memory_window") && !(number("memory_window", 0.0) >= 0.0))
    note("memory_window: must be >= 0");
  if (has("scheme")) {
    const std::string s = str("scheme", "");
    if (s != "direct" && s != "embedded") note("scheme: must be `direct` or `embedded`");
  }
  if (has("forcing")) {
    const std::string f = str("forcing", "");
    if (f != "stationary" && f != "zero_state")
      note("forcing: must be `stationary` or `zero_state`");
  }
  if (has("potential")) {
    const std::string p = str("potential", "");
    if (p != "quadratic" && p != "doublewell" && p != "free")
      note("potential: must be `quadratic`, `doublewell` or `free`");
  }
  if (has("lags") && has("dt")) {
    const double dt = number("dt", 1.0);
    for (const auto& lag : *raw("lags")) {
      const double l = lag.get<double>();
      if (std::abs(l / dt - std::llround(l / dt)) > 1e-9) {
        note("lags: every lag must be grid-aligned with dt");
        break;
      }
    }
  }
  if (has("ladder")) {
    const nlohmann::json& l = *raw("ladder");
    double prev = 0.0;
    for (const auto& h : l) {
      if (!(h.get<double>() > prev)) {
        note("ladder: horizons must be positive and increasing");
        break;
      }
      prev = h.get<double>();
    }
  }
  if (!violations.empty()) throw ConfigError(std::move(violations));
}

double ExperimentConfig::number(const std::string& key, double fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  return it->second.get<double>();
}

std::int64_t ExperimentConfig::integer(const std::string& key, std::int64_t fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  return it->second.get<std::int64_t>();
}

std::string ExperimentConfig::str(const std::string& key, const std::string& fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  if (it->second.is_string()) return it->second.get<std::string>();
  return it->second.dump();
}

const nlohmann::json* ExperimentConfig::raw(const std::string& key) const {
  const auto it = values_.find(key);
  return it == values_.end() ? nullptr : &it->second;
}

void ExperimentConfig::set(const std::string& key, nlohmann::json value) {
  values_[key] = std::move(value);
  validate();
}

std::string ExperimentConfig::serialize() const {
  std::string out;
  for (const auto& [key, value] : values_) {
    out += key;
    out += " = ";
    out += value.dump();
    out += "\n";
  }
  return out;
}

std::string ExperimentConfig::hash() const {
  const std::string canon = serialize();
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : canon) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  static const char* hex = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = hex[h & 0xf];
    h >>= 4;
  }
  return out;
}

SumExpKernel ExperimentConfig::kernel() const {
  if (const nlohmann::json* m = raw("modes")) {
    std::vector<Mode> modes;
    for (const auto& entry : *m)
      modes.push_back(Mode{entry[0].get<double>(), entry[1].get<double>()});
    return SumExpKernel::from_modes(std::move(modes));
  }
  if (has("alpha")) {
    if (const nlohmann::json* m = raw("n_modes"))
      return SumExpKernel::power_law_modes(number("alpha", 1.0), number("beta", 2.0),
                                           m->get<std::size_t>());
    return SumExpKernel::power_law(number("alpha", 1.0), number("beta", 2.0),
                                   number("tail_tol", 1e-4));
  }
  return SumExpKernel::zero();
}

Potential ExperimentConfig::potential() const {
  const std::string p = str("potential", "quadratic");
  if (p == "quadratic") return Potential::quadratic();
  if (p == "doublewell") return Potential::double_well();
  return Potential::free();
}

InitialPast ExperimentConfig::initial_past(const std::string& key) const {
  const nlohmann::json* spec = raw(key);
  if (spec == nullptr) return InitialPast::point(number("x0", 0.0), number("v0", 0.0));
  return parse_initial_past(*spec);
}

InitialPast power_growth_past(double coeff, double rho, double grid_start, double dt) {
  const Tail tail = Tail::power_growth(coeff, rho);
  const auto n = static_cast<std::size_t>(std::llround(-grid_start / dt));
  std::vector<double> xs(n + 1), vs(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    const double r = grid_start + dt * static_cast<double>(i);
    xs[i] = tail.x_at(r);
    vs[i] = tail.v_at(r);
  }
  if (rho < 1.0) vs[n] = tail.v_at(-dt);  // keep the origin row finite
  return InitialPast(grid_start, dt, std::move(xs), std::move(vs), tail);
}

InitialPast parse_initial_past(const nlohmann::json& spec) {
  Tail tail = Tail::zero();
  if (spec.contains("tail")) {
    const nlohmann::json& t = spec["tail"];
    const std::string kind = t.value("kind", "zero");
    if (kind == "zero")
      tail = Tail::zero();
    else if (kind == "constant")
      tail = Tail::constant(t.value("x", 0.0), t.value("v", 0.0));
    else if (kind == "power_growth")
      tail = Tail::power_growth(t.value("coeff", 0.0), t.value("rho", 0.0));
    else
      throw std::invalid_argument("past: unknown tail kind `" + kind + "`");
  }
  std::vector<double> xs = spec.value("x_values", std::vector<double>{});
  std::vector<double> vs = spec.value("v_values", std::vector<double>{});
  const double grid_start = spec.value("grid_start", 0.0);
  const double dt = spec.value("dt", 0.0);
  if (xs.empty() && vs.empty()) {
    xs = {tail.x_at(grid_start)};
    vs = {tail.v_at(grid_start)};
    return InitialPast(grid_start, 0.0, std::move(xs), std::move(vs), tail);
  }
  return InitialPast(grid_start, dt, std::move(xs), std::move(vs), tail);
}

nlohmann::json initial_past_to_json(const InitialPast& past) {
  nlohmann::json tail;
  switch (past.tail().kind) {
    case Tail::Kind::Zero:
      tail = {{"kind", "zero"}};
      break;
    case Tail::Kind::Constant:
      tail = {{"kind", "constant"}, {"x", past.tail().x_c}, {"v", past.tail().v_c}};
      break;
    case Tail::Kind::PowerGrowth:
      tail = {{"kind", "power_growth"}, {"coeff", past.tail().coeff},
              {"rho", past.tail().rho}};
      break;
  }
  return nlohmann::json{{"grid_start", past.grid_start()},
                        {"dt", past.dt()},
                        {"x_values", past.x_values()},
                        {"v_values", past.v_values()},
                        {"tail", tail}};
}

}  // namespace gle
