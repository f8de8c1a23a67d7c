#include "gle/noise.hpp"

#include <cmath>
#include <complex>
#include <numeric>

#include "gle/parallel.hpp"
#include "gle/rng.hpp"

namespace gle {

namespace {

void check_grid(double dt, std::size_t n_steps) {
  if (!(dt > 0.0)) throw std::invalid_argument("forcing: dt must be > 0");
  if (n_steps < 1) throw std::invalid_argument("forcing: n_steps must be >= 1");
}

// Advances every mode by the exact OU recursion and appends n_steps values.
void advance_modes(const SumExpKernel& k, ForcingPath& path, std::size_t n_steps,
                   std::vector<rng::NormalStream>& streams) {
  const std::size_t m = k.mode_count();
  std::vector<double> decay(m), noise_sd(m);
  for (std::size_t l = 0; l < m; ++l) {
    const Mode& mode = k.modes()[l];
    decay[l] = std::exp(-mode.lambda * path.dt);
    noise_sd[l] = std::sqrt(mode.c * (1.0 - decay[l] * decay[l]));
  }
  for (std::size_t i = 0; i < n_steps; ++i) {
    double sum = 0.0;
    for (std::size_t l = 0; l < m; ++l) {
      path.mode_states[l] = decay[l] * path.mode_states[l] + noise_sd[l] * streams[l].next();
      sum += path.mode_states[l];
    }
    path.values.push_back(sum);
  }
  path.draws_per_mode += n_steps;
}

std::vector<rng::NormalStream> mode_streams(const SumExpKernel& k,
                                            const StreamConfig& stream,
                                            std::uint64_t skip) {
  std::vector<rng::NormalStream> streams;
  streams.reserve(k.mode_count());
  for (std::size_t l = 0; l < k.mode_count(); ++l) {
    streams.emplace_back(stream.seed,
                         rng::stream_id(stream.path_index, rng::Role::ForcingMode, l));
    if (skip != 0) streams.back().skip(skip);
  }
  return streams;
}

// In-place iterative radix-2 FFT; sign = -1 forward, +1 inverse (unscaled).
void fft(std::vector<std::complex<double>>& a, int sign) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = sign * 2.0 * M_PI / static_cast<double>(len);
    const std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t j = 0; j < len / 2; ++j) {
        const std::complex<double> u = a[i + j];
        const std::complex<double> v = a[i + j + len / 2] * w;
        a[i + j] = u + v;
        a[i + j + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
}

}  // namespace

ForcingPath sample_forcing_ou(const SumExpKernel& k, double t0, double dt,
                              std::size_t n_steps, const StreamConfig& stream) {
  check_grid(dt, n_steps);
  ForcingPath path;
  path.t0 = t0;
  path.dt = dt;
  path.stream = stream;
  path.mode_states.resize(k.mode_count());
  auto streams = mode_streams(k, stream, 0);
  double sum = 0.0;
  for (std::size_t l = 0; l < k.mode_count(); ++l) {
    path.mode_states[l] = std::sqrt(k.modes()[l].c) * streams[l].next();
    sum += path.mode_states[l];
  }
  path.draws_per_mode = 1;
  path.values.reserve(n_steps + 1);
  path.values.push_back(sum);
  advance_modes(k, path, n_steps, streams);
  return path;
}

ForcingPath sample_forcing_from_states(const SumExpKernel& k,
                                       std::vector<double> mode_states, double t0,
                                       double dt, std::size_t n_steps,
                                       const StreamConfig& stream,
                                       std::uint64_t draws_already_taken) {
  check_grid(dt, n_steps);
  if (mode_states.size() != k.mode_count())
    throw std::invalid_argument("forcing: mode_states size must match kernel");
  ForcingPath path;
  path.t0 = t0;
  path.dt = dt;
  path.stream = stream;
  path.mode_states = std::move(mode_states);
  path.draws_per_mode = draws_already_taken;
  path.values.reserve(n_steps + 1);
  path.values.push_back(std::accumulate(path.mode_states.begin(), path.mode_states.end(), 0.0));
  auto streams = mode_streams(k, stream, draws_already_taken);
  advance_modes(k, path, n_steps, streams);
  return path;
}

ForcingPath continue_forcing(const SumExpKernel& k, const ForcingPath& prev,
                             std::size_t n_steps) {
  if (prev.mode_states.size() != k.mode_count())
    throw std::invalid_argument("forcing: path does not match kernel");
  const double end = prev.t0 + prev.dt * static_cast<double>(prev.values.size() - 1);
  return sample_forcing_from_states(k, prev.mode_states, end, prev.dt, n_steps,
                                    prev.stream, prev.draws_per_mode);
}

ForcingPath sample_forcing_circulant(const std::function<double(double)>& cov, double dt,
                                     std::size_t n_steps, const StreamConfig& stream) {
  check_grid(dt, n_steps);
  const std::size_t n = n_steps + 1;
  if (!(cov(0.0) > 0.0))
    throw std::invalid_argument("circulant: cov(0) must be > 0");
  std::size_t m = 2;
  while (m < 2 * (n - 1) || m < 2) m <<= 1;

  std::vector<std::complex<double>> eig(m);
  for (std::size_t j = 0; j < m; ++j) {
    const std::size_t d = std::min(j, m - j);
    eig[j] = cov(dt * static_cast<double>(d));
  }
  fft(eig, -1);
  double max_eig = 0.0;
  for (const auto& e : eig) max_eig = std::max(max_eig, e.real());
  std::vector<double> sd(m);
  for (std::size_t j = 0; j < m; ++j) {
    double v = eig[j].real();
    if (v < -1e-9 * max_eig)
      throw NegativeEigenvalueError(
          "circulant embedding has a negative eigenvalue; enlarge the embedding or "
          "reject the covariance");
    if (v < 0.0) v = 0.0;
    sd[j] = std::sqrt(v / static_cast<double>(m));
  }

  rng::NormalStream normals(stream.seed,
                            rng::stream_id(stream.path_index, rng::Role::CirculantDraw));
  std::vector<std::complex<double>> w(m);
  for (std::size_t j = 0; j < m; ++j) {
    const double a = normals.next();
    const double b = normals.next();
    w[j] = std::complex<double>(sd[j] * a, sd[j] * b);
  }
  fft(w, -1);

  ForcingPath path;
  path.t0 = 0.0;
  path.dt = dt;
  path.stream = stream;
  path.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) path.values[i] = w[i].real();
  return path;
}

AutocovEstimate empirical_autocov(const std::vector<ForcingPath>& paths,
                                  const std::vector<double>& lags) {
  if (paths.empty()) throw std::invalid_argument("autocov: need at least one path");
  const double dt = paths.front().dt;
  const double t0 = paths.front().t0;
  const std::size_t len = paths.front().values.size();
  for (const ForcingPath& p : paths) {
    if (p.dt != dt || p.t0 != t0 || p.values.size() != len)
      throw std::invalid_argument("autocov: paths must share the sampling grid");
  }
  AutocovEstimate est;
  est.lags = lags;
  est.n_paths = paths.size();
  for (double lag : lags) {
    if (!(lag >= 0.0)) throw std::invalid_argument("autocov: lags must be >= 0");
    const double ratio = lag / dt;
    const auto shift = static_cast<std::size_t>(std::llround(ratio));
    if (std::abs(ratio - static_cast<double>(shift)) > 1e-9 || shift >= len)
      throw std::invalid_argument("autocov: lag is not grid-aligned within the path");
    // Per-path time average of F(t) F(t+lag); ensemble mean and s.e. across paths.
    double sum = 0.0, sumsq = 0.0;
    for (const ForcingPath& p : paths) {
      double acc = 0.0;
      const std::size_t count = len - shift;
      for (std::size_t i = 0; i < count; ++i) acc += p.values[i] * p.values[i + shift];
      acc /= static_cast<double>(count);
      sum += acc;
      sumsq += acc * acc;
    }
    const double np = static_cast<double>(paths.size());
    const double mean = sum / np;
    double se = 0.0;
    if (paths.size() > 1) {
      const double var = std::max(0.0, (sumsq - np * mean * mean) / (np - 1.0));
      se = std::sqrt(var / np);
    }
    est.estimates.push_back(mean);
    est.std_errors.push_back(se);
  }
  return est;
}

SupSquareEstimate sup_square_statistic(const SumExpKernel& k, double horizon,
                                       std::size_t n_paths, double dt,
                                       std::uint64_t seed) {
  if (!(horizon > 0.0)) throw std::invalid_argument("sup_square: horizon must be > 0");
  check_grid(dt, n_paths == 0 ? 0 : 1);
  const auto n_steps = static_cast<std::size_t>(std::ceil(horizon / dt - 1e-12));
  std::vector<double> sups(n_paths);
  parallel_for(n_paths, [&](std::size_t p) {
    ForcingPath path = sample_forcing_ou(k, 0.0, dt, n_steps, StreamConfig{seed, p});
    double s = 0.0;
    for (double v : path.values) s = std::max(s, v * v);
    sups[p] = s;
  });
  SupSquareEstimate est;
  est.n_paths = n_paths;
  double sum = 0.0, sumsq = 0.0;
  for (double s : sups) {
    sum += s;
    sumsq += s * s;
  }
  const double np = static_cast<double>(n_paths);
  est.mean = sum / np;
  if (n_paths > 1) {
    const double var = std::max(0.0, (sumsq - np * est.mean * est.mean) / (np - 1.0));
    est.std_error = std::sqrt(var / np);
  }
  return est;
}

}  // namespace gle
