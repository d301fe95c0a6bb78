#include "pdl/large_deviations.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "pdl/errors.hpp"

namespace pdl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Stabilized tilted weights: w_i e^{t u_i - m} with m = max_i t u_i.
void tilt(const UtilityModel& u, double t, std::vector<double>& out, double& log_norm) {
  double m = -kInf;
  for (const auto& [v, w] : u.atoms) m = std::max(m, t * v.to_double());
  out.resize(u.atoms.size());
  double sum = 0;
  for (size_t i = 0; i < u.atoms.size(); ++i) {
    out[i] = u.atoms[i].second.to_double() * std::exp(t * u.atoms[i].first.to_double() - m);
    sum += out[i];
  }
  log_norm = m + std::log(sum);
  for (double& w : out) w /= sum;
}

}  // namespace

double lmgf(const UtilityModel& u, double t) {
  std::vector<double> w;
  double log_norm = 0;
  tilt(u, t, w, log_norm);
  return log_norm;
}

double lmgf_derivative(const UtilityModel& u, double t) {
  std::vector<double> w;
  double log_norm = 0;
  tilt(u, t, w, log_norm);
  double mean = 0;
  for (size_t i = 0; i < w.size(); ++i) mean += w[i] * u.atoms[i].first.to_double();
  return mean;
}

double legendre(const UtilityModel& u, double x) {
  const double lo = u.ess_min().to_double();
  const double hi = u.ess_max().to_double();
  if (x < lo || x > hi) return kInf;
  // Edge atoms: only runs of all-min or all-max draws reach the boundary.
  if (u.atoms.size() == 1) return 0.0;
  if (x == lo) return -std::log(u.atoms.front().second.to_double());
  if (x == hi) return -std::log(u.atoms.back().second.to_double());

  // Bracket the stationary point of t -> t x - lmgf(t): lmgf'(t) = x.
  double t_lo = -1, t_hi = 1;
  int guard = 0;
  while (lmgf_derivative(u, t_lo) > x) {
    t_lo *= 2;
    if (++guard > 200)
      throw ConsistencyError("rate function bracket failed below, t=" + std::to_string(t_lo));
  }
  guard = 0;
  while (lmgf_derivative(u, t_hi) < x) {
    t_hi *= 2;
    if (++guard > 200)
      throw ConsistencyError("rate function bracket failed above, t=" + std::to_string(t_hi));
  }
  for (int i = 0; i < 200 && t_hi - t_lo > 1e-14 * (1 + std::abs(t_lo) + std::abs(t_hi)); ++i) {
    const double mid = 0.5 * (t_lo + t_hi);
    (lmgf_derivative(u, mid) < x ? t_lo : t_hi) = mid;
  }
  const double t = 0.5 * (t_lo + t_hi);
  return std::max(0.0, t * x - lmgf(u, t));
}

double lmgf_gaussian(double mu, double var, double t) { return mu * t + 0.5 * var * t * t; }

double legendre_gaussian(double mu, double var, double x) {
  if (var <= 0) throw ConfigError("gaussian validation family needs positive variance");
  return (x - mu) * (x - mu) / (2 * var);
}

double hoeffding_lower(double x, double mu) { return 2 * (x - mu) * (x - mu); }

double bernstein_lower(double x, double mu, double var) {
  if (var <= 0) throw ConfigError("bernstein bound needs positive variance");
  const double d = std::abs(x - mu);
  if (d == 0) return 0;
  return d * d / (2 * var + 2 * d);
}

int64_t rounds_per_period(double tau0, double eps) {
  if (!(tau0 > 0) || !(eps > 0) || !(eps < 1))
    throw ConfigError("rounds_per_period needs tau0 > 0 and eps in (0,1)");
  return std::max<int64_t>(1, static_cast<int64_t>(std::ceil(tau0 * std::log(1.0 / eps))));
}

double bin_resistance(const UtilityModel& u, const QuantizationParams& quant, int bin,
                      double tau0) {
  if (bin < 0 || bin > quant.top_bin()) throw ConfigError("bin index out of range");
  const Rational mu = u.mean();
  if (quant.bin_of(mu) == bin) return 0.0;
  if (u.is_deterministic()) return kInf;  // point mass outside the bin, even at v+
  if (bin == quant.top_bin()) {
    // {1}: reached only when every draw equals 1.
    return u.ess_max() == Rational(1) ? tau0 * legendre(u, 1.0) : kInf;
  }
  const Rational lower = quant.lower_edge(bin);
  const Rational upper = quant.lower_edge(bin + 1);
  if (mu < lower) return tau0 * legendre(u, lower.to_double());
  if (mu >= upper) return tau0 * legendre(u, upper.to_double());
  throw ConsistencyError("bin_resistance case split does not cover mean " + mu.str());
}

namespace {

// Exact convolution over the integer grid: values k/L, sums in [0, tau*L].
TailResult exact_tail(const UtilityModel& u, const QuantizationParams& quant, int64_t tau,
                      int64_t L, bool log_space) {
  const int bins = quant.top_bin() + 1;
  std::vector<int64_t> k(u.atoms.size());
  for (size_t i = 0; i < u.atoms.size(); ++i) {
    const Rational scaled = u.atoms[i].first * Rational(L);
    k[i] = scaled.num();  // integral by construction of L
  }
  TailResult res;
  res.exact = true;
  res.bin_prob.assign(bins, 0.0);
  res.log_bin_prob.assign(bins, -kInf);

  const auto logaddexp = [](double a, double b) {
    if (a == -kInf) return b;
    if (b == -kInf) return a;
    const double m = std::max(a, b);
    return m + std::log(std::exp(a - m) + std::exp(b - m));
  };

  const int64_t cells = tau * L + 1;
  if (!log_space) {
    std::vector<double> dist(1, 1.0), next;
    for (int64_t r = 0; r < tau; ++r) {
      next.assign(dist.size() + L, 0.0);
      for (size_t s = 0; s < dist.size(); ++s) {
        if (dist[s] == 0) continue;
        for (size_t i = 0; i < k.size(); ++i)
          next[s + k[i]] += dist[s] * u.atoms[i].second.to_double();
      }
      dist.swap(next);
    }
    for (int64_t s = 0; s < cells; ++s) {
      if (dist[s] == 0) continue;
      // mean = s/(tau L); bin = floor(mean * q), top bin only at mean == 1.
      const int b = s == tau * L ? quant.top_bin()
                                 : static_cast<int>((s * quant.q) / (tau * L));
      res.bin_prob[b] += dist[s];
    }
    for (int b = 0; b < bins; ++b)
      if (res.bin_prob[b] > 0) res.log_bin_prob[b] = std::log(res.bin_prob[b]);
    return res;
  }

  std::vector<double> dist(1, 0.0), next;
  std::vector<double> logw(k.size());
  for (size_t i = 0; i < k.size(); ++i) logw[i] = std::log(u.atoms[i].second.to_double());
  for (int64_t r = 0; r < tau; ++r) {
    next.assign(dist.size() + L, -kInf);
    for (size_t s = 0; s < dist.size(); ++s) {
      if (dist[s] == -kInf) continue;
      for (size_t i = 0; i < k.size(); ++i)
        next[s + k[i]] = logaddexp(next[s + k[i]], dist[s] + logw[i]);
    }
    dist.swap(next);
  }
  for (int64_t s = 0; s < cells; ++s) {
    if (dist[s] == -kInf) continue;
    const int b =
        s == tau * L ? quant.top_bin() : static_cast<int>((s * quant.q) / (tau * L));
    res.log_bin_prob[b] = logaddexp(res.log_bin_prob[b], dist[s]);
  }
  for (int b = 0; b < bins; ++b) res.bin_prob[b] = std::exp(res.log_bin_prob[b]);
  return res;
}

TailResult monte_carlo_tail(const UtilityModel& u, const QuantizationParams& quant, int64_t tau,
                            uint64_t seed) {
  constexpr int64_t kDraws = 1'000'000;
  const int bins = quant.top_bin() + 1;
  std::vector<double> cum;
  std::vector<double> vals;
  double acc = 0;
  for (const auto& [v, w] : u.atoms) {
    acc += w.to_double();
    cum.push_back(acc);
    vals.push_back(v.to_double());
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<int64_t> counts(bins, 0);
  for (int64_t d = 0; d < kDraws; ++d) {
    double sum = 0;
    int64_t top_hits = 0;
    for (int64_t r = 0; r < tau; ++r) {
      const double x = unif(rng);
      const size_t i = std::lower_bound(cum.begin(), cum.end(), x) - cum.begin();
      const size_t idx = std::min(i, vals.size() - 1);
      sum += vals[idx];
      if (u.atoms[idx].first == Rational(1)) ++top_hits;
    }
    const double mean = sum / static_cast<double>(tau);
    const int b = top_hits == tau
                      ? quant.top_bin()
                      : std::min<int>(quant.top_bin() - 1,
                                      std::max(0, static_cast<int>(mean * quant.q)));
    ++counts[b];
  }
  TailResult res;
  res.exact = false;
  res.bin_prob.assign(bins, 0.0);
  res.log_bin_prob.assign(bins, -kInf);
  double hw = 0;
  for (int b = 0; b < bins; ++b) {
    const double p = static_cast<double>(counts[b]) / kDraws;
    res.bin_prob[b] = p;
    if (p > 0) res.log_bin_prob[b] = std::log(p);
    hw = std::max(hw, 1.96 * std::sqrt(p * (1 - p) / kDraws));
  }
  res.mc_half_width = hw;
  return res;
}

}  // namespace

TailResult observation_tail(const UtilityModel& u, const QuantizationParams& quant, int64_t tau,
                            uint64_t mc_seed) {
  if (tau < 1) throw ConfigError("observation_tail needs tau >= 1");
  int64_t L = 1;
  bool on_grid = true;
  for (const auto& [v, w] : u.atoms) {
    const int64_t den = v.den();
    L = std::lcm(L, den);
    if (L > 64) {
      on_grid = false;
      break;
    }
  }
  if (!on_grid || tau > 512) return monte_carlo_tail(u, quant, tau, mc_seed);
  double min_logw = 0;
  for (const auto& [v, w] : u.atoms) min_logw = std::min(min_logw, std::log(w.to_double()));
  const bool log_space = static_cast<double>(tau) * min_logw < -650.0;
  return exact_tail(u, quant, tau, L, log_space);
}

RateCheck empirical_rate_check(const UtilityModel& u, const QuantizationParams& quant, int bin,
                               double tau0, const std::vector<double>& eps_grid) {
  RateCheck out;
  out.limit = bin_resistance(u, quant, bin, tau0);
  bool any_mass = false;
  double prev_lp = 0, prev_le = 0;
  for (size_t i = 0; i < eps_grid.size(); ++i) {
    const double eps = eps_grid[i];
    RatePoint pt;
    pt.eps = eps;
    pt.tau = rounds_per_period(tau0, eps);
    const TailResult tail = observation_tail(u, quant, pt.tau);
    pt.log_prob = tail.log_bin_prob[bin];
    const double le = std::log(eps);
    pt.point_ratio = pt.log_prob == -kInf ? kInf : pt.log_prob / le;
    pt.slope = i == 0 ? pt.point_ratio
                      : (pt.log_prob == -kInf || prev_lp == -kInf
                             ? kInf
                             : (pt.log_prob - prev_lp) / (le - prev_le));
    if (pt.log_prob != -kInf) any_mass = true;
    prev_lp = pt.log_prob;
    prev_le = le;
    out.points.push_back(pt);
  }
  out.zero_probability = !any_mass;
  return out;
}

}  // namespace pdl
