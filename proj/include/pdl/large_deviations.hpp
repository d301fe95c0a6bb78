#pragma once

#include <cstdint>
#include <vector>

#include "pdl/game.hpp"

namespace pdl {

// Log moment generating function log E[exp(t U)], log-sum-exp stabilized.
double lmgf(const UtilityModel& u, double t);
// Tilted mean d/dt lmgf(t); increases from ess_min to ess_max.
double lmgf_derivative(const UtilityModel& u, double t);

// Legendre transform sup_t (t x - lmgf(t)). Zero at the mean, -log of the
// edge atom weight at the essential bounds, +inf strictly outside them.
double legendre(const UtilityModel& u, double x);

// Analytic validation family; not usable as a game utility.
double lmgf_gaussian(double mu, double var, double t);
double legendre_gaussian(double mu, double var, double x);

// Distribution-free lower bounds on the rate function for [0,1] support.
double hoeffding_lower(double x, double mu);
double bernstein_lower(double x, double mu, double var);

// Rounds per period: ceil(tau0 * ln(1/eps)), at least 1.
int64_t rounds_per_period(double tau0, double eps);

// Resistance (in units of log(1/eps)) of the empirical mean of a period
// landing in bin v = [v-, v+):
//   tau0 * Lambda*(v-)  when mu < v-,
//   0                   when mu lies in v,
//   tau0 * Lambda*(v+)  when mu >= v+,
// with the deterministic exception: a point mass outside v gives +inf even
// when its value equals v+.
double bin_resistance(const UtilityModel& u, const QuantizationParams& quant, int bin,
                      double tau0);

// Distribution of the empirical-mean bin after tau i.i.d. draws.
// Exact tau-fold convolution when all support values share a denominator
// <= 64 and tau <= 512; Monte Carlo fallback (1e6 draws) otherwise.
struct TailResult {
  std::vector<double> bin_prob;      // index 0..top_bin
  std::vector<double> log_bin_prob;  // natural log, -inf for zero mass
  bool exact = true;
  double mc_half_width = 0.0;  // 95% CI half-width when !exact
};
TailResult observation_tail(const UtilityModel& u, const QuantizationParams& quant,
                            int64_t tau, uint64_t mc_seed = 1);

// Convergence of -log P(bin) / log(1/eps) toward bin_resistance along a grid
// of decreasing eps. point_ratio is the raw per-point ratio; slope is the
// finite-difference slope of log P against log eps between consecutive grid
// points (the first point falls back to its ratio).
struct RatePoint {
  double eps = 0;
  int64_t tau = 0;
  double log_prob = 0;
  double point_ratio = 0;
  double slope = 0;
};
struct RateCheck {
  std::vector<RatePoint> points;
  double limit = 0;            // bin_resistance target
  bool zero_probability = false;  // event impossible at every grid point
};
RateCheck empirical_rate_check(const UtilityModel& u, const QuantizationParams& quant, int bin,
                               double tau0, const std::vector<double>& eps_grid);

}  // namespace pdl
