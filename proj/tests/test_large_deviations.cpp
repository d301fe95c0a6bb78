#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "pdl/game.hpp"
#include "pdl/large_deviations.hpp"

using namespace pdl;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

UtilityModel bernoulli(const Rational& p) {
  return UtilityModel::finite_support({{Rational(0), Rational(1) - p}, {Rational(1), p}});
}

// Relative-entropy rate of a Bernoulli(1/2) mean.
double kl_half(double x) { return x * std::log(2 * x) + (1 - x) * std::log(2 * (1 - x)); }

std::vector<double> grid() {
  std::vector<double> xs;
  for (int k = 1; k <= 19; ++k) xs.push_back(0.05 * k);
  return xs;
}

}  // namespace

TEST_CASE("log moment generating function and its tilted mean") {
  UtilityModel u = bernoulli(Rational(1, 2));
  CHECK(lmgf(u, 0.0) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(lmgf(u, 1.0) == doctest::Approx(std::log((1 + std::exp(1.0)) / 2)).epsilon(1e-12));
  // log-sum-exp keeps huge tilts finite: log((1 + e^700)/2) = 700 - log 2 + o(1)
  CHECK(lmgf(u, 700.0) == doctest::Approx(700.0 - std::log(2.0)).epsilon(1e-12));

  CHECK(lmgf_derivative(u, 0.0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(lmgf_derivative(u, -5.0) < lmgf_derivative(u, 0.0));
  CHECK(lmgf_derivative(u, 0.0) < lmgf_derivative(u, 5.0));
  CHECK(lmgf_derivative(u, 50.0) > 0.999);
}

TEST_CASE("rate function matches relative entropy for coin means") {
  UtilityModel u = bernoulli(Rational(1, 2));
  CHECK(legendre(u, 0.25) == doctest::Approx(0.13081203594113694).epsilon(1e-9));
  for (double x : grid()) CHECK(legendre(u, x) == doctest::Approx(kl_half(x)).epsilon(1e-9));

  // zero at the mean, -log(edge weight) at the essential bounds, +inf outside
  CHECK(legendre(u, 0.5) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(legendre(u, 0.0) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(legendre(u, 1.0) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(legendre(u, -0.01) == kInf);
  CHECK(legendre(u, 1.01) == kInf);

  // {0, 1/2, 1} with weights {1/4, 1/2, 1/4} is half the sum of two coins, so
  // its rate is exactly twice the coin rate
  UtilityModel three = UtilityModel::finite_support(
      {{Rational(0), Rational(1, 4)}, {Rational(1, 2), Rational(1, 2)}, {Rational(1), Rational(1, 4)}});
  for (double x : grid()) CHECK(legendre(three, x) == doctest::Approx(2 * kl_half(x)).epsilon(1e-9));
  CHECK(legendre(three, 0.0) == doctest::Approx(std::log(4.0)).epsilon(1e-12));

  // narrow support: infinite strictly outside [0.2, 0.6]
  UtilityModel narrow = UtilityModel::finite_support(
      {{Rational(1, 5), Rational(1, 3)}, {Rational(3, 5), Rational(2, 3)}});
  CHECK(legendre(narrow, 0.1) == kInf);
  CHECK(legendre(narrow, 0.7) == kInf);
  CHECK(legendre(narrow, 0.2) == doctest::Approx(std::log(3.0)).epsilon(1e-12));
  CHECK(legendre(narrow, 0.6) == doctest::Approx(std::log(1.5)).epsilon(1e-12));

  // a point mass has zero rate at its value
  CHECK(legendre(UtilityModel::deterministic(Rational(2, 5)), 0.4) == 0.0);
}

TEST_CASE("gaussian validation family and distribution-free bounds") {
  CHECK(lmgf_gaussian(0.3, 0.04, 2.0) == doctest::Approx(0.3 * 2 + 0.5 * 0.04 * 4).epsilon(1e-15));
  for (double x : grid()) {
    CHECK(legendre_gaussian(0.5, 0.04, x) ==
          doctest::Approx((x - 0.5) * (x - 0.5) / 0.08).epsilon(1e-15));
  }
  CHECK_THROWS_AS(legendre_gaussian(0.5, 0.0, 0.3), ConfigError);

  CHECK(hoeffding_lower(0.75, 0.5) == doctest::Approx(0.125).epsilon(1e-15));
  CHECK(bernstein_lower(0.75, 0.5, 0.25) == doctest::Approx(0.0625).epsilon(1e-15));
  CHECK(bernstein_lower(0.5, 0.5, 0.25) == 0.0);
  CHECK_THROWS_AS(bernstein_lower(0.75, 0.5, 0.0), ConfigError);

  // both bounds stay below the true rate across supports and means
  for (Rational p : {Rational(3, 10), Rational(1, 2), Rational(7, 10)}) {
    UtilityModel u = bernoulli(p);
    double mu = p.to_double();
    double var = u.variance().to_double();
    for (double x : grid()) {
      double rate = legendre(u, x);
      CHECK(rate >= hoeffding_lower(x, mu) - 1e-12);
      CHECK(rate >= bernstein_lower(x, mu, var) - 1e-12);
    }
  }
}

TEST_CASE("period length grows logarithmically in the perturbation") {
  CHECK(rounds_per_period(8.0, 0.1) == 19);
  CHECK(rounds_per_period(8.0, 0.01) == 37);
  CHECK(rounds_per_period(8.0, 0.001) == 56);
  CHECK(rounds_per_period(0.0001, 0.99) == 1);
  CHECK_THROWS_AS(rounds_per_period(0.0, 0.1), ConfigError);
  CHECK_THROWS_AS(rounds_per_period(8.0, 1.0), ConfigError);
  CHECK_THROWS_AS(rounds_per_period(8.0, 0.0), ConfigError);
}

TEST_CASE("resistance of landing in an observation bin") {
  UtilityModel u = bernoulli(Rational(1, 2));
  QuantizationParams quant = QuantizationParams::from_q(4);

  CHECK(bin_resistance(u, quant, 2, 8.0) == 0.0);  // the mean's own bin
  double above = bin_resistance(u, quant, 3, 8.0);
  double below = bin_resistance(u, quant, 0, 8.0);
  CHECK(above == doctest::Approx(8 * kl_half(0.75)).epsilon(1e-9));
  CHECK(below == doctest::Approx(8 * kl_half(0.25)).epsilon(1e-9));  // symmetric coin
  CHECK(bin_resistance(u, quant, 4, 8.0) == doctest::Approx(8 * std::log(2.0)).epsilon(1e-9));

  // point masses never leave their bin, even to a bin whose edge they touch
  UtilityModel quarter = UtilityModel::deterministic(Rational(1, 4));
  CHECK(bin_resistance(quarter, quant, 1, 8.0) == 0.0);
  CHECK(bin_resistance(quarter, quant, 0, 8.0) == kInf);
  CHECK(bin_resistance(quarter, quant, 4, 8.0) == kInf);

  // the top bin needs mass exactly at 1
  UtilityModel capped = UtilityModel::finite_support(
      {{Rational(0), Rational(1, 2)}, {Rational(3, 4), Rational(1, 2)}});
  CHECK(bin_resistance(capped, quant, 4, 8.0) == kInf);

  CHECK_THROWS_AS(bin_resistance(u, quant, 5, 8.0), ConfigError);
  CHECK_THROWS_AS(bin_resistance(u, quant, -1, 8.0), ConfigError);
}

TEST_CASE("period-mean bin distribution by exact convolution") {
  QuantizationParams quant = QuantizationParams::from_q(4);

  // four coin flips: binomial(4, 1/2) over means k/4
  TailResult coin = observation_tail(bernoulli(Rational(1, 2)), quant, 4);
  REQUIRE(coin.exact);
  REQUIRE(coin.bin_prob.size() == 5);
  std::vector<double> expect{1.0 / 16, 4.0 / 16, 6.0 / 16, 4.0 / 16, 1.0 / 16};
  for (int b = 0; b <= 4; ++b) {
    CHECK(coin.bin_prob[static_cast<std::size_t>(b)] ==
          doctest::Approx(expect[static_cast<std::size_t>(b)]).epsilon(1e-12));
    CHECK(coin.log_bin_prob[static_cast<std::size_t>(b)] ==
          doctest::Approx(std::log(expect[static_cast<std::size_t>(b)])).epsilon(1e-12));
  }

  // half-grid support {0, 1/2, 1}: sum of three draws is binomial(6, 1/2)/2
  UtilityModel three = UtilityModel::finite_support(
      {{Rational(0), Rational(1, 4)}, {Rational(1, 2), Rational(1, 2)}, {Rational(1), Rational(1, 4)}});
  TailResult t3 = observation_tail(three, quant, 3);
  REQUIRE(t3.exact);
  std::vector<double> expect3{7.0 / 64, 15.0 / 64, 35.0 / 64, 6.0 / 64, 1.0 / 64};
  for (int b = 0; b <= 4; ++b)
    CHECK(t3.bin_prob[static_cast<std::size_t>(b)] ==
          doctest::Approx(expect3[static_cast<std::size_t>(b)]).epsilon(1e-12));

  // tiny atom weight forces the log-space path: the top-bin mass is exact and
  // the bottom bin keeps a finite log far below double underflow
  UtilityModel skew = UtilityModel::finite_support(
      {{Rational(0), Rational(1, 1000)}, {Rational(1), Rational(999, 1000)}});
  TailResult ls = observation_tail(skew, quant, 512);
  REQUIRE(ls.exact);
  CHECK(ls.log_bin_prob[4] == doctest::Approx(512 * std::log(0.999)).epsilon(1e-9));
  CHECK(ls.log_bin_prob[0] > -2500);
  CHECK(ls.log_bin_prob[0] < -2000);
  CHECK(ls.bin_prob[0] == 0.0);  // underflows as a probability, not as a log

  CHECK_THROWS_AS(observation_tail(three, quant, 0), ConfigError);
}

TEST_CASE("sampled tail agrees with the exact law off the small-denominator grid") {
  // denominator 101 disables the convolution; three draws from {1/101, 1}
  UtilityModel off = UtilityModel::finite_support(
      {{Rational(1, 101), Rational(1, 2)}, {Rational(1), Rational(1, 2)}});
  QuantizationParams quant = QuantizationParams::from_q(4);
  TailResult mc = observation_tail(off, quant, 3);
  REQUIRE_FALSE(mc.exact);
  CHECK(mc.mc_half_width > 0.0);
  CHECK(mc.mc_half_width < 0.002);

  double sum = 0;
  for (double p : mc.bin_prob) sum += p;
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));

  // hand law: mean bins 0,1,2 for 0..2 unit draws, top only when all draws hit 1
  CHECK(mc.bin_prob[0] == doctest::Approx(1.0 / 8).epsilon(0.05));
  CHECK(mc.bin_prob[1] == doctest::Approx(3.0 / 8).epsilon(0.05));
  CHECK(mc.bin_prob[2] == doctest::Approx(3.0 / 8).epsilon(0.05));
  CHECK(mc.bin_prob[3] == 0.0);
  CHECK(mc.bin_prob[4] == doctest::Approx(1.0 / 8).epsilon(0.05));
}

TEST_CASE("empirical decay rate approaches the bin resistance") {
  UtilityModel u = bernoulli(Rational(1, 2));
  QuantizationParams quant = QuantizationParams::from_q(4);
  RateCheck rc = empirical_rate_check(u, quant, 3, 8.0, {1e-1, 1e-2, 1e-3});

  REQUIRE(rc.points.size() == 3);
  CHECK_FALSE(rc.zero_probability);
  CHECK(rc.limit == doctest::Approx(1.0464962875290955).epsilon(1e-9));
  CHECK(rc.points[0].tau == 19);
  CHECK(rc.points[1].tau == 37);
  CHECK(rc.points[2].tau == 56);
  CHECK(rc.points[0].slope == rc.points[0].point_ratio);

  // frozen decay slopes for this grid; the error shrinks monotonically and the
  // final slope sits within 1% of the limit
  CHECK(rc.points[0].slope == doctest::Approx(2.01757044273).epsilon(1e-6));
  CHECK(rc.points[1].slope == doctest::Approx(0.874675706821).epsilon(1e-6));
  CHECK(rc.points[2].slope == doctest::Approx(1.03874127633).epsilon(1e-6));
  double e0 = std::abs(rc.points[0].slope - rc.limit);
  double e1 = std::abs(rc.points[1].slope - rc.limit);
  double e2 = std::abs(rc.points[2].slope - rc.limit);
  CHECK(e1 < e0);
  CHECK(e2 < e1);
  CHECK(e2 / rc.limit < 0.01);

  // an impossible bin is flagged instead of reported as a rate
  RateCheck dead = empirical_rate_check(UtilityModel::deterministic(Rational(1, 2)), quant, 0,
                                        8.0, {1e-1, 1e-2});
  CHECK(dead.zero_probability);
  CHECK(dead.limit == kInf);
  CHECK(dead.points[0].log_prob == -kInf);
  CHECK(dead.points[0].point_ratio == kInf);
}
