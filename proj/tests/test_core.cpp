#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <random>

#include "pdl/eps_poly.hpp"
#include "pdl/rational.hpp"

using namespace pdl;

TEST_CASE("rational normalization and arithmetic") {
  CHECK(Rational(2, 4) == Rational(1, 2));
  CHECK(Rational(-3, -6) == Rational(1, 2));
  CHECK(Rational(3, -6) == Rational(-1, 2));
  CHECK(Rational(0, 7) == Rational(0));
  CHECK(Rational(0, 7).den() == 1);

  Rational a(3, 10), b(2, 15);
  CHECK(a + b == Rational(13, 30));
  CHECK(a - b == Rational(1, 6));
  CHECK(a * b == Rational(1, 25));
  CHECK(a / b == Rational(9, 4));
  CHECK(-a == Rational(-3, 10));
  CHECK(abs(Rational(-3, 10)) == a);

  CHECK(Rational(7, 2).floor() == 3);
  CHECK(Rational(-7, 2).floor() == -4);
  CHECK(Rational(4, 2).floor() == 2);

  CHECK(Rational(1, 3) < Rational(1, 2));
  CHECK(Rational(-1, 2) < Rational(-1, 3));
  CHECK(min(a, b) == b);
  CHECK(max(a, b) == a);
}

TEST_CASE("rational error paths") {
  CHECK_THROWS_AS(Rational(1, 0), ConsistencyError);
  CHECK_THROWS_AS(Rational(1) / Rational(0), ConsistencyError);
  Rational huge(INT64_MAX, 1);
  CHECK_THROWS_AS(huge * huge, ConsistencyError);
  CHECK_THROWS_AS(huge + Rational(1), ConsistencyError);
}

TEST_CASE("rational from_double recovers grid values") {
  CHECK(Rational::from_double(0.05) == Rational(1, 20));
  CHECK(Rational::from_double(0.8) == Rational(4, 5));
  CHECK(Rational::from_double(1.0 / 3.0) == Rational(1, 3));
  CHECK(Rational::from_double(-0.25) == Rational(-1, 4));
  CHECK(Rational::from_double(0.0) == Rational(0));
  CHECK_THROWS_AS(Rational::from_double(std::nan("")), ConfigError);
}

TEST_CASE("rational random arithmetic against int128 reference") {
  std::mt19937_64 rng(42);
  std::uniform_int_distribution<int64_t> num(-1000, 1000);
  std::uniform_int_distribution<int64_t> den(1, 1000);
  for (int it = 0; it < 2000; ++it) {
    Rational a(num(rng), den(rng)), b(num(rng), den(rng));
    Rational s = a + b;
    // cross-multiplied identity: s == a + b over a common denominator
    __int128 lhs = static_cast<__int128>(s.num()) * a.den() * b.den();
    __int128 rhs = (static_cast<__int128>(a.num()) * b.den() +
                    static_cast<__int128>(b.num()) * a.den()) * s.den();
    CHECK(lhs == rhs);
    bool lt = static_cast<__int128>(a.num()) * b.den() < static_cast<__int128>(b.num()) * a.den();
    CHECK((a < b) == lt);
  }
}

TEST_CASE("resistance ordering and saturation") {
  Resistance inf = Resistance::infinite();
  Resistance two = Resistance::finite(Rational(2));
  Resistance half = Resistance::finite(Rational(1, 2));
  CHECK(half < two);
  CHECK(two < inf);
  CHECK_FALSE(inf < inf);
  CHECK(inf == inf);
  CHECK((two + half) == Resistance::finite(Rational(5, 2)));
  CHECK((two + inf) == inf);
  CHECK(min(two, inf) == two);
  CHECK(inf.str() == "inf");
  CHECK(two.str() == "2");
  CHECK(std::isinf(inf.to_double()));
}

TEST_CASE("eps poly constructors and normal form") {
  CHECK(EpsPoly::zero().is_zero());
  CHECK(EpsPoly::one().is_one());
  CHECK(EpsPoly::constant(Rational(0)).is_zero());
  // terms at equal exponents merge; cancelled terms vanish
  EpsPoly p({{Rational(1, 2), Rational(3)}, {Rational(1, 2), Rational(-3)}});
  CHECK(p.is_zero());
  EpsPoly q({{Rational(2), Rational(1)}, {Rational(1), Rational(4)}, {Rational(1), Rational(-2)}});
  CHECK(q.terms().size() == 2);
  CHECK(q.terms()[0].first == Rational(1));
  CHECK(q.terms()[0].second == Rational(2));
}

TEST_CASE("eps poly algebra identities") {
  EpsPoly r = EpsPoly::power(Rational(1, 3));
  CHECK((r + EpsPoly::one_minus_power(Rational(1, 3))).is_one());

  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int64_t> coef(-5, 5);
  std::uniform_int_distribution<int64_t> expo(0, 6);
  auto random_poly = [&]() {
    std::vector<EpsPoly::Term> t;
    for (int i = 0; i < 4; ++i)
      t.push_back({Rational(expo(rng), 3), Rational(coef(rng))});
    return EpsPoly(std::move(t));
  };
  for (int it = 0; it < 300; ++it) {
    EpsPoly a = random_poly(), b = random_poly(), c = random_poly();
    CHECK((a + b) * c == a * c + b * c);
    CHECK(a * b == b * a);
    CHECK(a + b == b + a);
    CHECK((a - a).is_zero());
    double eps = 0.3;
    CHECK(std::abs((a * b).eval(eps) - a.eval(eps) * b.eval(eps)) < 1e-9);
    CHECK(std::abs((a + b).eval(eps) - (a.eval(eps) + b.eval(eps))) < 1e-9);
  }
}

TEST_CASE("eps poly resistance is the leading exponent") {
  EpsPoly p({{Rational(3, 2), Rational(5)}, {Rational(2), Rational(-1)}});
  CHECK(p.resistance() == Resistance::finite(Rational(3, 2)));
  CHECK(p.leading_coefficient() == Rational(5));
  CHECK(p.leading_coefficient_positive());
  CHECK(EpsPoly::zero().resistance() == Resistance::infinite());
  CHECK_THROWS_AS(EpsPoly::zero().leading_coefficient(), ConsistencyError);

  // product of positive-leading polynomials: resistances add
  EpsPoly a = EpsPoly::power(Rational(1, 2)).scaled(Rational(3));
  EpsPoly b = EpsPoly::one_minus_power(Rational(2));
  Resistance ra = a.resistance(), rb = b.resistance();
  CHECK((a * b).resistance() == ra + rb);
}

TEST_CASE("eps poly eval matches horner-free direct sum") {
  EpsPoly p({{Rational(0), Rational(1, 2)},
             {Rational(1), Rational(-1, 4)},
             {Rational(5, 2), Rational(3)}});
  for (double eps : {0.3, 0.1, 0.01}) {
    double direct = 0.5 - 0.25 * eps + 3 * std::pow(eps, 2.5);
    CHECK(p.eval(eps) == doctest::Approx(direct).epsilon(1e-12));
  }
  CHECK(p.str() == "1/2 + -1/4*e^1 + 3*e^5/2");
}
