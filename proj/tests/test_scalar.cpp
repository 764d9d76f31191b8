#include <doctest.h>

#include "oracles.hpp"

using namespace nilnf;
using oracle::Gen;

namespace {

// Trial factorization: the largest k with k^2 | n.
RadicalForm trial_reduce(std::uint64_t n) {
  std::uint64_t k = 1;
  for (std::uint64_t f = 2; f * f <= n; ++f)
    if (n % (f * f) == 0) k = f;
  return {n / (k * k), k};
}

bool square_free(std::uint64_t d) {
  for (std::uint64_t f = 2; f * f <= d; ++f)
    if (d % (f * f) == 0) return false;
  return true;
}

}  // namespace

TEST_CASE("reduce_radical examples") {
  CHECK(reduce_radical(8) == RadicalForm{2, 2});
  CHECK(reduce_radical(1) == RadicalForm{1, 1});
  CHECK(reduce_radical(12) == RadicalForm{3, 2});
  CHECK(reduce_radical(72) == RadicalForm{2, 6});
}

TEST_CASE("reduce_radical agrees with trial factorization") {
  for (std::uint64_t n = 1; n <= 3000; ++n) {
    auto r = reduce_radical(n);
    REQUIRE(r == trial_reduce(n));
    REQUIRE(square_free(r.radicand));
    REQUIRE(r.factor * r.factor * r.radicand == n);
  }
}

TEST_CASE("inverse examples") {
  RadScalar s2 = RadScalar::sqrt(2);
  CHECK(s2.inverse() == RadScalar(Rational(1, 2)) * s2);
  CHECK(RadScalar(1).inverse() == RadScalar(1));
  RadScalar a = RadScalar(1) + s2;
  CHECK(a.inverse() == RadScalar(-1) + s2);
  CHECK_THROWS_AS(RadScalar().inverse(), DivisionByZero);
}

TEST_CASE("sqrt normalizes radicands") {
  CHECK(RadScalar::sqrt(8) == RadScalar(2) * RadScalar::sqrt(2));
  CHECK(RadScalar::sqrt(9) == RadScalar(3));
  CHECK(RadScalar::sqrt(2) * RadScalar::sqrt(3) == RadScalar::sqrt(6));
  CHECK(RadScalar::sqrt(6) * RadScalar::sqrt(10) == RadScalar(2) * RadScalar::sqrt(15));
  auto q = RadScalar::sqrt(Rational(1, 2));
  REQUIRE(q);
  CHECK(*q * *q == RadScalar(Rational(1, 2)));
  CHECK_FALSE(RadScalar::sqrt(Rational(-1)));
}

TEST_CASE("sqrt(a) sqrt(b) = k sqrt(d) with k^2 d = ab") {
  for (std::uint64_t a = 1; a <= 40; ++a)
    for (std::uint64_t b = 1; b <= 40; ++b) {
      auto p = RadScalar::sqrt(a) * RadScalar::sqrt(b);
      auto f = reduce_radical(a * b);
      REQUIRE(p == RadScalar(Rational(static_cast<long>(f.factor))) * RadScalar::sqrt(f.radicand));
    }
}

TEST_CASE("field axioms on Q(sqrt2, sqrt3, sqrt6)") {
  Gen g(20261016);
  for (int i = 0; i < 200; ++i) {
    RadScalar x = g.radical(), y = g.radical(), z = g.radical();
    REQUIRE((x + y) + z == x + (y + z));
    REQUIRE((x * y) * z == x * (y * z));
    REQUIRE(x * (y + z) == x * y + x * z);
    REQUIRE(x * y == y * x);
    REQUIRE(x - x == RadScalar());
    RadScalar xy = x * y;
    for (const auto& t : xy.terms()) REQUIRE((t.radicand == 1 || t.radicand == 2 || t.radicand == 3 || t.radicand == 6));
    if (!x.is_zero()) {
      REQUIRE(x * x.inverse() == RadScalar(1));
      REQUIRE((y / x) * x == y);
    }
  }
}

TEST_CASE("no zero coefficients are stored") {
  RadScalar a = RadScalar(1) + RadScalar::sqrt(2);
  RadScalar b = a - RadScalar::sqrt(2);
  CHECK(b.terms().size() == 1);
  CHECK(b.is_rational());
  CHECK((a - a).terms().empty());
}

TEST_CASE("to_double") {
  CHECK(RadScalar::sqrt(2).to_double() == doctest::Approx(1.41421356237));
  CHECK((RadScalar(Rational(1, 3)) + RadScalar::sqrt(3)).to_double() == doctest::Approx(1.0 / 3 + 1.73205080757));
}

TEST_CASE("float backend") {
  CHECK(ScalarTraits<double>::is_zero(1e-12));
  CHECK_FALSE(ScalarTraits<double>::is_zero(1e-6));
  CHECK(ScalarTraits<double>::sqrt_int(2) == doctest::Approx(1.41421356237));
  CHECK_THROWS_AS(ScalarTraits<double>::inverse(0.0), DivisionByZero);
  double old = float_tolerance();
  set_float_tolerance(1e-3);
  CHECK(ScalarTraits<double>::is_zero(1e-4));
  set_float_tolerance(old);
}

TEST_CASE("rationals are stored in lowest terms") {
  CHECK(RadScalar(Rational(76, 6)) == RadScalar(Rational(38, 3)));
  CHECK(RadScalar(Rational(8, 2)) == RadScalar(4));
  CHECK(RadScalar(Rational(-4, -6)).rational_part() == Rational(2, 3));
}
