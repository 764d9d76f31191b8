#include <doctest.h>

#include "oracles.hpp"

using namespace nilnf;
using oracle::Gen;
using Q = RadScalar;
using P = Poly<Q>;

namespace {

P var(int n, int i) { return P::variable(n, i); }
Q q(long a, long b = 1) { return Q(Rational(a, b)); }

Q fischer_by_hand(const P& f, const P& g) {
  Q s;
  for (const auto& [m, c] : f.terms()) s += c * g.coefficient(m) * Q(Rational(m.factorial()));
  return s;
}

}  // namespace

TEST_CASE("fischer_inner examples") {
  P x1 = var(1, 0);
  CHECK(fischer_inner(x1 * x1 * x1, x1 * x1 * x1, 3) == Q(6));
  CHECK(fischer_inner(var(2, 0), var(2, 1), 1) == Q());
  P x = var(2, 0), y = var(2, 1);
  P x2y = x * x * y;
  CHECK(fischer_inner(x2y.derive(0), x * y, 2) == Q(2));
  CHECK(fischer_inner(x2y, x * (x * y), 3) == Q(2));
}

TEST_CASE("inner products reject bad input") {
  P x = var(2, 0);
  CHECK_THROWS(fischer_inner(x, x * x, 1));
  CHECK_THROWS(fischer_inner(x, var(3, 0), 1));
  CHECK_THROWS(normalized_inner(x + x * x, x, 1));
}

TEST_CASE("normalized_inner examples") {
  P x = var(2, 0), y = var(2, 1);
  CHECK(normalized_inner(x * y, x * y, 2) == q(1, 2));
  P x1 = var(1, 0), p = x1;
  for (int d = 1; d <= 6; ++d, p = p * x1) CHECK(normalized_inner(p, p, d) == Q(1));
  CHECK(normalized_inner(x * x, y * y, 2) == Q());
}

TEST_CASE("norm_sq examples") {
  CHECK(norm_sq(P(1)) == Q());
  P x1 = var(1, 0);
  CHECK(norm_sq(x1 + x1 * x1) == Q(2));
  CHECK(norm_sq(var(2, 0) * var(2, 1)) == q(1, 2));
}

TEST_CASE("derive, multiply, act_linear_field") {
  P x = var(3, 0), y = var(3, 1), z = var(3, 2);
  CHECK((x * x * y).derive(0) == Q(2) * (x * y));
  CHECK(x * x == P::monomial(Multidegree{2, 0, 0}, Q(1)));
  CHECK_THROWS((x * y).derive(3));
  VectorField<Q> n(std::vector<P>{y, z, P(3)});
  CHECK(act_linear_field(n, oracle::h3()).is_zero());
  VectorField<Q> ns(std::vector<P>{P(3), x, y});
  CHECK(act_linear_field(ns, oracle::h3()).is_zero());
}

TEST_CASE("fischer_inner matches the weighted sum") {
  Gen g(11);
  for (int i = 0; i < 50; ++i) {
    int n = static_cast<int>(g.integer(1, 4)), d = static_cast<int>(g.integer(0, 4));
    P f = g.poly(n, d, d), h = g.poly(n, d, d);
    REQUIRE(fischer_inner(f, h, d) == fischer_by_hand(f, h));
    REQUIRE(fischer_inner(f, h, d) == fischer_inner(h, f, d));
  }
}

TEST_CASE("derivative is adjoint to multiplication by x_j") {
  Gen g(12);
  for (int i = 0; i < 60; ++i) {
    int n = static_cast<int>(g.integer(1, 4)), d = static_cast<int>(g.integer(0, 4));
    P f = g.poly(n, d + 1, d + 1), h = g.poly(n, d, d);
    for (int j = 0; j < n; ++j) REQUIRE(fischer_inner(f.derive(j), h, d) == fischer_inner(f, var(n, j) * h, d + 1));
  }
}

TEST_CASE("normalized_inner = fischer_inner / delta!") {
  Gen g(13);
  for (int i = 0; i < 60; ++i) {
    int n = static_cast<int>(g.integer(1, 4)), d = static_cast<int>(g.integer(0, 5));
    P f = g.poly(n, d, d), h = g.poly(n, d, d);
    REQUIRE(normalized_inner(f, h, d) == fischer_inner(f, h, d) * Q(Rational(1) / Rational(factorial(d))));
  }
}

TEST_CASE("norm is submultiplicative on homogeneous factors") {
  Gen g(14);
  for (int i = 0; i < 100; ++i) {
    int n = static_cast<int>(g.integer(1, 3));
    int a = static_cast<int>(g.integer(0, 3)), b = static_cast<int>(g.integer(0, 3));
    P f = g.poly(n, a, a), h = g.poly(n, b, b);
    // Squares compare exactly: every coefficient here is rational.
    Rational lhs = norm_sq(f * h).rational_part(), rhs = (norm_sq(f) * norm_sq(h)).rational_part();
    REQUIRE(lhs <= rhs);
  }
}

TEST_CASE("full-series norm is not submultiplicative across degrees") {
  P f = Poly<Q>::constant(1, Q(1)) + var(1, 0);
  // (1 + x)^2 = 1 + 2x + x^2: 6 > 2 * 2.
  CHECK(norm_sq(f * f) == Q(6));
  CHECK(norm_sq(f) * norm_sq(f) == Q(4));
}

TEST_CASE("slices, truncation and coordinates") {
  Gen g(15);
  P f = g.poly(3, 0, 4, 0.7);
  P sum(3);
  for (int k = 0; k <= 4; ++k) {
    auto c = f.homogeneous_part(k).coordinates(k);
    REQUIRE(c.size() == slice_dimension(3, k));
    sum += P::from_coordinates(3, k, c);
  }
  CHECK(sum == f);
  CHECK(f.truncate(2) + f.drop_below(3) == f);
  CHECK(slice_dimension(3, 4) == 15);
}

TEST_CASE("float polynomials") {
  Poly<double> x = Poly<double>::variable(2, 0), y = Poly<double>::variable(2, 1);
  CHECK(normalized_inner(x * y, x * y, 2) == doctest::Approx(0.5));
  CHECK((x - x).is_zero());
  CHECK((x * y).evaluate({2.0, 3.0}) == doctest::Approx(6.0));
}
