#include <doctest.h>

#include <cmath>

#include "oracles.hpp"

using namespace nilnf;
using oracle::Gen;
using Q = RadScalar;
using P = Poly<Q>;
using VF = VectorField<Q>;

namespace {

const Sl2Triple<Q>& triple(int nu) {
  static const Sl2Triple<Q> t2 = build_triple<Q>(JordanType{{2}});
  static const Sl2Triple<Q> t3 = build_triple<Q>(JordanType{{3}});
  return nu == 2 ? t2 : t3;
}

P var(int n, int i) { return P::variable(n, i); }

P power(const P& p, int e) {
  P out = P::constant(p.dim(), Q(1));
  for (int i = 0; i < e; ++i) out = out * p;
  return out;
}

bool proportional(const P& a, const P& b, int n, int k) { return echelon_polys<Q>({a, b}, n, k, k).size() == 1; }

bool all_ok(const Verification& v) {
  for (const auto& c : v.checks)
    if (!c.ok) return false;
  return true;
}

// y dx + z dy - x^2 dx + x^3 dx + 2 x^4 dy in unscaled coordinates.
VF system_star() {
  P x = var(3, 0), y = var(3, 1), z = var(3, 2);
  return VF(std::vector<P>{y - x * x + x * x * x, z + Q(2) * x * x * x * x, P(3)});
}

}  // namespace

TEST_CASE("normalize_degreewise of N is the identity") {
  const auto& t = triple(3);
  auto r = normalize_degreewise(t, t.N, 6);
  CHECK(r.normal_form == t.N);
  for (const auto& u : r.transformations) CHECK(u.is_zero());
  CHECK(all_ok(r.verification));
}

TEST_CASE("normalize_degreewise rejects a wrong linear part") {
  const auto& t = triple(3);
  CHECK_THROWS_AS(normalize_degreewise(t, t.Nstar, 4), PreconditionError);
  CHECK_THROWS_AS(normalize_degreewise(t, t.N, 0), PreconditionError);
}

TEST_CASE("degreewise normal form matches the dense per-degree solve") {
  Gen g(50);
  for (int nu : {2, 3}) {
    const auto& t = triple(nu);
    for (int i = 0; i < 3; ++i) {
      VF v = t.N + g.field(t.dim(), 2, 4, 0.4);
      auto r = normalize_degreewise(t, v, 4);
      REQUIRE(r.normal_form == oracle::dense_normal_form(t, v, 4).truncate(4));
      REQUIRE(apply_d0_star(t, r.normal_form - t.N).is_zero());
      REQUIRE(all_ok(r.verification));
    }
  }
}

TEST_CASE("3D normal forms have the expected shape") {
  const auto& t = triple(3);
  Gen g(51);
  for (int i = 0; i < 3; ++i) {
    VF v = t.N + g.field(3, 2, 5, 0.3);
    auto r = normalize_degreewise(t, v, 5);
    auto shape = check_nf3_shape(r.normal_form, t.N, 5);
    REQUIRE(shape.matches);
  }
  P y = var(3, 1);
  auto bad = check_nf3_shape(t.N + VF::single(0, y * y), t.N, 3);
  CHECK_FALSE(bad.matches);
  CHECK(bad.first_bad_degree == 2);
}

TEST_CASE("newton_step with zero remainder") {
  const auto& t = triple(3);
  auto s = newton_step(t, t.N, VF(3), 2, 4);
  CHECK(s.U.is_zero());
  CHECK(s.nf_next == t.N);
  CHECK(s.remainder_next.is_zero());
  CHECK(all_ok(s.verification));
}

TEST_CASE("newton_step preconditions") {
  const auto& t = triple(3);
  P x = var(3, 0);
  CHECK_THROWS_AS(newton_step(t, t.N, VF::single(0, x * x), 2, 4), PreconditionError);
  CHECK_THROWS_AS(newton_step(t, t.N + VF::single(0, x * x * x), VF(3), 2, 4), PreconditionError);
  CHECK_THROWS_AS(newton_step(t, t.N, VF(3), 4, 4), PreconditionError);
  NewtonStepOptions strict;
  strict.require_good_form = true;
  CHECK_THROWS_AS(newton_step(t, t.N + VF::single(0, x * x), VF(3), 2, 4, strict), PreconditionError);
}

TEST_CASE("one Newton step from 2 to 4 equals degreewise steps 3 and 4") {
  Gen g(52);
  for (int nu : {2, 3}) {
    const auto& t = triple(nu);
    for (int i = 0; i < 3; ++i) {
      VF v = t.N + g.field(t.dim(), 2, 4, 0.4);
      auto two = normalize_degreewise(t, v, 2, 4);
      auto s = newton_step(t, two.normal_form, two.remainder, 2, 4);
      REQUIRE(all_ok(s.verification));
      REQUIRE(s.nf_next == normalize_degreewise(t, v, 4).normal_form);
    }
  }
}

TEST_CASE("Newton and degreewise drivers agree") {
  Gen g(53);
  const auto& t = triple(3);
  for (int i = 0; i < 2; ++i) {
    VF v = t.N + g.field(3, 2, 6, 0.2);
    auto newton = normalize_newton(t, v, 6);
    REQUIRE(all_ok(newton.result.verification));
    REQUIRE(newton.result.normal_form == normalize_degreewise(t, v, 6).normal_form);
    for (const auto& u : newton.result.transformations) {
      if (u.is_zero()) continue;
      Window<Q> w(t, u.min_degree(), u.degree());
      REQUIRE(w.ker_d0_part(u).is_zero());
    }
  }
}

TEST_CASE("the good-form condition propagates through Newton steps") {
  const auto& t = triple(3);
  Gen g(54);
  for (int i = 0; i < 2; ++i) {
    P f = Q(g.nonzero_rational()) * oracle::h3();
    VF v = oracle::good_form_input(t, f, g, 5, 8);
    auto run = normalize_newton(t, v, 8);
    for (const auto& s : run.steps) {
      REQUIRE(s.nf_condition.holds);
      REQUIRE(check_condition(t, t.N + s.Btilde, s.hi).holds);
      REQUIRE(s.nf_next_condition.holds);
    }
    REQUIRE(run.result.normal_form == t.N + f * t.Nstar);
  }
}

TEST_CASE("check_condition examples") {
  const auto& t = triple(3);
  auto n = check_condition(t, t.N, 6);
  CHECK(n.holds);
  CHECK(n.f.is_zero());
  P h = oracle::h3();
  auto good = check_condition(t, t.N + h * t.Nstar, 6);
  CHECK(good.holds);
  CHECK(good.f == h);
  auto bad = check_condition(t, t.N + var(3, 0) * t.Nstar, 6);
  CHECK_FALSE(bad.holds);
  CHECK(bad.reason == "N(f) != 0");
  P x = var(3, 0);
  auto shape = check_condition(t, t.N + VF::single(1, x * x), 6);
  CHECK_FALSE(shape.holds);
  CHECK(shape.reason == "degree 2 part is not a multiple of N*");
}

TEST_CASE("joint invariants of the 3D triple are powers of h") {
  const auto& t = triple(3);
  auto b = first_integrals(t, 6, Exec::Serial);
  P h = oracle::h3();
  for (int k = 1; k <= 6; ++k) {
    const auto& deg = b.by_degree[static_cast<std::size_t>(k - 1)];
    REQUIRE(deg.size() == (k % 2 == 0 ? 1u : 0u));
    if (k % 2 == 0) {
      REQUIRE(proportional(deg[0], power(h, k / 2), 3, k));
      REQUIRE(t.N.apply(deg[0]).is_zero());
      REQUIRE(t.Nstar.apply(deg[0]).is_zero());
    }
  }
}

TEST_CASE("Jordan [2] has no nonconstant joint invariants") {
  auto b = first_integrals(triple(2), 4, Exec::Serial);
  CHECK(b.all().empty());
  CHECK_THROWS_AS(first_integrals(triple(2), 0), PreconditionError);
}

TEST_CASE("first integrals of a field with a nonlinear perturbation depend on z only") {
  auto fi = first_integrals_of_field(system_star(), 8, -1, Exec::Serial);
  REQUIRE(fi.basis.size() == 8);
  for (const auto& f : fi.basis) {
    REQUIRE(f.derive(0).is_zero());
    REQUIRE(f.derive(1).is_zero());
  }
}

TEST_CASE("with no margin, truncated first integrals include spurious jets") {
  auto fi = first_integrals_of_field(system_star(), 4, 0, Exec::Serial);
  bool spurious = false;
  for (const auto& f : fi.basis)
    if (!f.derive(0).is_zero() || !f.derive(1).is_zero()) spurious = true;
  CHECK(spurious);
}

TEST_CASE("first integrals of the linear field agree with N alone") {
  const auto& t = triple(3);
  auto fi = first_integrals_of_field(t.N, 4, -1, Exec::Serial);
  for (const auto& f : fi.basis) REQUIRE(t.N.apply(f).is_zero());
  CHECK_THROWS_AS(first_integrals_of_field(t.N + VF::single(0, P::constant(3, Q(1))), 2), PreconditionError);
}

TEST_CASE("radii sequence") {
  double d = solver_constant(triple(3)).d;
  auto rep = radii_sequence(1.0, 30, d);
  CHECK(static_cast<double>(rep.R[1]) == doctest::Approx(1.0 / (2 * d)).epsilon(1e-12));
  for (auto r : rep.R) REQUIRE(r > 0);
  CHECK(rep.limit > 0);
  REQUIRE(rep.m1 >= 0);
  CHECK(rep.tail_verified);
  for (int k = rep.m1 + 1; k <= 30; ++k) REQUIRE(rep.R[k] > rep.R[rep.m1] / 2);
  for (const auto* s : {&rep.series_log, &rep.series_geom, &rep.series_lin})
    for (std::size_t k = 3; k < s->size(); ++k)
      REQUIRE(std::fabs((*s)[k] - (*s)[k - 1]) <= std::fabs((*s)[k - 1] - (*s)[k - 2]));
  CHECK_THROWS_AS(radii_sequence(0.5, 10, d), PreconditionError);
  CHECK_THROWS_AS(radii_sequence(1.0, 10, 0), PreconditionError);
}

TEST_CASE("schedule points: R < rho for every m once 2 m^3 d >= 1") {
  double d = solver_constant(triple(3)).d;
  for (int k = 1; k <= 20; ++k) {
    auto p = schedule_point(1 << k, 1.0, d);
    REQUIRE(p.R < p.rho);
    REQUIRE(p.rho < p.r);
    REQUIRE_FALSE(p.ordered);
  }
  CHECK(radii_sequence(1.0, 20, d).m0 == -1);
}

TEST_CASE("serial and parallel first integrals agree") {
  const auto& t = triple(3);
  auto s = first_integrals(t, 6, Exec::Serial), p = first_integrals(t, 6, Exec::Parallel);
  CHECK(s.all() == p.all());
  auto fs = first_integrals_of_field(system_star(), 5, -1, Exec::Serial);
  auto fp = first_integrals_of_field(system_star(), 5, -1, Exec::Parallel);
  CHECK(fs.basis == fp.basis);
}

TEST_CASE("float Newton step verifies within tolerance") {
  auto t = build_triple<double>(JordanType{{3}});
  auto tq = build_triple<Q>(JordanType{{3}});
  Gen g(55);
  VF v = tq.N + g.field(3, 2, 4, 0.3);
  VectorField<double> vf = v.map_coefficients<double>([](const Q& c) { return c.to_double(); });
  auto r = normalize_newton(t, vf, 4);
  CHECK(all_ok(r.result.verification));
  auto exact = normalize_newton(tq, v, 4).result.normal_form;
  VectorField<double> diff = r.result.normal_form - exact.map_coefficients<double>([](const Q& c) { return c.to_double(); });
  CHECK(rnorm(diff, Rational(1)).value < 1e-8);
}
