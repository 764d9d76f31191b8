#include <doctest.h>

#include <set>

#include "oracles.hpp"

using namespace nilnf;
using Q = RadScalar;
using P = Poly<Q>;
using VF = VectorField<Q>;
using Kind = SliceBasis::Kind;

namespace {

P var(int n, int i) { return P::variable(n, i); }

std::vector<std::vector<int>> jordan_types() { return {{2}, {3}, {4}, {2, 2}, {3, 2}}; }

// H-eigenvalues read off the diagonal of ad_{H'} (H' acting by derivation on
// polynomials), independent of the stored weights.
std::multiset<int> brute_h_spectrum(const Sl2Triple<Q>& t, Kind kind, int k) {
  SliceBasis b{kind, t.dim(), k};
  std::multiset<int> out;
  for (std::size_t j = 0; j < b.dim(); ++j) {
    P mono = P::monomial(b.monomial(j), Q(1));
    std::vector<Q> img;
    if (kind == Kind::Polynomials)
      img = t.Hprime.apply(mono).coordinates(k);
    else
      img = lie_bracket(t.Hprime, VF::single(b.component(j), mono)).coordinates(k);
    for (std::size_t i = 0; i < img.size(); ++i)
      if (i != j) REQUIRE(img[i].is_zero());
    REQUIRE(img[j].is_rational());
    out.insert(static_cast<int>(img[j].rational_part().get_num().get_si()));
  }
  return out;
}

}  // namespace

TEST_CASE("JordanType parsing and validation") {
  CHECK(JordanType::parse("3").blocks == std::vector<int>{3});
  CHECK(JordanType::parse("[3, 2]").blocks == std::vector<int>{3, 2});
  CHECK(JordanType::parse("2,2").dim() == 4);
  CHECK_THROWS_AS(build_triple<Q>(JordanType{{3, 1}}), PreconditionError);
  CHECK_THROWS_AS(build_triple<Q>(JordanType{{1}}), PreconditionError);
  CHECK_THROWS_AS(build_triple<Q>(JordanType{{5, 4}}), PreconditionError);
}

TEST_CASE("build_triple [2]") {
  auto t = build_triple<Q>(JordanType{{2}});
  P x = var(2, 0), y = var(2, 1);
  CHECK(t.N == VF(std::vector<P>{y, P(2)}));
  CHECK(t.Nstar == VF(std::vector<P>{P(2), x}));
  CHECK(t.Hprime == VF(std::vector<P>{x, -y}));
  CHECK_FALSE(check_field_relations(t.N, t.Nstar, t.Hprime));
}

TEST_CASE("build_triple [3]") {
  auto t = build_triple<Q>(JordanType{{3}});
  P x = var(3, 0), y = var(3, 1), z = var(3, 2);
  Q s2 = Q::sqrt(2);
  CHECK(t.N == VF(std::vector<P>{s2 * y, s2 * z, P(3)}));
  CHECK(t.Hprime == VF(std::vector<P>{Q(2) * x, P(3), Q(-2) * z}));
  CHECK(t.h == std::vector<int>{2, 0, -2});
  CHECK_FALSE(check_field_relations(t.N, t.Nstar, t.Hprime));
}

TEST_CASE("the unscaled 3D pair is not an sl2-triple") {
  P x = var(3, 0), y = var(3, 1), z = var(3, 2);
  VF n(std::vector<P>{y, z, P(3)}), ns(std::vector<P>{P(3), x, y});
  VF h = lie_bracket(ns, n);
  auto err = check_field_relations(n, ns, h);
  REQUIRE(err);
  CHECK(*err == "[H',N*] != 2N*");
  // The coefficient is 1: [H', N*] = N*.
  CHECK(lie_bracket(h, ns) == ns);
}

TEST_CASE("sl2 relations for every Jordan type, fields and slices") {
  for (const auto& blocks : jordan_types()) {
    auto t = build_triple<Q>(JordanType{blocks}, 3);
    CHECK_FALSE(check_field_relations(t.N, t.Nstar, t.Hprime));
    for (int k = 1; k <= 3; ++k) CHECK_FALSE(check_slice_relations(slice_operators(t, Kind::VectorFields, k)));
    CHECK(t.nstar_matrix == t.n_matrix.transpose());
  }
}

TEST_CASE("scaled coordinates take the Jordan field to N") {
  for (const auto& blocks : jordan_types()) {
    auto t = build_triple<Q>(JordanType{blocks});
    int n = t.dim();
    VF jordan(n);
    int start = 0;
    for (int nu : blocks) {
      for (int k = 1; k < nu; ++k) jordan[start + k - 1] = var(n, start + k);
      start += nu;
    }
    CHECK(to_scaled_coordinates(t, jordan) == t.N);
  }
}

TEST_CASE("decompose P_1 for the 3D triple") {
  auto t = build_triple<Q>(JordanType{{3}});
  auto dec = decompose(t, Kind::Polynomials, 1);
  REQUIRE(dec->chains.size() == 1);
  CHECK(dec->chains[0].weight == 2);
  P b = P::from_coordinates(3, 1, dec->chains[0].vectors[0]);
  CHECK(b.terms().size() == 1);
  CHECK(b.coefficient(Multidegree{1, 0, 0}) != Q());
}

TEST_CASE("decompositions span, have nonnegative weights, and match the H spectrum") {
  for (const auto& blocks : jordan_types()) {
    auto t = build_triple<Q>(JordanType{blocks});
    for (Kind kind : {Kind::Polynomials, Kind::VectorFields})
      for (int k = kind == Kind::Polynomials ? 0 : 1; k <= 3; ++k) {
        auto dec = decompose(t, kind, k);
        std::size_t total = 0;
        std::multiset<int> from_chains;
        for (const auto& c : dec->chains) {
          REQUIRE(c.weight >= 0);
          total += static_cast<std::size_t>(c.length());
          for (int m = 0; m <= c.weight; ++m) from_chains.insert(c.weight - 2 * m);
        }
        REQUIRE(total == SliceBasis{kind, t.dim(), k}.dim());
        REQUIRE(from_chains == brute_h_spectrum(t, kind, k));
      }
  }
}

TEST_CASE("2D V_2 chain weights") {
  auto t = build_triple<Q>(JordanType{{2}});
  auto dec = decompose(t, Kind::VectorFields, 2);
  std::multiset<int> w;
  for (const auto& c : dec->chains) w.insert(c.weight);
  // V_2 = P_2 (x) C^2 = V(2) (x) V(1) = V(3) + V(1).
  CHECK(w == std::multiset<int>{1, 3});
  CHECK(dec->dim() == 6);
}

TEST_CASE("chain_action examples") {
  auto t = build_triple<Q>(JordanType{{3}});
  auto dec = decompose(t, Kind::Polynomials, 1);
  auto x0 = chain_action(*dec, 0, ChainOp::X, 0);
  CHECK(x0.coefficient == Q());
  CHECK_FALSE(x0.target);
  auto x1 = chain_action(*dec, 0, ChainOp::X, 1);
  CHECK(x1.coefficient == Q(2));
  CHECK(x1.target == 0);
  auto h1 = chain_action(*dec, 0, ChainOp::H, 1);
  CHECK(h1.coefficient == Q());
  auto y2 = chain_action(*dec, 0, ChainOp::Y, 2);
  CHECK_FALSE(y2.target);
  CHECK_THROWS_AS(chain_action(*dec, 0, ChainOp::Y, 3), std::out_of_range);
}

TEST_CASE("chain_action holds on every chain vector") {
  for (const auto& blocks : jordan_types()) {
    auto t = build_triple<Q>(JordanType{blocks});
    for (int k = 1; k <= 2; ++k) {
      auto dec = decompose(t, Kind::VectorFields, k);
      for (std::size_t c = 0; c < dec->chains.size(); ++c)
        for (int m = 0; m <= dec->chains[c].weight; ++m)
          for (ChainOp op : {ChainOp::X, ChainOp::Y, ChainOp::H}) CHECK_NOTHROW(chain_action(*dec, c, op, m));
    }
  }
}

TEST_CASE("chain norms") {
  auto t = build_triple<Q>(JordanType{{3}});
  auto dec = decompose(t, Kind::Polynomials, 1);
  Q b = chain_norm_sq(*dec, 0, 0);
  CHECK(chain_norm_sq(*dec, 0, 1) == Q(2) * b);
  CHECK(chain_norm_sq(*dec, 0, 2) == Q(4) * b);
  CHECK_THROWS_AS(chain_norm_sq(*dec, 0, 3), std::out_of_range);
}

TEST_CASE("chain vectors are mutually orthogonal") {
  for (const auto& blocks : std::vector<std::vector<int>>{{2}, {3}, {2, 2}}) {
    auto t = build_triple<Q>(JordanType{blocks});
    for (int k = 1; k <= 3; ++k) {
      auto dec = decompose(t, Kind::VectorFields, k);
      std::vector<std::vector<Q>> all;
      for (const auto& c : dec->chains)
        for (const auto& v : c.vectors) all.push_back(v);
      for (std::size_t i = 0; i < all.size(); ++i)
        for (std::size_t j = i + 1; j < all.size(); ++j) REQUIRE(dec->ops.inner(all[i], all[j]) == Q());
    }
  }
}

TEST_CASE("V_k = Im ad_N + Ker ad_N*, orthogonally") {
  for (const auto& blocks : std::vector<std::vector<int>>{{2}, {3}}) {
    auto t = build_triple<Q>(JordanType{blocks});
    for (int k = 1; k <= 5; ++k) {
      auto ops = slice_operators(t, Kind::VectorFields, k);
      auto ker = kernel(ops.X, Exec::Serial);
      std::size_t im = rank(ops.Y, Exec::Serial);
      REQUIRE(im + ker.size() == ops.dim());
      for (const auto& kv : ker)
        for (std::size_t j = 0; j < ops.dim(); ++j) REQUIRE(ops.inner(kv, ops.Y.column(j)) == Q());
    }
  }
}

TEST_CASE("decompositions are cached per triple") {
  auto t = build_triple<Q>(JordanType{{3}});
  CHECK(decompose(t, Kind::VectorFields, 2).get() == decompose(t, Kind::VectorFields, 2).get());
}

TEST_CASE("float triple and decomposition") {
  auto t = build_triple<double>(JordanType{{3, 2}});
  for (int k = 1; k <= 3; ++k) {
    auto dec = decompose(t, Kind::VectorFields, k);
    std::size_t total = 0;
    for (const auto& c : dec->chains) total += static_cast<std::size_t>(c.length());
    CHECK(total == dec->dim());
  }
}

TEST_CASE("stored chain norms equal normalized_inner of the vectors") {
  for (const auto& blocks : jordan_types()) {
    auto t = build_triple<Q>(JordanType{blocks});
    for (int k = 1; k <= 2; ++k) {
      auto dec = decompose(t, Kind::VectorFields, k);
      for (std::size_t c = 0; c < dec->chains.size(); ++c)
        for (int m = 0; m <= dec->chains[c].weight; ++m) {
          VF v = VF::from_coordinates(t.dim(), k, dec->chains[c].vectors[m]);
          Q direct;
          for (int i = 0; i < t.dim(); ++i) direct += normalized_inner(v[i], v[i], k);
          REQUIRE(chain_norm_sq(*dec, c, m) == direct);
        }
    }
  }
}
