#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nilnf/basis.hpp"
#include "nilnf/linalg.hpp"
#include "nilnf/parallel.hpp"
#include "nilnf/poly.hpp"
#include "nilnf/vfield.hpp"

namespace nilnf {

class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class VerificationError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct JordanType {
  std::vector<int> blocks;

  int dim() const {
    int n = 0;
    for (int b : blocks) n += b;
    return n;
  }
  // "3" or "3,2" or "[3, 2]".
  static JordanType parse(const std::string& text);
  std::string to_string() const;
  // Throws PreconditionError unless every block has size >= 2 and n <= 8.
  void validate() const;
};

template <FieldScalar S>
struct SliceOperators;
template <FieldScalar S>
struct ChainDecomposition;

template <FieldScalar S>
struct Sl2Triple {
  JordanType jordan;
  Matrix<S> n_matrix, nstar_matrix;
  // Lowering (Y role), raising (X role) and H' = [N*, N].
  VectorField<S> N, Nstar, Hprime;
  // x = L x~ takes the unit-superdiagonal Jordan field to N.
  std::vector<S> L;
  // H' = sum h_i x_i d/dx_i.
  std::vector<int> h;

  struct Cache {
    std::mutex mu;
    std::map<std::pair<int, int>, std::shared_ptr<const ChainDecomposition<S>>> decompositions;
  };
  std::shared_ptr<Cache> cache = std::make_shared<Cache>();

  int dim() const { return jordan.dim(); }
};

// Weight of a slice coordinate under H'.
inline int slice_weight(const SliceBasis& basis, const std::vector<int>& h, std::size_t idx) {
  const Multidegree& m = basis.monomial(idx);
  int w = 0;
  for (int i = 0; i < basis.n; ++i) w += m[i] * h[static_cast<std::size_t>(i)];
  if (basis.kind == SliceBasis::Kind::VectorFields) w -= h[static_cast<std::size_t>(basis.component(idx))];
  return w;
}

// X = action of N*, Y = action of N on one homogeneous slice (derivation on
// polynomials, bracket on vector fields); H is diagonal with weights.
template <FieldScalar S>
struct SliceOperators {
  SliceBasis basis;
  Matrix<S> X, Y;
  std::vector<int> weights;

  std::size_t dim() const { return basis.dim(); }
  S inner(const std::vector<S>& u, const std::vector<S>& v) const {
    S s{};
    for (std::size_t i = 0; i < u.size(); ++i) {
      if (ScalarTraits<S>::is_zero(u[i]) || ScalarTraits<S>::is_zero(v[i])) continue;
      s += u[i] * v[i] * ScalarTraits<S>::from_rational(basis.weight(i));
    }
    return s;
  }
  std::vector<S> apply_h(const std::vector<S>& v) const {
    std::vector<S> r(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) r[i] = v[i] * ScalarTraits<S>::from_int(weights[i]);
    return r;
  }
};

template <FieldScalar S>
std::vector<S> slice_coordinates(const SliceBasis& b, const Poly<S>& p) {
  return p.coordinates(b.degree);
}
template <FieldScalar S>
std::vector<S> slice_coordinates(const SliceBasis& b, const VectorField<S>& v) {
  return v.coordinates(b.degree);
}

// Matrix of a linear map given by its action on coordinate vectors.
template <FieldScalar S, class F>
Matrix<S> assemble_matrix(const SliceBasis& basis, F&& image_of_basis_vector, Exec exec) {
  std::size_t d = basis.dim();
  Matrix<S> m(d, d);
  auto column = [&](std::size_t j) { m.set_column(j, image_of_basis_vector(j)); };
  parallel_for(static_cast<long>(d), exec, [&](long j) { column(static_cast<std::size_t>(j)); }, 9);
  return m;
}

template <FieldScalar S>
SliceOperators<S> slice_operators(const Sl2Triple<S>& t, SliceBasis::Kind kind, int degree,
                                  Exec exec = default_exec()) {
  SliceOperators<S> ops;
  ops.basis = SliceBasis{kind, t.dim(), degree};
  int n = t.dim();
  auto image = [&](const VectorField<S>& lin, std::size_t j) {
    const Multidegree& m = ops.basis.monomial(j);
    if (kind == SliceBasis::Kind::Polynomials) {
      return lin.apply(Poly<S>::monomial(m, ScalarTraits<S>::from_int(1))).coordinates(degree);
    }
    auto e = VectorField<S>::single(ops.basis.component(j), Poly<S>::monomial(m, ScalarTraits<S>::from_int(1)));
    (void)n;
    return lie_bracket(lin, e).coordinates(degree);
  };
  ops.X = assemble_matrix<S>(ops.basis, [&](std::size_t j) { return image(t.Nstar, j); }, exec);
  ops.Y = assemble_matrix<S>(ops.basis, [&](std::size_t j) { return image(t.N, j); }, exec);
  for (std::size_t i = 0; i < ops.basis.dim(); ++i) ops.weights.push_back(slice_weight(ops.basis, t.h, i));
  return ops;
}

// Checks [X,Y] = H, [H,X] = 2X, [H,Y] = -2Y as matrices; returns a failure
// message or nullopt.
template <FieldScalar S>
std::optional<std::string> check_slice_relations(const SliceOperators<S>& ops) {
  std::size_t d = ops.dim();
  Matrix<S> H(d, d);
  for (std::size_t i = 0; i < d; ++i) H(i, i) = ScalarTraits<S>::from_int(ops.weights[i]);
  Matrix<S> xy = ops.X * ops.Y - ops.Y * ops.X;
  if (!(xy - H).is_zero()) return "[X,Y] != H";
  Matrix<S> hx = H * ops.X - ops.X * H;
  if (!(hx - ScalarTraits<S>::from_int(2) * ops.X).is_zero()) return "[H,X] != 2X";
  Matrix<S> hy = H * ops.Y - ops.Y * H;
  if (!(hy + ScalarTraits<S>::from_int(2) * ops.Y).is_zero()) return "[H,Y] != -2Y";
  return std::nullopt;
}

// Field-level relations [N*,N] = H', [H',N*] = 2N*, [H',N] = -2N.
template <FieldScalar S>
std::optional<std::string> check_field_relations(const VectorField<S>& n, const VectorField<S>& nstar,
                                                 const VectorField<S>& hprime) {
  if (!(lie_bracket(nstar, n) - hprime).is_zero()) return "[N*,N] != H'";
  if (!(lie_bracket(hprime, nstar) - ScalarTraits<S>::from_int(2) * nstar).is_zero()) return "[H',N*] != 2N*";
  if (!(lie_bracket(hprime, n) + ScalarTraits<S>::from_int(2) * n).is_zero()) return "[H',N] != -2N";
  return std::nullopt;
}

// Superdiagonal c_k = sqrt(k(nu-k)) per block; verifies the field relations
// and the induced relations on vector-field slices of degree <= check_degree.
template <FieldScalar S>
Sl2Triple<S> build_triple(const JordanType& jt, int check_degree = 3) {
  jt.validate();
  Sl2Triple<S> t;
  t.jordan = jt;
  int n = jt.dim();
  t.n_matrix = Matrix<S>(static_cast<std::size_t>(n), static_cast<std::size_t>(n));
  t.L.assign(static_cast<std::size_t>(n), ScalarTraits<S>::from_int(1));
  std::size_t start = 0;
  for (int nu : jt.blocks) {
    for (int k = 1; k < nu; ++k) {
      S c = ScalarTraits<S>::sqrt_int(static_cast<std::uint64_t>(k * (nu - k)));
      t.n_matrix(start + k - 1, start + k) = c;
      t.L[start + k] = t.L[start + k - 1] * c;
    }
    for (int i = 0; i < nu; ++i) t.h.push_back(nu - 1 - 2 * i);
    start += static_cast<std::size_t>(nu);
  }
  t.nstar_matrix = t.n_matrix.transpose();
  t.N = VectorField<S>::linear(t.n_matrix);
  t.Nstar = VectorField<S>::linear(t.nstar_matrix);
  t.Hprime = lie_bracket(t.Nstar, t.N);
  Matrix<S> hdiag(static_cast<std::size_t>(n), static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) hdiag(i, i) = ScalarTraits<S>::from_int(t.h[static_cast<std::size_t>(i)]);
  if (!(t.Hprime - VectorField<S>::linear(hdiag)).is_zero())
    throw VerificationError("build_triple: H' is not the expected diagonal field");
  if (auto err = check_field_relations(t.N, t.Nstar, t.Hprime))
    throw VerificationError("build_triple: " + *err);
  for (int k = 1; k <= check_degree; ++k) {
    auto ops = slice_operators(t, SliceBasis::Kind::VectorFields, k);
    if (auto err = check_slice_relations(ops))
      throw VerificationError("build_triple: ad-triple on V_" + std::to_string(k) + ": " + *err);
  }
  return t;
}

// Field in the original coordinates x with the unit-superdiagonal Jordan
// linear part, rewritten in the scaled coordinates x~ (x = L x~).
template <FieldScalar S>
VectorField<S> to_scaled_coordinates(const Sl2Triple<S>& t, const VectorField<S>& v) {
  int n = t.dim();
  std::vector<Poly<S>> g;
  for (int i = 0; i < n; ++i) g.push_back(t.L[static_cast<std::size_t>(i)] * Poly<S>::variable(n, i));
  std::vector<Poly<S>> comps;
  int deg = std::max(0, v.degree());
  for (int i = 0; i < n; ++i)
    comps.push_back(substitute(v[i], g, deg) * ScalarTraits<S>::inverse(t.L[static_cast<std::size_t>(i)]));
  return VectorField<S>(std::move(comps));
}

template <FieldScalar S>
struct Chain {
  int weight = 0;
  // v_m = Y^m v_0 for m = 0..weight, as slice coordinates.
  std::vector<std::vector<S>> vectors;
  // ||v_m||^2 = m! weight! / (weight-m)! ||v_0||^2.
  std::vector<S> norm_sq;

  int length() const { return weight + 1; }
};

template <FieldScalar S>
struct ChainDecomposition {
  SliceOperators<S> ops;
  std::vector<Chain<S>> chains;

  const SliceBasis& basis() const { return ops.basis; }
  std::size_t dim() const { return ops.dim(); }

  // Coefficients of w on v_m for one chain (orthogonal projection).
  std::vector<S> chain_coefficients(std::size_t chain, const std::vector<S>& w) const {
    const auto& c = chains[chain];
    std::vector<S> out;
    for (int m = 0; m <= c.weight; ++m)
      out.push_back(ops.inner(w, c.vectors[m]) * ScalarTraits<S>::inverse(c.norm_sq[m]));
    return out;
  }
};

template <FieldScalar S>
S chain_norm_sq_formula(int weight, int m, const S& base_norm_sq) {
  Integer num = factorial(static_cast<unsigned>(m)) * factorial(static_cast<unsigned>(weight));
  Rational q(num, factorial(static_cast<unsigned>(weight - m)));
  q.canonicalize();
  return base_norm_sq * ScalarTraits<S>::from_rational(q);
}

// Orthogonal chain decomposition of one slice: primitive vectors span Ker X
// in each weight space (orthogonalized in basis order), chains generated by Y.
template <FieldScalar S>
ChainDecomposition<S> decompose_uncached(const Sl2Triple<S>& t, SliceBasis::Kind kind, int degree,
                                         Exec exec = default_exec()) {
  ChainDecomposition<S> dec;
  dec.ops = slice_operators(t, kind, degree, exec);
  const auto& ops = dec.ops;
  std::size_t d = ops.dim();
  std::map<int, std::vector<std::size_t>, std::greater<>> by_weight;
  for (std::size_t i = 0; i < d; ++i) by_weight[ops.weights[i]].push_back(i);

  for (const auto& [mu, cols] : by_weight) {
    auto rows_it = by_weight.find(mu + 2);
    std::vector<std::vector<S>> ker;
    if (rows_it == by_weight.end()) {
      for (std::size_t j = 0; j < cols.size(); ++j) {
        std::vector<S> e(cols.size());
        e[j] = ScalarTraits<S>::from_int(1);
        ker.push_back(std::move(e));
      }
    } else {
      const auto& rows = rows_it->second;
      Matrix<S> sub(rows.size(), cols.size());
      for (std::size_t a = 0; a < rows.size(); ++a)
        for (std::size_t b = 0; b < cols.size(); ++b) sub(a, b) = ops.X(rows[a], cols[b]);
      ker = kernel(sub, Exec::Serial);
    }
    if (!ker.empty() && mu < 0)
      throw VerificationError("decompose: primitive vector of negative weight");
    std::vector<std::vector<S>> prim;
    std::vector<S> prim_norm;
    for (const auto& kv : ker) {
      std::vector<S> v(d);
      for (std::size_t b = 0; b < cols.size(); ++b) v[cols[b]] = kv[b];
      for (std::size_t p = 0; p < prim.size(); ++p) {
        S c = ops.inner(v, prim[p]) * ScalarTraits<S>::inverse(prim_norm[p]);
        if (!ScalarTraits<S>::is_zero(c)) v = axpy(v, -c, prim[p]);
      }
      prim_norm.push_back(ops.inner(v, v));
      prim.push_back(std::move(v));
    }
    for (std::size_t p = 0; p < prim.size(); ++p) {
      Chain<S> c;
      c.weight = mu;
      c.vectors.push_back(prim[p]);
      for (int m = 0; m < mu; ++m) c.vectors.push_back(ops.Y * c.vectors.back());
      double scale = 0;
      for (const auto& v : c.vectors) scale = std::max(scale, max_magnitude(v));
      if (!negligible(ops.Y * c.vectors.back(), scale))
        throw VerificationError("decompose: chain does not terminate at its weight");
      for (int m = 0; m <= mu; ++m) c.norm_sq.push_back(chain_norm_sq_formula(mu, m, prim_norm[p]));
      dec.chains.push_back(std::move(c));
    }
  }
  std::size_t total = 0;
  for (const auto& c : dec.chains) total += static_cast<std::size_t>(c.length());
  if (total != d) throw VerificationError("decompose: chains do not span the slice");
  return dec;
}

template <FieldScalar S>
std::shared_ptr<const ChainDecomposition<S>> decompose(const Sl2Triple<S>& t, SliceBasis::Kind kind, int degree) {
  auto key = std::make_pair(kind == SliceBasis::Kind::Polynomials ? 0 : 1, degree);
  {
    std::lock_guard lock(t.cache->mu);
    auto it = t.cache->decompositions.find(key);
    if (it != t.cache->decompositions.end()) return it->second;
  }
  auto dec = std::make_shared<const ChainDecomposition<S>>(decompose_uncached(t, kind, degree));
  std::lock_guard lock(t.cache->mu);
  return t.cache->decompositions.try_emplace(key, dec).first->second;
}

enum class ChainOp { X, Y, H };

template <FieldScalar S>
struct ChainStep {
  S coefficient;
  std::optional<int> target;  // index m' in the chain; empty when the image is 0
};

// Op applied to v_m: X v_m = m(weight-m+1) v_{m-1}, Y v_m = v_{m+1},
// H v_m = (weight-2m) v_m. Verified against the stored vectors.
template <FieldScalar S>
ChainStep<S> chain_action(const ChainDecomposition<S>& dec, std::size_t chain, ChainOp op, int m) {
  const auto& c = dec.chains.at(chain);
  if (m < 0 || m > c.weight) throw std::out_of_range("chain_action: m outside the chain");
  ChainStep<S> step{S{}, std::nullopt};
  std::vector<S> image;
  switch (op) {
    case ChainOp::X:
      image = dec.ops.X * c.vectors[m];
      if (m > 0) step = {ScalarTraits<S>::from_int(static_cast<long>(m) * (c.weight - m + 1)), m - 1};
      break;
    case ChainOp::Y:
      image = dec.ops.Y * c.vectors[m];
      if (m < c.weight) step = {ScalarTraits<S>::from_int(1), m + 1};
      break;
    case ChainOp::H:
      image = dec.ops.apply_h(c.vectors[m]);
      step = {ScalarTraits<S>::from_int(c.weight - 2 * m), m};
      break;
  }
  std::vector<S> expect(image.size());
  if (step.target) {
    const auto& tv = c.vectors[*step.target];
    for (std::size_t i = 0; i < tv.size(); ++i) expect[i] = step.coefficient * tv[i];
  }
  for (std::size_t i = 0; i < image.size(); ++i) image[i] -= expect[i];
  if (!vector_is_zero(image)) throw VerificationError("chain_action: stored chain disagrees with operator");
  return step;
}

template <FieldScalar S>
S chain_norm_sq(const ChainDecomposition<S>& dec, std::size_t chain, int m) {
  const auto& c = dec.chains.at(chain);
  if (m < 0 || m > c.weight) throw std::out_of_range("chain_norm_sq: m outside the chain");
  return c.norm_sq[m];
}

}  // namespace nilnf
