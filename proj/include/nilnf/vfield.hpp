#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nilnf/basis.hpp"
#include "nilnf/linalg.hpp"
#include "nilnf/poly.hpp"
#include "nilnf/scalar.hpp"

namespace nilnf {

template <FieldScalar S>
class VectorField {
 public:
  VectorField() = default;
  explicit VectorField(int n) : n_(n), comps_(static_cast<std::size_t>(n), Poly<S>(n)) {}
  explicit VectorField(std::vector<Poly<S>> comps) : n_(static_cast<int>(comps.size())), comps_(std::move(comps)) {
    for (const auto& c : comps_)
      if (c.dim() != n_) throw std::invalid_argument("VectorField: component dimension mismatch");
  }

  // x' = A x.
  static VectorField linear(const Matrix<S>& a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("VectorField::linear: square matrix required");
    int n = static_cast<int>(a.rows());
    VectorField v(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) v.comps_[i].add_term(Multidegree::unit(n, j), a(i, j));
    return v;
  }
  // f * d/dx_i.
  static VectorField single(int i, const Poly<S>& f) {
    VectorField v(f.dim());
    v.comps_.at(static_cast<std::size_t>(i)) = f;
    return v;
  }

  int dim() const { return n_; }
  const Poly<S>& operator[](int i) const { return comps_[static_cast<std::size_t>(i)]; }
  Poly<S>& operator[](int i) { return comps_[static_cast<std::size_t>(i)]; }
  const std::vector<Poly<S>>& components() const { return comps_; }

  bool is_zero() const {
    for (const auto& c : comps_)
      if (!c.is_zero()) return false;
    return true;
  }
  int degree() const {
    int d = -1;
    for (const auto& c : comps_) d = std::max(d, c.degree());
    return d;
  }
  // Lowest degree present (-1 for zero).
  int min_degree() const {
    int d = -1;
    for (const auto& c : comps_)
      if (!c.is_zero()) d = d < 0 ? c.min_degree() : std::min(d, c.min_degree());
    return d;
  }
  Matrix<S> linear_matrix() const {
    Matrix<S> a(static_cast<std::size_t>(n_), static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) a(i, j) = comps_[i].coefficient(Multidegree::unit(n_, j));
    return a;
  }

  VectorField homogeneous_part(int k) const { return map([k](const Poly<S>& p) { return p.homogeneous_part(k); }); }
  VectorField truncate(int k) const { return map([k](const Poly<S>& p) { return p.truncate(k); }); }
  VectorField drop_below(int k) const { return map([k](const Poly<S>& p) { return p.drop_below(k); }); }
  // Terms with lo <= degree <= hi.
  VectorField window(int lo, int hi) const { return truncate(hi).drop_below(lo); }
  VectorField derive(int j) const { return map([j](const Poly<S>& p) { return p.derive(j); }); }

  // The derivation sum V_i df/dx_i.
  Poly<S> apply(const Poly<S>& f) const {
    if (f.dim() != n_) throw std::invalid_argument("VectorField::apply: dimension mismatch");
    Poly<S> r(n_);
    for (int i = 0; i < n_; ++i) {
      if (comps_[i].is_zero()) continue;
      Poly<S> d = f.derive(i);
      if (!d.is_zero()) r += comps_[i] * d;
    }
    return r;
  }
  // Componentwise V(W_i), i.e. DW . V.
  VectorField apply(const VectorField& w) const {
    return w.map([this](const Poly<S>& p) { return apply(p); });
  }

  VectorField operator-() const { return map([](const Poly<S>& p) { return -p; }); }
  VectorField& operator+=(const VectorField& o) {
    check_dim(o);
    for (int i = 0; i < n_; ++i) comps_[i] += o.comps_[i];
    return *this;
  }
  VectorField& operator-=(const VectorField& o) {
    check_dim(o);
    for (int i = 0; i < n_; ++i) comps_[i] -= o.comps_[i];
    return *this;
  }
  VectorField& operator*=(const S& s) {
    for (auto& c : comps_) c *= s;
    return *this;
  }
  friend VectorField operator+(VectorField a, const VectorField& b) { return a += b; }
  friend VectorField operator-(VectorField a, const VectorField& b) { return a -= b; }
  friend VectorField operator*(VectorField a, const S& s) { return a *= s; }
  friend VectorField operator*(const S& s, VectorField a) { return a *= s; }
  friend VectorField operator*(const Poly<S>& f, const VectorField& v) {
    return v.map([&f](const Poly<S>& p) { return f * p; });
  }
  friend bool operator==(const VectorField& a, const VectorField& b) {
    return a.n_ == b.n_ && a.comps_ == b.comps_;
  }

  // Coordinates of the degree-k slice; index = monomial * n + component.
  std::vector<S> coordinates(int k) const {
    std::size_t m = slice_dimension(n_, k);
    std::vector<S> v(m * static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i) {
      auto c = comps_[i].coordinates(k);
      for (std::size_t a = 0; a < m; ++a) v[a * n_ + i] = std::move(c[a]);
    }
    return v;
  }
  static VectorField from_coordinates(int n, int k, const std::vector<S>& v) {
    VectorField r(n);
    const auto& basis = monomial_basis(n, k);
    if (v.size() != basis.size() * static_cast<std::size_t>(n))
      throw std::invalid_argument("VectorField::from_coordinates: size mismatch");
    for (std::size_t idx = 0; idx < v.size(); ++idx)
      r.comps_[idx % n].add_term(basis[idx / n], v[idx]);
    return r;
  }

  template <FieldScalar T, class F>
  VectorField<T> map_coefficients(F&& f) const {
    std::vector<Poly<T>> c;
    for (const auto& p : comps_) c.push_back(p.template map_coefficients<T>(f));
    return VectorField<T>(std::move(c));
  }

  std::string to_string() const {
    auto names = variable_names(n_);
    std::string s;
    for (int i = 0; i < n_; ++i) {
      if (comps_[i].is_zero()) continue;
      if (!s.empty()) s += " + ";
      s += "[" + comps_[i].to_string() + "]*d/d" + names[i];
    }
    return s.empty() ? "0" : s;
  }

 private:
  template <class F>
  VectorField map(F&& f) const {
    VectorField r(n_);
    for (int i = 0; i < n_; ++i) r.comps_[i] = f(comps_[i]);
    return r;
  }
  void check_dim(const VectorField& o) const {
    if (o.n_ != n_) throw std::invalid_argument("VectorField: dimension mismatch");
  }

  int n_ = 0;
  std::vector<Poly<S>> comps_;
};

// [V, W] = DW.V - DV.W, componentwise V(W_i) - W(V_i).
template <FieldScalar S>
VectorField<S> lie_bracket(const VectorField<S>& v, const VectorField<S>& w) {
  if (v.dim() != w.dim()) throw std::invalid_argument("lie_bracket: dimension mismatch");
  return v.apply(w) - w.apply(v);
}

// The derivation sum F_i df/dx_i for a linear field F.
template <FieldScalar S>
Poly<S> act_linear_field(const VectorField<S>& f_lin, const Poly<S>& f) {
  return f_lin.apply(f);
}

// f(g_1, ..., g_n) keeping terms of degree <= order.
template <FieldScalar S>
Poly<S> substitute(const Poly<S>& f, const std::vector<Poly<S>>& g, int order) {
  int n = f.dim();
  if (static_cast<int>(g.size()) != n) throw std::invalid_argument("substitute: arity mismatch");
  int out_dim = g.empty() ? n : g[0].dim();
  // Lowest degree of each g_i bounds which powers can contribute.
  std::vector<std::vector<Poly<S>>> powers(static_cast<std::size_t>(n));
  auto power = [&](int i, int e) -> const Poly<S>& {
    auto& p = powers[i];
    if (p.empty()) p.push_back(Poly<S>::constant(out_dim, ScalarTraits<S>::from_int(1)));
    while (static_cast<int>(p.size()) <= e) p.push_back(Poly<S>::multiply_truncated(p.back(), g[i], order));
    return p[e];
  };
  Poly<S> r(out_dim);
  for (const auto& [m, c] : f.terms()) {
    int low = 0;
    bool vanishes = false;
    for (int i = 0; i < n; ++i) {
      if (m[i] == 0) continue;
      if (g[i].is_zero()) {
        vanishes = true;
        break;
      }
      low += m[i] * g[i].min_degree();
    }
    if (vanishes || low > order) continue;
    Poly<S> t = Poly<S>::constant(out_dim, c);
    for (int i = 0; i < n && !t.is_zero(); ++i)
      if (m[i] > 0) t = Poly<S>::multiply_truncated(t, power(i, m[i]), order);
    r += t;
  }
  return r;
}

// V o (id + U) truncated at order.
template <FieldScalar S>
VectorField<S> compose_with_shift(const VectorField<S>& v, const VectorField<S>& u, int order) {
  int n = v.dim();
  std::vector<Poly<S>> g;
  for (int i = 0; i < n; ++i) g.push_back(Poly<S>::variable(n, i) + u[i]);
  std::vector<Poly<S>> out;
  for (int i = 0; i < n; ++i) out.push_back(substitute(v[i], g, order));
  return VectorField<S>(std::move(out));
}

// J^order of the push-forward of V by (id + U)^{-1}: the field Y solving
// (I + DU) Y = V o (id + U), obtained degree by degree.
template <FieldScalar S>
VectorField<S> conjugate_truncated(const VectorField<S>& v, const VectorField<S>& u, int order) {
  if (v.dim() != u.dim()) throw std::invalid_argument("conjugate_truncated: dimension mismatch");
  if (!u.is_zero() && u.min_degree() < 2)
    throw std::invalid_argument("conjugate_truncated: U must have order >= 2");
  int n = v.dim();
  VectorField<S> p = compose_with_shift(v, u, order);
  int udeg = u.degree();
  std::vector<VectorField<S>> uslices;
  for (int b = 0; b <= udeg; ++b) uslices.push_back(u.homogeneous_part(b));
  std::vector<VectorField<S>> y;
  VectorField<S> result(n);
  for (int k = 0; k <= order; ++k) {
    VectorField<S> yk = p.homogeneous_part(k);
    // (DU.Y)_i = Y(U_i); Y_a applied to U_b lands in degree a + b - 1.
    for (int a = 0; a < k; ++a) {
      int b = k - a + 1;
      if (b > udeg || y[a].is_zero() || uslices[b].is_zero()) continue;
      yk -= y[a].apply(uslices[b]);
    }
    result += yk;
    y.push_back(std::move(yk));
  }
  return result;
}

// (I + DU) Y - V o (id + U), truncated at order; zero iff Y is the
// conjugated field to that order.
template <FieldScalar S>
VectorField<S> conjugacy_residual(const VectorField<S>& v, const VectorField<S>& u, const VectorField<S>& y,
                                  int order) {
  VectorField<S> lhs = y + y.apply(u);
  return (lhs - compose_with_shift(v, u, order)).truncate(order);
}

// (id + U1) o (id + U2) - id truncated at order.
template <FieldScalar S>
VectorField<S> compose_shifts(const VectorField<S>& u1, const VectorField<S>& u2, int order) {
  return (u2 + compose_with_shift(u1, u2, order)).truncate(order);
}

// W with id + W = (id + U)^{-1} truncated at order: the fixed point of
// W = -U o (id + W), each pass fixing at least one more degree.
template <FieldScalar S>
VectorField<S> inverse_shift(const VectorField<S>& u, int order) {
  if (!u.is_zero() && u.min_degree() < 2) throw std::invalid_argument("inverse_shift: U must have order >= 2");
  VectorField<S> w(u.dim());
  if (u.is_zero()) return w;
  // Degree windows drop rounding residue that doubles leave below degree 2.
  VectorField<S> uc = u.window(2, order);
  for (int pass = 1; pass < order; ++pass) w = -compose_with_shift(uc, w, order).window(2, order);
  return w;
}

// J^order of the push-forward (id + U)_* V.
template <FieldScalar S>
VectorField<S> push_forward(const VectorField<S>& v, const VectorField<S>& u, int order) {
  return conjugate_truncated(v, inverse_shift(u, order), order);
}

struct RNorm {
  double value = 0;
  Rational radius;
  // Present when every slice norm and n^(delta/2) r^delta is representable.
  std::optional<RadScalar> exact;
};

namespace detail {

// sum over slices of sqrt(norm2_delta) n^(delta/2) r^delta.
template <FieldScalar S>
RNorm rnorm_from_slices(const std::vector<std::pair<int, S>>& slices, int n, const Rational& r) {
  if (sgn(r) <= 0) throw std::invalid_argument("rnorm: radius must be positive");
  RNorm out;
  out.radius = r;
  double rd = r.get_d();
  long double total = 0;
  std::optional<RadScalar> exact = RadScalar{};
  for (const auto& [delta, n2] : slices) {
    double n2d = ScalarTraits<S>::to_double(n2);
    total += std::sqrt(std::max(0.0L, static_cast<long double>(n2d))) *
             std::pow(static_cast<long double>(n), delta / 2.0L) * std::pow(static_cast<long double>(rd), delta);
    if constexpr (std::is_same_v<S, RadScalar>) {
      if (exact && n2.is_rational()) {
        auto s = RadScalar::sqrt(n2.rational_part());
        if (s) {
          RadScalar term = *s;
          Rational rp = 1;
          for (int i = 0; i < delta; ++i) rp *= r;
          term *= RadScalar(rp);
          RadScalar nn = RadScalar::sqrt(static_cast<std::uint64_t>(n));
          for (int i = 0; i < delta; ++i) term *= nn;
          *exact += term;
        } else {
          exact.reset();
        }
      } else {
        exact.reset();
      }
    } else {
      exact.reset();
    }
  }
  out.value = static_cast<double>(total);
  out.exact = exact;
  return out;
}

}  // namespace detail

// |f|_r = sum_delta ||f_delta|| n^(delta/2) r^delta.
template <FieldScalar S>
RNorm rnorm(const Poly<S>& f, const Rational& r) {
  std::vector<std::pair<int, S>> slices;
  for (int d = std::max(0, f.min_degree()); d <= f.degree(); ++d) {
    S n2 = norm_sq(f.homogeneous_part(d));
    slices.emplace_back(d, n2);
  }
  return detail::rnorm_from_slices(slices, f.dim(), r);
}

// Vector fields: slice norm is sqrt(sum_i ||V_{i,delta}||^2).
template <FieldScalar S>
RNorm rnorm(const VectorField<S>& v, const Rational& r) {
  std::vector<std::pair<int, S>> slices;
  for (int d = std::max(0, v.min_degree()); d <= v.degree(); ++d) {
    S n2{};
    for (int i = 0; i < v.dim(); ++i) n2 += norm_sq(v[i].homogeneous_part(d));
    slices.emplace_back(d, n2);
  }
  return detail::rnorm_from_slices(slices, v.dim(), r);
}

// |DX|_r taken as sum_j |dX/dx_j|_r.
template <FieldScalar S>
double rnorm_jacobian(const VectorField<S>& v, const Rational& r) {
  double s = 0;
  for (int j = 0; j < v.dim(); ++j) s += rnorm(v.derive(j), r).value;
  return s;
}

}  // namespace nilnf
