#pragma once

#include <map>
#include <stdexcept>
#include <type_traits>
#include <string>
#include <utility>
#include <vector>

#include "nilnf/basis.hpp"
#include "nilnf/scalar.hpp"

namespace nilnf {

template <FieldScalar S>
class Poly {
 public:
  using Terms = std::map<Multidegree, S>;

  Poly() = default;
  explicit Poly(int n) : n_(n) {
    if (n < 1 || n > kMaxVariables) throw std::invalid_argument("Poly: dimension out of range 1..8");
  }

  static Poly constant(int n, const S& c) {
    Poly p(n);
    p.add_term(Multidegree(n), c);
    return p;
  }
  static Poly variable(int n, int i) {
    Poly p(n);
    p.add_term(Multidegree::unit(n, i), ScalarTraits<S>::from_int(1));
    return p;
  }
  static Poly monomial(const Multidegree& m, const S& c) {
    Poly p(m.size());
    p.add_term(m, c);
    return p;
  }

  int dim() const { return n_; }
  const Terms& terms() const { return terms_; }
  // Zero up to the scalar backend's zero test (exact, or tolerance for
  // doubles); storage keeps tiny double coefficients.
  bool is_zero() const {
    for (const auto& [m, c] : terms_)
      if (!ScalarTraits<S>::is_zero(c)) return false;
    return true;
  }
  std::size_t size() const { return terms_.size(); }

  // -1 for the zero polynomial.
  int degree() const { return terms_.empty() ? -1 : terms_.rbegin()->first.degree(); }
  int min_degree() const { return terms_.empty() ? -1 : terms_.begin()->first.degree(); }
  bool is_homogeneous(int k) const {
    return terms_.empty() || (min_degree() == k && degree() == k);
  }

  S coefficient(const Multidegree& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? S{} : it->second;
  }

  void add_term(const Multidegree& m, const S& c) {
    if (m.size() != n_) throw std::invalid_argument("Poly: multidegree dimension mismatch");
    if (stored_zero(c)) return;
    auto [it, inserted] = terms_.try_emplace(m, c);
    if (!inserted) {
      it->second += c;
      if (stored_zero(it->second)) terms_.erase(it);
    }
  }

  Poly homogeneous_part(int k) const {
    Poly r(n_);
    for (auto it = terms_.lower_bound(first_of_degree(k)); it != terms_.end() && it->first.degree() == k; ++it)
      r.terms_.insert(*it);
    return r;
  }
  // Terms of degree <= k (the jet J^k).
  Poly truncate(int k) const {
    Poly r(n_);
    if (k < 0) return r;
    auto end = terms_.lower_bound(first_of_degree(k + 1));
    r.terms_.insert(terms_.begin(), end);
    return r;
  }
  // Terms of degree >= k.
  Poly drop_below(int k) const {
    Poly r(n_);
    r.terms_.insert(terms_.lower_bound(first_of_degree(std::max(k, 0))), terms_.end());
    return r;
  }

  Poly derive(int j) const {
    if (j < 0 || j >= n_) throw std::out_of_range("derive: variable index out of range");
    Poly r(n_);
    for (const auto& [m, c] : terms_) {
      int e = m[j];
      if (e == 0) continue;
      Multidegree d = m;
      d.set(j, e - 1);
      r.add_term(d, c * ScalarTraits<S>::from_int(e));
    }
    return r;
  }

  Poly operator-() const {
    Poly r = *this;
    for (auto& [m, c] : r.terms_) c = -c;
    return r;
  }
  Poly& operator+=(const Poly& o) {
    check_dim(o);
    for (const auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
  }
  Poly& operator-=(const Poly& o) {
    check_dim(o);
    for (const auto& [m, c] : o.terms_) add_term(m, -c);
    return *this;
  }
  Poly& operator*=(const S& s) {
    if (stored_zero(s)) {
      terms_.clear();
      return *this;
    }
    for (auto it = terms_.begin(); it != terms_.end();) {
      it->second *= s;
      if (stored_zero(it->second)) {
        it = terms_.erase(it);
      } else {
        ++it;
      }
    }
    return *this;
  }
  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  friend Poly operator*(Poly a, const S& s) { return a *= s; }
  friend Poly operator*(const S& s, Poly a) { return a *= s; }
  friend Poly operator*(const Poly& a, const Poly& b) { return multiply_truncated(a, b, -1); }
  friend bool operator==(const Poly& a, const Poly& b) {
    if (a.terms_.size() != b.terms_.size() || (a.n_ != b.n_ && !a.terms_.empty())) return false;
    auto it = b.terms_.begin();
    for (const auto& [m, c] : a.terms_) {
      if (!(it->first == m) || !(it->second == c)) return false;
      ++it;
    }
    return true;
  }

  // Product keeping terms of degree <= max_degree (all terms when negative).
  static Poly multiply_truncated(const Poly& a, const Poly& b, int max_degree) {
    a.check_dim(b);
    Poly r(a.n_);
    for (const auto& [ma, ca] : a.terms_) {
      if (max_degree >= 0 && ma.degree() > max_degree) break;
      for (const auto& [mb, cb] : b.terms_) {
        if (max_degree >= 0 && ma.degree() + mb.degree() > max_degree) break;
        r.add_term(ma + mb, ca * cb);
      }
    }
    return r;
  }

  // Evaluate at a point in double precision.
  double evaluate(const std::vector<double>& x) const {
    double s = 0;
    for (const auto& [m, c] : terms_) {
      double t = ScalarTraits<S>::to_double(c);
      for (int i = 0; i < n_; ++i)
        for (int e = 0; e < m[i]; ++e) t *= x[static_cast<std::size_t>(i)];
      s += t;
    }
    return s;
  }

  template <FieldScalar T, class F>
  Poly<T> map_coefficients(F&& f) const {
    Poly<T> r(n_);
    for (const auto& [m, c] : terms_) r.add_term(m, f(c));
    return r;
  }

  std::string to_string() const {
    if (terms_.empty()) return "0";
    auto names = variable_names(n_);
    std::string s;
    for (const auto& [m, c] : terms_) {
      if (!s.empty()) s += " + ";
      s += "(" + scalar_string(c) + ")";
      if (m.degree() > 0) s += "*" + m.to_string(names);
    }
    return s;
  }

  // Dense coordinates of the degree-k slice in monomial_basis order.
  std::vector<S> coordinates(int k) const {
    std::vector<S> v(slice_dimension(n_, k));
    for (auto it = terms_.lower_bound(first_of_degree(k)); it != terms_.end() && it->first.degree() == k; ++it)
      v[monomial_index(it->first)] = it->second;
    return v;
  }
  static Poly from_coordinates(int n, int k, const std::vector<S>& v) {
    Poly p(n);
    const auto& basis = monomial_basis(n, k);
    for (std::size_t i = 0; i < v.size(); ++i) p.add_term(basis[i], v[i]);
    return p;
  }

 private:
  // Storage drops exact zeros only; tolerance tests are left to callers.
  static bool stored_zero(const S& c) {
    if constexpr (std::is_same_v<S, double>) {
      return c == 0.0;
    } else {
      return ScalarTraits<S>::is_zero(c);
    }
  }
  static std::string scalar_string(const S& c) {
    if constexpr (std::is_same_v<S, double>) {
      return std::to_string(c);
    } else {
      return c.to_string();
    }
  }
  Multidegree first_of_degree(int k) const {
    Multidegree m(n_);
    if (k > 0) m.set(0, k);
    return m;
  }
  void check_dim(const Poly& o) const {
    if (o.n_ != n_) throw std::invalid_argument("Poly: dimension mismatch");
  }

  int n_ = 1;
  Terms terms_;
};

// Raw Fischer product sum a_alpha c_alpha alpha! on degree-delta slices.
template <FieldScalar S>
S fischer_inner(const Poly<S>& f, const Poly<S>& g, int delta) {
  if (f.dim() != g.dim()) throw std::invalid_argument("fischer_inner: dimension mismatch");
  if (!f.is_homogeneous(delta) || !g.is_homogeneous(delta))
    throw std::invalid_argument("fischer_inner: inputs must be homogeneous of the given degree");
  S s{};
  for (const auto& [m, c] : f.terms()) {
    auto it = g.terms().find(m);
    if (it == g.terms().end()) continue;
    s += c * it->second * ScalarTraits<S>::from_rational(Rational(m.factorial()));
  }
  return s;
}

// Normalized product sum a_alpha c_alpha alpha!/|alpha|!.
template <FieldScalar S>
S normalized_inner(const Poly<S>& f, const Poly<S>& g, int delta) {
  if (f.dim() != g.dim()) throw std::invalid_argument("normalized_inner: dimension mismatch");
  if (!f.is_homogeneous(delta) || !g.is_homogeneous(delta))
    throw std::invalid_argument("normalized_inner: inputs must be homogeneous of the given degree");
  S s{};
  for (const auto& [m, c] : f.terms()) {
    auto it = g.terms().find(m);
    if (it == g.terms().end()) continue;
    s += c * it->second * ScalarTraits<S>::from_rational(m.weight());
  }
  return s;
}

// Full-series squared norm: sum of normalized slice products.
template <FieldScalar S>
S norm_sq(const Poly<S>& f) {
  S s{};
  for (const auto& [m, c] : f.terms()) s += c * c * ScalarTraits<S>::from_rational(m.weight());
  return s;
}

}  // namespace nilnf
