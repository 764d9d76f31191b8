#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "nilnf/scalar.hpp"

namespace nilnf {

inline constexpr int kMaxVariables = 8;

// Exponent vector x^alpha. Ordered by total degree, then lexicographically
// with larger leading exponents first (graded-lex: x^2 < xy < y^2 in the
// ordering, i.e. x^2 is enumerated first).
class Multidegree {
 public:
  Multidegree() = default;
  explicit Multidegree(int n) : n_(static_cast<std::uint8_t>(n)) {
    if (n < 0 || n > kMaxVariables) throw std::invalid_argument("dimension out of range 0..8");
  }
  Multidegree(std::initializer_list<int> exps) : Multidegree(static_cast<int>(exps.size())) {
    int i = 0;
    for (int e : exps) set(i++, e);
  }
  static Multidegree from_vector(const std::vector<int>& exps) {
    Multidegree m(static_cast<int>(exps.size()));
    for (std::size_t i = 0; i < exps.size(); ++i) m.set(static_cast<int>(i), exps[i]);
    return m;
  }
  static Multidegree unit(int n, int i) {
    Multidegree m(n);
    m.set(i, 1);
    return m;
  }

  int size() const { return n_; }
  int degree() const { return degree_; }
  int operator[](int i) const { return e_[static_cast<std::size_t>(i)]; }
  void set(int i, int v) {
    if (i < 0 || i >= n_) throw std::out_of_range("variable index out of range");
    if (v < 0 || v > 255) throw std::out_of_range("exponent out of range 0..255");
    degree_ = static_cast<std::uint16_t>(degree_ - e_[static_cast<std::size_t>(i)] + v);
    e_[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(v);
  }
  std::vector<int> to_vector() const { return {e_.begin(), e_.begin() + n_}; }

  Multidegree operator+(const Multidegree& o) const {
    Multidegree r = *this;
    for (int i = 0; i < n_; ++i) r.set(i, (*this)[i] + o[i]);
    return r;
  }
  // alpha! as an integer.
  Integer factorial() const {
    Integer r = 1;
    for (int i = 0; i < n_; ++i) r *= nilnf::factorial(static_cast<unsigned>(e_[static_cast<std::size_t>(i)]));
    return r;
  }
  // alpha!/|alpha|!, the normalized Fischer weight.
  Rational weight() const {
    Rational w(factorial(), nilnf::factorial(degree_));
    w.canonicalize();
    return w;
  }

  friend bool operator==(const Multidegree& a, const Multidegree& b) {
    return a.n_ == b.n_ && a.e_ == b.e_;
  }
  friend bool operator<(const Multidegree& a, const Multidegree& b) {
    if (a.degree_ != b.degree_) return a.degree_ < b.degree_;
    return a.e_ > b.e_;
  }

  std::string to_string(const std::vector<std::string>& names) const;

 private:
  std::array<std::uint8_t, kMaxVariables> e_{};
  std::uint8_t n_ = 0;
  std::uint16_t degree_ = 0;
};

// Variable names: x, y, z, w for n <= 4, else x1..xn.
std::vector<std::string> variable_names(int n);

// All monomials of degree k in n variables, sorted.
const std::vector<Multidegree>& monomial_basis(int n, int k);
std::size_t monomial_index(const Multidegree& m);
std::size_t slice_dimension(int n, int k);

// Coordinates of a homogeneous slice: polynomials (index = monomial) or
// vector fields (index = monomial * n + component, component-minor).
struct SliceBasis {
  enum class Kind { Polynomials, VectorFields };
  Kind kind = Kind::VectorFields;
  int n = 0;
  int degree = 0;

  std::size_t dim() const {
    std::size_t m = monomial_basis(n, degree).size();
    return kind == Kind::Polynomials ? m : m * static_cast<std::size_t>(n);
  }
  const Multidegree& monomial(std::size_t idx) const {
    return monomial_basis(n, degree)[kind == Kind::Polynomials ? idx : idx / static_cast<std::size_t>(n)];
  }
  int component(std::size_t idx) const {
    return kind == Kind::Polynomials ? 0 : static_cast<int>(idx % static_cast<std::size_t>(n));
  }
  std::size_t index(const Multidegree& m, int comp) const {
    std::size_t mi = monomial_index(m);
    return kind == Kind::Polynomials ? mi : mi * static_cast<std::size_t>(n) + static_cast<std::size_t>(comp);
  }
  // Normalized Fischer weight of a coordinate direction.
  Rational weight(std::size_t idx) const { return monomial(idx).weight(); }
};

}  // namespace nilnf
