#pragma once

#include <gmpxx.h>

#include <concepts>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace nilnf {

using Integer = mpz_class;
using Rational = mpq_class;

class DivisionByZero : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// n = factor^2 * radicand with radicand square-free.
struct RadicalForm {
  std::uint64_t radicand = 1;
  std::uint64_t factor = 1;
  friend bool operator==(const RadicalForm&, const RadicalForm&) = default;
};

RadicalForm reduce_radical(std::uint64_t n);

// Element of Q(sqrt(d1), sqrt(d2), ...): a finite sum of q_d * sqrt(d) over
// square-free radicands d, radicand 1 being the rational part. Terms are kept
// sorted by radicand with no zero coefficients.
class RadScalar {
 public:
  struct Term {
    std::uint64_t radicand;
    Rational coeff;
  };

  RadScalar() = default;
  RadScalar(int v) : RadScalar(Rational(v)) {}
  RadScalar(long v) : RadScalar(Rational(v)) {}
  RadScalar(const Rational& q);

  // Exact sqrt(n).
  static RadScalar sqrt(std::uint64_t n);
  // Exact sqrt(q) when the square-free part of num*den can be found by trial
  // division; nullopt otherwise or when q < 0.
  static std::optional<RadScalar> sqrt(const Rational& q);
  static RadScalar from_terms(std::vector<Term> terms);

  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_rational() const;
  Rational rational_part() const;
  // Coefficient of sqrt(radicand).
  Rational coefficient(std::uint64_t radicand) const;

  RadScalar inverse() const;
  double to_double() const;
  std::string to_string() const;

  RadScalar operator-() const;
  RadScalar& operator+=(const RadScalar& o);
  RadScalar& operator-=(const RadScalar& o);
  RadScalar& operator*=(const RadScalar& o);
  RadScalar& operator/=(const RadScalar& o);

  friend RadScalar operator+(RadScalar a, const RadScalar& b) { return a += b; }
  friend RadScalar operator-(RadScalar a, const RadScalar& b) { return a -= b; }
  friend RadScalar operator*(const RadScalar& a, const RadScalar& b);
  friend RadScalar operator/(const RadScalar& a, const RadScalar& b) { return a * b.inverse(); }
  friend bool operator==(const RadScalar& a, const RadScalar& b);

 private:
  std::vector<Term> terms_;
};

std::ostream& operator<<(std::ostream& os, const RadScalar& x);

// Tolerance used by the binary64 backend for zero tests; default 1e-9.
double float_tolerance();
void set_float_tolerance(double tol);

template <class S>
struct ScalarTraits;

template <>
struct ScalarTraits<RadScalar> {
  static constexpr bool exact = true;
  static constexpr const char* name = "exact";
  static RadScalar from_rational(const Rational& q) { return RadScalar(q); }
  static RadScalar from_int(long v) { return RadScalar(v); }
  static RadScalar sqrt_int(std::uint64_t n) { return RadScalar::sqrt(n); }
  static bool is_zero(const RadScalar& x) { return x.is_zero(); }
  static double to_double(const RadScalar& x) { return x.to_double(); }
  static RadScalar inverse(const RadScalar& x) { return x.inverse(); }
};

template <>
struct ScalarTraits<double> {
  static constexpr bool exact = false;
  static constexpr const char* name = "float";
  static double from_rational(const Rational& q) { return q.get_d(); }
  static double from_int(long v) { return static_cast<double>(v); }
  static double sqrt_int(std::uint64_t n);
  static bool is_zero(double x);
  static double to_double(double x) { return x; }
  static double inverse(double x);
};

template <class S>
concept FieldScalar = requires(const S& a, const S& b) {
  { a + b } -> std::convertible_to<S>;
  { a - b } -> std::convertible_to<S>;
  { a * b } -> std::convertible_to<S>;
  { -a } -> std::convertible_to<S>;
  { ScalarTraits<S>::is_zero(a) } -> std::same_as<bool>;
  { ScalarTraits<S>::from_int(1L) } -> std::convertible_to<S>;
};

template <FieldScalar S>
bool is_zero(const S& x) {
  return ScalarTraits<S>::is_zero(x);
}

template <FieldScalar S>
double to_double(const S& x) {
  return ScalarTraits<S>::to_double(x);
}

template <FieldScalar S>
S inverse(const S& x) {
  return ScalarTraits<S>::inverse(x);
}

template <FieldScalar S>
S from_rational(const Rational& q) {
  return ScalarTraits<S>::from_rational(q);
}

Integer factorial(unsigned k);

}  // namespace nilnf
