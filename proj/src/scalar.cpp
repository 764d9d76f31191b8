#include "nilnf/scalar.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <ostream>
#include <sstream>

namespace nilnf {

namespace {

std::atomic<double> g_float_tolerance{1e-9};

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
  if (p > UINT64_MAX) throw std::overflow_error("radicand product overflows 64 bits");
  return static_cast<std::uint64_t>(p);
}

std::uint64_t gcd_u64(std::uint64_t a, std::uint64_t b) {
  while (b != 0) {
    std::uint64_t t = a % b;
    a = b;
    b = t;
  }
  return a;
}

std::uint64_t largest_prime_factor(std::uint64_t n) {
  std::uint64_t best = 1;
  for (std::uint64_t p = 2; p * p <= n; ++p) {
    while (n % p == 0) {
      best = p;
      n /= p;
    }
  }
  return n > 1 ? n : best;
}

// Merge-normalize: sort by radicand, combine, drop zeros.
void normalize(std::vector<RadScalar::Term>& terms) {
  std::sort(terms.begin(), terms.end(),
            [](const RadScalar::Term& a, const RadScalar::Term& b) { return a.radicand < b.radicand; });
  std::vector<RadScalar::Term> out;
  out.reserve(terms.size());
  for (auto& t : terms) {
    if (!out.empty() && out.back().radicand == t.radicand) {
      out.back().coeff += t.coeff;
    } else {
      out.push_back(std::move(t));
    }
  }
  std::erase_if(out, [](const RadScalar::Term& t) { return sgn(t.coeff) == 0; });
  terms = std::move(out);
}

}  // namespace

RadicalForm reduce_radical(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("reduce_radical: n must be >= 1");
  RadicalForm r{1, 1};
  for (std::uint64_t p = 2; p * p <= n; ++p) {
    unsigned mult = 0;
    while (n % p == 0) {
      n /= p;
      ++mult;
    }
    for (unsigned i = 0; i < mult / 2; ++i) r.factor *= p;
    if (mult % 2 == 1) r.radicand *= p;
  }
  r.radicand *= n;
  return r;
}

RadScalar::RadScalar(const Rational& q) {
  if (sgn(q) == 0) return;
  Rational c = q;
  c.canonicalize();
  terms_.push_back({1, c});
}

RadScalar RadScalar::sqrt(std::uint64_t n) {
  if (n == 0) return {};
  auto [d, k] = reduce_radical(n);
  RadScalar r;
  r.terms_.push_back({d, Rational(static_cast<unsigned long>(k))});
  return r;
}

std::optional<RadScalar> RadScalar::sqrt(const Rational& q) {
  if (sgn(q) < 0) return std::nullopt;
  if (sgn(q) == 0) return RadScalar{};
  // sqrt(a/b) = sqrt(a*b)/b
  constexpr unsigned long kTrialBound = 100000;
  Integer rest = q.get_num() * q.get_den();
  Integer square = 1;
  Integer radicand = 1;
  for (unsigned long p = 2; p < kTrialBound; ++p) {
    if (Integer(p) * p > rest) break;
    unsigned mult = 0;
    while (mpz_divisible_ui_p(rest.get_mpz_t(), p)) {
      rest /= p;
      ++mult;
    }
    for (unsigned i = 0; i < mult / 2; ++i) square *= p;
    if (mult % 2 == 1) radicand *= p;
  }
  if (rest > 1) {
    if (mpz_perfect_square_p(rest.get_mpz_t())) {
      Integer s;
      mpz_sqrt(s.get_mpz_t(), rest.get_mpz_t());
      square *= s;
    } else if (rest < Integer(kTrialBound) * kTrialBound) {
      radicand *= rest;  // prime, since every factor below the bound is gone
    } else {
      return std::nullopt;
    }
  }
  if (!radicand.fits_ulong_p()) return std::nullopt;
  RadScalar r;
  Rational c(square, q.get_den());
  c.canonicalize();
  r.terms_.push_back({radicand.get_ui(), c});
  return r;
}

RadScalar RadScalar::from_terms(std::vector<Term> terms) {
  std::vector<Term> reduced;
  reduced.reserve(terms.size());
  for (auto& t : terms) {
    if (t.radicand == 0) continue;
    auto [d, k] = reduce_radical(t.radicand);
    reduced.push_back({d, t.coeff * static_cast<unsigned long>(k)});
  }
  normalize(reduced);
  RadScalar r;
  r.terms_ = std::move(reduced);
  return r;
}

bool RadScalar::is_rational() const {
  return terms_.empty() || (terms_.size() == 1 && terms_[0].radicand == 1);
}

Rational RadScalar::rational_part() const { return coefficient(1); }

Rational RadScalar::coefficient(std::uint64_t radicand) const {
  for (const auto& t : terms_)
    if (t.radicand == radicand) return t.coeff;
  return Rational(0);
}

RadScalar RadScalar::operator-() const {
  RadScalar r = *this;
  for (auto& t : r.terms_) t.coeff = -t.coeff;
  return r;
}

RadScalar& RadScalar::operator+=(const RadScalar& o) {
  if (o.terms_.empty()) return *this;
  if (terms_.empty()) return *this = o;
  std::vector<Term> out;
  out.reserve(terms_.size() + o.terms_.size());
  std::size_t i = 0, j = 0;
  while (i < terms_.size() || j < o.terms_.size()) {
    if (j == o.terms_.size() || (i < terms_.size() && terms_[i].radicand < o.terms_[j].radicand)) {
      out.push_back(std::move(terms_[i++]));
    } else if (i == terms_.size() || o.terms_[j].radicand < terms_[i].radicand) {
      out.push_back(o.terms_[j++]);
    } else {
      Rational s = terms_[i].coeff + o.terms_[j].coeff;
      if (sgn(s) != 0) out.push_back({terms_[i].radicand, std::move(s)});
      ++i;
      ++j;
    }
  }
  terms_ = std::move(out);
  return *this;
}

RadScalar& RadScalar::operator-=(const RadScalar& o) { return *this += -o; }

RadScalar operator*(const RadScalar& a, const RadScalar& b) {
  if (a.terms_.empty() || b.terms_.empty()) return {};
  if (a.terms_.size() == 1 && b.terms_.size() == 1 && a.terms_[0].radicand == 1 &&
      b.terms_[0].radicand == 1) {
    RadScalar r;
    r.terms_.push_back({1, a.terms_[0].coeff * b.terms_[0].coeff});
    return r;
  }
  std::vector<RadScalar::Term> out;
  out.reserve(a.terms_.size() * b.terms_.size());
  for (const auto& s : a.terms_) {
    for (const auto& t : b.terms_) {
      // sqrt(s)*sqrt(t) = g*sqrt((s/g)*(t/g)) for square-free s, t.
      std::uint64_t g = gcd_u64(s.radicand, t.radicand);
      std::uint64_t rad = checked_mul(s.radicand / g, t.radicand / g);
      Rational c = s.coeff * t.coeff;
      if (g != 1) c *= static_cast<unsigned long>(g);
      out.push_back({rad, std::move(c)});
    }
  }
  normalize(out);
  RadScalar r;
  r.terms_ = std::move(out);
  return r;
}

RadScalar& RadScalar::operator*=(const RadScalar& o) { return *this = *this * o; }
RadScalar& RadScalar::operator/=(const RadScalar& o) { return *this = *this * o.inverse(); }

bool operator==(const RadScalar& a, const RadScalar& b) {
  if (a.terms_.size() != b.terms_.size()) return false;
  for (std::size_t i = 0; i < a.terms_.size(); ++i) {
    if (a.terms_[i].radicand != b.terms_[i].radicand || a.terms_[i].coeff != b.terms_[i].coeff)
      return false;
  }
  return true;
}

// Rationalize one prime at a time: with p the largest prime dividing a
// radicand, x = u + v*sqrt(p) and x * (u - v*sqrt(p)) = u^2 - p*v^2 has no
// radicand divisible by p.
RadScalar RadScalar::inverse() const {
  if (terms_.empty()) throw DivisionByZero("RadScalar: inverse of zero");
  if (is_rational()) return RadScalar(1 / terms_[0].coeff);
  std::uint64_t p = 1;
  for (const auto& t : terms_) p = std::max(p, largest_prime_factor(t.radicand));
  RadScalar conj = *this;
  for (auto& t : conj.terms_)
    if (t.radicand % p == 0) t.coeff = -t.coeff;
  RadScalar norm = *this * conj;
  return conj * norm.inverse();
}

double RadScalar::to_double() const {
  long double s = 0;
  for (const auto& t : terms_)
    s += static_cast<long double>(t.coeff.get_d()) * std::sqrt(static_cast<long double>(t.radicand));
  return static_cast<double>(s);
}

std::string RadScalar::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& t : terms_) {
    if (!first) os << (sgn(t.coeff) < 0 ? " - " : " + ");
    Rational c = first ? t.coeff : abs(t.coeff);
    if (t.radicand == 1) {
      os << c.get_str();
    } else if (c == 1) {
      os << "sqrt(" << t.radicand << ")";
    } else if (c == -1) {
      os << "-sqrt(" << t.radicand << ")";
    } else {
      os << c.get_str() << "*sqrt(" << t.radicand << ")";
    }
    first = false;
  }
  return os.str();
}

std::ostream& operator<<(std::ostream& os, const RadScalar& x) { return os << x.to_string(); }

double float_tolerance() { return g_float_tolerance.load(std::memory_order_relaxed); }

void set_float_tolerance(double tol) {
  if (!(tol > 0)) throw std::invalid_argument("float tolerance must be positive");
  g_float_tolerance.store(tol, std::memory_order_relaxed);
}

double ScalarTraits<double>::sqrt_int(std::uint64_t n) { return std::sqrt(static_cast<double>(n)); }
bool ScalarTraits<double>::is_zero(double x) { return std::fabs(x) <= float_tolerance(); }
double ScalarTraits<double>::inverse(double x) {
  if (x == 0.0) throw DivisionByZero("inverse of zero");
  return 1.0 / x;
}

Integer factorial(unsigned k) {
  static std::mutex mu;
  static std::vector<Integer> table{Integer(1)};
  std::lock_guard lock(mu);
  while (table.size() <= k) table.push_back(table.back() * static_cast<unsigned long>(table.size()));
  return table[k];
}

}  // namespace nilnf
