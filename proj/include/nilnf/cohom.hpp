#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nilnf/linalg.hpp"
#include "nilnf/numerics.hpp"
#include "nilnf/parallel.hpp"
#include "nilnf/sl2.hpp"
#include "nilnf/vfield.hpp"

namespace nilnf {

template <FieldScalar S>
VectorField<S> apply_d0(const Sl2Triple<S>& t, const VectorField<S>& u) {
  return lie_bracket(t.N, u);
}

template <FieldScalar S>
VectorField<S> apply_d0_star(const Sl2Triple<S>& t, const VectorField<S>& u) {
  return lie_bracket(t.Nstar, u);
}

// a(m) = m(weight - m + 1), the box eigenvalue on v_m.
inline long box_eigenvalue(int weight, int m) { return static_cast<long>(m) * (weight - m + 1); }

template <FieldScalar S>
struct SplitVector {
  VectorField<S> im_part;
  VectorField<S> ker_part;
};

// Degree window [lo, hi] of homogeneous vector fields with the chain
// decompositions of each slice.
template <FieldScalar S>
class Window {
 public:
  struct ImDirection {
    int degree;
    std::size_t chain;
    int m;  // >= 1
  };

  Window(const Sl2Triple<S>& t, int lo, int hi, Exec exec = default_exec()) : triple_(&t), lo_(lo), hi_(hi) {
    if (lo < 1 || hi < lo) throw std::invalid_argument("Window: need 1 <= lo <= hi");
    slices_.resize(static_cast<std::size_t>(hi - lo + 1));
    parallel_for(hi - lo + 1, exec, [&](long i) {
      slices_[static_cast<std::size_t>(i)] = decompose(t, SliceBasis::Kind::VectorFields, lo + static_cast<int>(i));
    });
    for (int k = lo; k <= hi; ++k) {
      const auto& dec = slice(k);
      for (std::size_t c = 0; c < dec.chains.size(); ++c)
        for (int m = 1; m <= dec.chains[c].weight; ++m) im_basis_.push_back({k, c, m});
    }
  }

  const Sl2Triple<S>& triple() const { return *triple_; }
  int lo() const { return lo_; }
  int hi() const { return hi_; }
  const ChainDecomposition<S>& slice(int k) const { return *slices_.at(static_cast<std::size_t>(k - lo_)); }
  const std::vector<ImDirection>& im_basis() const { return im_basis_; }
  std::size_t dim() const {
    std::size_t d = 0;
    for (int k = lo_; k <= hi_; ++k) d += slice(k).dim();
    return d;
  }

  bool contains(const VectorField<S>& v) const {
    return v.is_zero() || (v.min_degree() >= lo_ && v.degree() <= hi_);
  }
  void require_contains(const VectorField<S>& v, const char* what) const {
    if (!contains(v))
      throw PreconditionError(std::string(what) + ": field not supported in degree window [" + std::to_string(lo_) +
                              ", " + std::to_string(hi_) + "]");
  }

  // Orthogonal split into Im(box) and Ker(box) = span of primitive vectors.
  SplitVector<S> project(const VectorField<S>& w) const {
    require_contains(w, "project");
    int n = triple_->dim();
    VectorField<S> ker(n);
    for (int k = lo_; k <= hi_; ++k) {
      const auto& dec = slice(k);
      auto coords = w.coordinates(k);
      if (vector_is_zero(coords)) continue;
      std::vector<S> kc(coords.size());
      for (const auto& c : dec.chains) {
        S coef = dec.ops.inner(coords, c.vectors[0]) * ScalarTraits<S>::inverse(c.norm_sq[0]);
        if (!ScalarTraits<S>::is_zero(coef)) kc = axpy(kc, coef, c.vectors[0]);
      }
      ker += VectorField<S>::from_coordinates(n, k, kc);
    }
    return {w - ker, ker};
  }

  // Component in Ker(d0) = span of the chain ends v_weight.
  VectorField<S> ker_d0_part(const VectorField<S>& w) const {
    require_contains(w, "ker_d0_part");
    int n = triple_->dim();
    VectorField<S> out(n);
    for (int k = lo_; k <= hi_; ++k) {
      const auto& dec = slice(k);
      auto coords = w.coordinates(k);
      if (vector_is_zero(coords)) continue;
      std::vector<S> acc(coords.size());
      for (const auto& c : dec.chains) {
        S coef = dec.ops.inner(coords, c.vectors[c.weight]) * ScalarTraits<S>::inverse(c.norm_sq[c.weight]);
        if (!ScalarTraits<S>::is_zero(coef)) acc = axpy(acc, coef, c.vectors[c.weight]);
      }
      out += VectorField<S>::from_coordinates(n, k, acc);
    }
    return out;
  }

  // V in Im(box) with box V = Z; chain coefficients divided by a(m).
  VectorField<S> box_solve(const VectorField<S>& z) const {
    require_contains(z, "box_solve");
    int n = triple_->dim();
    VectorField<S> out(n);
    for (int k = lo_; k <= hi_; ++k) {
      const auto& dec = slice(k);
      auto coords = z.coordinates(k);
      if (vector_is_zero(coords)) continue;
      std::vector<S> sol(coords.size());
      double scale = 0;
      if constexpr (!ScalarTraits<S>::exact)
        for (const auto& x : coords) scale = std::max(scale, std::fabs(ScalarTraits<S>::to_double(x)));
      for (const auto& c : dec.chains) {
        auto coef = dec.chain_coefficients(static_cast<std::size_t>(&c - dec.chains.data()), coords);
        bool kernel_hit;
        if constexpr (ScalarTraits<S>::exact) {
          kernel_hit = !ScalarTraits<S>::is_zero(coef[0]);
        } else {
          kernel_hit = std::fabs(coef[0]) * std::sqrt(std::fabs(c.norm_sq[0])) > float_tolerance() * std::max(1.0, scale);
        }
        if (kernel_hit) throw PreconditionError("box_solve: right-hand side has a component in Ker(box)");
        for (int m = 1; m <= c.weight; ++m) {
          if (ScalarTraits<S>::is_zero(coef[m])) continue;
          S x = coef[m] * ScalarTraits<S>::from_rational(Rational(1, box_eigenvalue(c.weight, m)));
          sol = axpy(sol, x, c.vectors[m]);
        }
      }
      out += VectorField<S>::from_coordinates(n, k, sol);
    }
    return out;
  }

  VectorField<S> box_apply(const VectorField<S>& v) const {
    return apply_d0(*triple_, apply_d0_star(*triple_, v));
  }

  // Coefficients on the Im(box) chain directions v_m (m >= 1), in
  // im_basis() order; the Ker component is ignored.
  std::vector<S> im_coordinates(const VectorField<S>& v) const {
    require_contains(v, "im_coordinates");
    std::vector<S> out;
    out.reserve(im_basis_.size());
    int last_degree = -1;
    std::size_t last_chain = static_cast<std::size_t>(-1);
    std::vector<S> coords, coef;
    for (const auto& d : im_basis_) {
      if (d.degree != last_degree) {
        coords = v.coordinates(d.degree);
        last_degree = d.degree;
        last_chain = static_cast<std::size_t>(-1);
      }
      if (d.chain != last_chain) {
        coef = slice(d.degree).chain_coefficients(d.chain, coords);
        last_chain = d.chain;
      }
      out.push_back(coef[d.m]);
    }
    return out;
  }
  VectorField<S> from_im_coordinates(const std::vector<S>& c) const {
    int n = triple_->dim();
    VectorField<S> out(n);
    for (int k = lo_; k <= hi_; ++k) {
      std::vector<S> acc(slice(k).dim());
      bool any = false;
      for (std::size_t i = 0; i < im_basis_.size(); ++i) {
        const auto& d = im_basis_[i];
        if (d.degree != k || ScalarTraits<S>::is_zero(c[i])) continue;
        acc = axpy(acc, c[i], slice(k).chains[d.chain].vectors[d.m]);
        any = true;
      }
      if (any) out += VectorField<S>::from_coordinates(n, k, acc);
    }
    return out;
  }
  VectorField<S> im_basis_vector(std::size_t i) const {
    const auto& d = im_basis_[i];
    return VectorField<S>::from_coordinates(triple_->dim(), d.degree, slice(d.degree).chains[d.chain].vectors[d.m]);
  }
  S im_basis_norm_sq(std::size_t i) const {
    const auto& d = im_basis_[i];
    return slice(d.degree).chains[d.chain].norm_sq[d.m];
  }

  // Matrix of a linear map Im(box) -> window in im coordinates.
  Matrix<S> im_matrix(const std::function<VectorField<S>(const VectorField<S>&)>& op) const {
    std::size_t d = im_basis_.size();
    Matrix<S> m(d, d);
    for (std::size_t j = 0; j < d; ++j) m.set_column(j, im_coordinates(op(im_basis_vector(j))));
    return m;
  }

  // Full window in monomial coordinates (degree blocks concatenated).
  std::vector<S> window_coordinates(const VectorField<S>& v) const {
    std::vector<S> out;
    for (int k = lo_; k <= hi_; ++k) {
      auto c = v.coordinates(k);
      out.insert(out.end(), c.begin(), c.end());
    }
    return out;
  }
  VectorField<S> from_window_coordinates(const std::vector<S>& c) const {
    int n = triple_->dim();
    VectorField<S> out(n);
    std::size_t off = 0;
    for (int k = lo_; k <= hi_; ++k) {
      std::size_t d = slice(k).dim();
      out += VectorField<S>::from_coordinates(n, k, std::vector<S>(c.begin() + off, c.begin() + off + d));
      off += d;
    }
    return out;
  }
  Matrix<S> window_matrix(const std::function<VectorField<S>(const VectorField<S>&)>& op) const {
    std::size_t d = dim();
    Matrix<S> m(d, d);
    std::vector<S> e(d);
    for (std::size_t j = 0; j < d; ++j) {
      e.assign(d, S{});
      e[j] = ScalarTraits<S>::from_int(1);
      m.set_column(j, window_coordinates(op(from_window_coordinates(e))));
    }
    return m;
  }

 private:
  const Sl2Triple<S>* triple_;
  int lo_, hi_;
  std::vector<std::shared_ptr<const ChainDecomposition<S>>> slices_;
  std::vector<ImDirection> im_basis_;
};

template <FieldScalar S>
bool is_joint_invariant(const Sl2Triple<S>& t, const Poly<S>& f) {
  return t.N.apply(f).is_zero() && t.Nstar.apply(f).is_zero();
}

template <FieldScalar S>
struct WindowSolution {
  VectorField<S> U;  // d0*(V)
  VectorField<S> V;  // in Im(box)
  // Number of nonzero terms of the terminating Neumann series.
  int neumann_terms = 0;
  // pi_Im J^hi [N + G, U] - Z; identically zero on success.
  VectorField<S> residual;
};

// Solves pi_Im J^hi([N + G, d0*(V)]) = Z on the window, with G of order
// >= 2 at the origin: V = sum_l (-T)^l box^-1 Z where
// T = box^-1 pi_Im J^hi [G, d0*(.)] raises degree, hence is nilpotent.
template <FieldScalar S>
WindowSolution<S> solve_window(const Window<S>& w, const VectorField<S>& g, const VectorField<S>& z) {
  const auto& t = w.triple();
  if (!g.is_zero() && g.min_degree() < 2) throw PreconditionError("solve_window: G must have order >= 2");
  w.require_contains(z, "solve_window");
  auto split = w.project(z);
  bool ker_nonzero;
  if constexpr (ScalarTraits<S>::exact) {
    ker_nonzero = !split.ker_part.is_zero();
  } else {
    ker_nonzero = rnorm(split.ker_part, Rational(1)).value > float_tolerance() * std::max(1.0, rnorm(z, Rational(1)).value);
  }
  if (ker_nonzero) throw PreconditionError("solve_window: Z has a component in Ker(box)");
  auto T = [&](const VectorField<S>& v) {
    VectorField<S> b = lie_bracket(g, apply_d0_star(t, v)).truncate(w.hi());
    return w.box_solve(w.project(b).im_part);
  };
  WindowSolution<S> sol;
  VectorField<S> term = w.box_solve(split.im_part);
  sol.V = term;
  int max_terms = w.hi() - w.lo() + 2;
  while (!term.is_zero()) {
    ++sol.neumann_terms;
    if (sol.neumann_terms > max_terms) throw VerificationError("solve_window: Neumann series did not terminate");
    term = -T(term);
    if constexpr (!ScalarTraits<S>::exact) {
      if (rnorm(term, Rational(1)).value <= float_tolerance()) break;
    }
    sol.V += term;
  }
  sol.U = apply_d0_star(t, sol.V);
  VectorField<S> lhs = lie_bracket(t.N + g, sol.U).truncate(w.hi());
  sol.residual = w.project(lhs).im_part - split.im_part;
  return sol;
}

// The iterated cohomological equation for the normal form N + f N*:
// f must be a joint invariant of N and N*, f(0) = 0, deg f <= m - 1, and Z
// lies in Im(box) on the window [m+1, 2m].
template <FieldScalar S>
WindowSolution<S> iterated_solve(const Sl2Triple<S>& t, const Poly<S>& f, const VectorField<S>& z, int m) {
  if (m < 1) throw PreconditionError("iterated_solve: m must be >= 1");
  if (!ScalarTraits<S>::is_zero(f.coefficient(Multidegree(t.dim()))))
    throw PreconditionError("iterated_solve: f must vanish at the origin");
  if (f.degree() > m - 1) throw PreconditionError("iterated_solve: deg f must be <= m - 1");
  if (!is_joint_invariant(t, f)) throw PreconditionError("iterated_solve: f is not a joint invariant of N and N*");
  Window<S> w(t, m + 1, 2 * m);
  return solve_window(w, f * t.Nstar, z);
}

// The operators of the Newton step on a window, for the normal form
// N + f N*: P1 V = J(f d0* d0* V), P2 V = J(d0*(V)(f) N*), and
// Q_i = box^-1 pi_Im P_i. [f N*, d0* V] = P1 V - P2 V.
template <FieldScalar S>
VectorField<S> apply_P1(const Window<S>& w, const Poly<S>& f, const VectorField<S>& v) {
  const auto& t = w.triple();
  return (f * apply_d0_star(t, apply_d0_star(t, v))).truncate(w.hi());
}
template <FieldScalar S>
VectorField<S> apply_P2(const Window<S>& w, const Poly<S>& f, const VectorField<S>& v) {
  const auto& t = w.triple();
  return (apply_d0_star(t, v).apply(f) * t.Nstar).truncate(w.hi());
}
template <FieldScalar S>
VectorField<S> apply_Q1(const Window<S>& w, const Poly<S>& f, const VectorField<S>& v) {
  return w.box_solve(w.project(apply_P1(w, f, v)).im_part);
}
template <FieldScalar S>
VectorField<S> apply_Q2(const Window<S>& w, const Poly<S>& f, const VectorField<S>& v) {
  return w.box_solve(w.project(apply_P2(w, f, v)).im_part);
}

// Squared factor of the Q1 ladder coefficient on b_n of a chain of weight
// lambda: (lambda-n+2)(n-1)(lambda-n+1)n / ((n-2)(lambda-n+3))^2, n >= 3.
inline Rational q1_factor_sq(int lambda, int n) {
  if (n < 3 || n > lambda) throw std::out_of_range("q1_factor_sq: need 3 <= n <= lambda");
  Integer num = Integer(lambda - n + 2) * (n - 1) * (lambda - n + 1) * n;
  Integer den = Integer(n - 2) * (lambda - n + 3);
  Rational q(num, den * den);
  q.canonicalize();
  return q;
}

struct Q1FactorScan {
  Rational max_factor_sq;
  int argmax_lambda = 0, argmax_n = 0;
  bool bounded_by_six = false;
};
Q1FactorScan scan_q1_factor(int lambda_max);

// Structured solve on one polynomial chain u_n = Y^n u_0 (weight lambda):
// given B' = sum beta_n u_n with beta_0 = beta_1 = beta_2 = 0, returns A, B,
// C in the same chain with box(A N + B N* + C H') = B' N*.
template <FieldScalar S>
struct ChainABC {
  std::vector<S> A, B, C;  // coefficients on u_n
  // Same quantities on the normalized chain w_n = u_n / s_n,
  // s_n = prod_{j<=n} sqrt(a(j)), when that route was evaluated.
  std::optional<std::vector<S>> A_w, B_w, C_w;
};

template <FieldScalar S>
ChainABC<S> structured_solve_chain(int lambda, const std::vector<S>& beta) {
  if (static_cast<int>(beta.size()) != lambda + 1) throw std::invalid_argument("structured_solve: beta size");
  for (int n = 0; n <= std::min(2, lambda); ++n)
    if (!ScalarTraits<S>::is_zero(beta[n]))
      throw PreconditionError("structured_solve: restriction B'_0 = B'_1 = B'_2 = 0 violated");
  auto a = [lambda](int n) -> long { return n <= 0 ? 0 : box_eigenvalue(lambda, n); };
  auto q = [](long num, long den) { return ScalarTraits<S>::from_rational(Rational(num, den)); };
  ChainABC<S> r;
  r.A.assign(beta.size(), S{});
  r.B.assign(beta.size(), S{});
  r.C.assign(beta.size(), S{});
  for (int n = 3; n <= lambda; ++n) {
    if (ScalarTraits<S>::is_zero(beta[n])) continue;
    long a1 = a(n - 1), a2 = a(n - 2);
    r.C[n - 1] = q(a2 + 2, a1 * a2) * beta[n];
    r.B[n] = q(a1 * a2 + 2 * (a2 + 2), a(n) * a1 * a2) * beta[n];
  }
  for (int n = 2; n + 1 <= lambda; ++n) {
    if (ScalarTraits<S>::is_zero(beta[n + 1])) continue;
    r.A[n - 1] = q(-2, a(n - 1)) * beta[n + 1];
  }
  // Normalized route: the coefficient formulas on w_n, converted back.
  try {
    std::vector<S> s(beta.size());
    s[0] = ScalarTraits<S>::from_int(1);
    for (int n = 1; n <= lambda; ++n) s[n] = s[n - 1] * ScalarTraits<S>::sqrt_int(static_cast<std::uint64_t>(a(n)));
    std::vector<S> bw(beta.size()), Aw(beta.size()), Bw(beta.size()), Cw(beta.size());
    for (int n = 0; n <= lambda; ++n) bw[n] = beta[n] * s[n];
    for (int n = 3; n <= lambda; ++n) {
      long a1 = a(n - 1), a2 = a(n - 2);
      S inv_sqrt_an = ScalarTraits<S>::inverse(ScalarTraits<S>::sqrt_int(static_cast<std::uint64_t>(a(n))));
      Cw[n - 1] = q(a2 + 2, a1 * a2) * inv_sqrt_an * bw[n];
      Bw[n] = q(1, a(n)) * (ScalarTraits<S>::from_int(1) + q(2 * (a2 + 2), a1 * a2)) * bw[n];
    }
    for (int n = 2; n + 1 <= lambda; ++n) {
      S root = ScalarTraits<S>::sqrt_int(static_cast<std::uint64_t>(a(n)) * static_cast<std::uint64_t>(a(n + 1)));
      Aw[n - 1] = q(-2, a(n - 1)) * ScalarTraits<S>::inverse(root) * bw[n + 1];
    }
    r.A_w = Aw;
    r.B_w = Bw;
    r.C_w = Cw;
  } catch (const std::overflow_error&) {
    // radicand products too large to represent; the u-route stands alone
  }
  return r;
}

template <FieldScalar S>
struct StructuredSolution {
  Poly<S> A, B, C;
  VectorField<S> field;  // A N + B N* + C H'
  bool normalized_route_agrees = true;
  bool normalized_route_checked = false;
};

template <FieldScalar S>
VectorField<S> abc_field(const Sl2Triple<S>& t, const Poly<S>& a, const Poly<S>& b, const Poly<S>& c) {
  return a * t.N + b * t.Nstar + c * t.Hprime;
}

// Decomposes B' degree by degree into polynomial chains and solves each
// chain; verifies box(field) = B' N* by explicit brackets.
template <FieldScalar S>
StructuredSolution<S> structured_solve(const Sl2Triple<S>& t, const Poly<S>& bprime) {
  int n = t.dim();
  StructuredSolution<S> out{Poly<S>(n), Poly<S>(n), Poly<S>(n), VectorField<S>(n)};
  if (!bprime.is_zero()) {
    for (int k = std::max(0, bprime.min_degree()); k <= bprime.degree(); ++k) {
      auto coords = bprime.coordinates(k);
      if (vector_is_zero(coords)) continue;
      auto dec = decompose(t, SliceBasis::Kind::Polynomials, k);
      std::vector<S> a(coords.size()), b(coords.size()), c(coords.size());
      for (std::size_t ch = 0; ch < dec->chains.size(); ++ch) {
        const auto& chain = dec->chains[ch];
        auto beta = dec->chain_coefficients(ch, coords);
        if (vector_is_zero(beta)) continue;
        auto sol = structured_solve_chain(chain.weight, beta);
        if (sol.A_w) {
          out.normalized_route_checked = true;
          S s = ScalarTraits<S>::from_int(1);
          for (int m = 0; m <= chain.weight; ++m) {
            if (m > 0) s *= ScalarTraits<S>::sqrt_int(static_cast<std::uint64_t>(box_eigenvalue(chain.weight, m)));
            S inv = ScalarTraits<S>::inverse(s);
            if (!ScalarTraits<S>::is_zero((*sol.A_w)[m] * inv - sol.A[m]) ||
                !ScalarTraits<S>::is_zero((*sol.B_w)[m] * inv - sol.B[m]) ||
                !ScalarTraits<S>::is_zero((*sol.C_w)[m] * inv - sol.C[m]))
              out.normalized_route_agrees = false;
          }
        }
        for (int m = 0; m <= chain.weight; ++m) {
          if (!ScalarTraits<S>::is_zero(sol.A[m])) a = axpy(a, sol.A[m], chain.vectors[m]);
          if (!ScalarTraits<S>::is_zero(sol.B[m])) b = axpy(b, sol.B[m], chain.vectors[m]);
          if (!ScalarTraits<S>::is_zero(sol.C[m])) c = axpy(c, sol.C[m], chain.vectors[m]);
        }
      }
      out.A += Poly<S>::from_coordinates(n, k, a);
      out.B += Poly<S>::from_coordinates(n, k, b);
      out.C += Poly<S>::from_coordinates(n, k, c);
    }
  }
  out.field = abc_field(t, out.A, out.B, out.C);
  VectorField<S> boxed = apply_d0(t, apply_d0_star(t, out.field));
  VectorField<S> diff = boxed - bprime * t.Nstar;
  bool ok;
  if constexpr (ScalarTraits<S>::exact) {
    ok = diff.is_zero();
  } else {
    ok = rnorm(diff, Rational(1)).value <= float_tolerance() * std::max(1.0, rnorm(bprime * t.Nstar, Rational(1)).value);
  }
  if (!ok) throw VerificationError("structured_solve: box(A N + B N* + C H') != B' N*");
  if (!out.normalized_route_agrees) throw VerificationError("structured_solve: normalized-basis route disagrees");
  return out;
}

// Solver constant d with |d0* V|_r <= m d |V|_r for V of degree <= 2m and
// 1/2 <= r <= 1: d = 4n sum_j |N*_j|_1 + sum_ij |s_ij|, s = matrix of N*.
struct SolverConstant {
  double d = 0;
  double derivative_part = 0;  // 4n sum_j |N*_j|_1
  double linear_part = 0;      // sum_ij |s_ij|
};

template <FieldScalar S>
SolverConstant solver_constant(const Sl2Triple<S>& t) {
  SolverConstant c;
  int n = t.dim();
  double sum = 0;
  for (int j = 0; j < n; ++j) sum += rnorm(t.Nstar[j], Rational(1)).value;
  c.derivative_part = 4.0 * n * sum;
  for (std::size_t i = 0; i < t.nstar_matrix.rows(); ++i)
    for (std::size_t j = 0; j < t.nstar_matrix.cols(); ++j)
      c.linear_part += std::fabs(ScalarTraits<S>::to_double(t.nstar_matrix(i, j)));
  c.d = c.derivative_part + c.linear_part;
  return c;
}

struct OperatorBounds {
  double f_rnorm = 0;          // |f|_r
  double grad_rnorm = 0;       // sum_j |df/dx_j|_r
  double f_norm = 0;           // ||f||
  double grad_norm = 0;        // sum_j ||df/dx_j||
  double linear_max_rnorm = 0; // max(|N|_r, |N*|_r, |H'|_r)
  double q1_bound = 0;         // 6 |f|_r
  double q2_bound = 0;         // C0 |grad f|_r max(...), C0 the measured ratio
  double q1_spectral = 0;      // measured ||Q1||
  double q2_spectral = 0;      // measured ||Q2||
  double c0_measured = 0;      // ||Q2|| / sum_j ||df/dx_j|| (0 when f = 0)
  double scalar_factor_max = 0;
  bool scalar_factor_bounded = true;  // every realized factor <= 6, exact
  bool q1_within_bound = true;        // ||Q1|| <= 6 ||f|| (tolerance 1e-9)
};

// Spectral norm of an operator on Im(box) given in chain coordinates,
// measured in the orthonormalized chain basis.
template <FieldScalar S>
double chain_operator_norm(const Window<S>& w, const Matrix<S>& m) {
  std::size_t d = m.rows();
  std::vector<double> scale(d);
  for (std::size_t i = 0; i < d; ++i) scale[i] = std::sqrt(ScalarTraits<S>::to_double(w.im_basis_norm_sq(i)));
  std::vector<double> dense(d * d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j)
      dense[i * d + j] = ScalarTraits<S>::to_double(m(i, j)) * scale[i] / scale[j];
  return spectral_norm(dense, d, d);
}

template <FieldScalar S>
OperatorBounds operator_bounds(const Window<S>& w, const Poly<S>& f, const Rational& r) {
  const auto& t = w.triple();
  if (!is_joint_invariant(t, f)) throw PreconditionError("operator_bounds: f is not a joint invariant");
  OperatorBounds b;
  b.f_rnorm = rnorm(f, r).value;
  b.f_norm = std::sqrt(ScalarTraits<S>::to_double(norm_sq(f)));
  for (int j = 0; j < t.dim(); ++j) {
    b.grad_rnorm += rnorm(f.derive(j), r).value;
    b.grad_norm += std::sqrt(ScalarTraits<S>::to_double(norm_sq(f.derive(j))));
  }
  b.linear_max_rnorm = std::max({rnorm(t.N, r).value, rnorm(t.Nstar, r).value, rnorm(t.Hprime, r).value});
  b.q1_bound = 6 * b.f_rnorm;
  Rational worst(0);
  for (int k = w.lo(); k <= w.hi(); ++k)
    for (const auto& c : w.slice(k).chains)
      for (int n = 3; n <= c.weight; ++n) worst = std::max(worst, q1_factor_sq(c.weight, n));
  b.scalar_factor_max = std::sqrt(worst.get_d());
  b.scalar_factor_bounded = worst <= 36;
  if (!f.is_zero() && !w.im_basis().empty()) {
    auto q1 = w.im_matrix([&](const VectorField<S>& v) { return apply_Q1(w, f, v); });
    auto q2 = w.im_matrix([&](const VectorField<S>& v) { return apply_Q2(w, f, v); });
    b.q1_spectral = chain_operator_norm(w, q1);
    b.q2_spectral = chain_operator_norm(w, q2);
    b.c0_measured = b.grad_norm > 0 ? b.q2_spectral / b.grad_norm : 0;
  }
  b.q2_bound = b.c0_measured * b.grad_rnorm * b.linear_max_rnorm;
  b.q1_within_bound = b.q1_spectral <= 6 * b.f_norm + 1e-9;
  return b;
}

}  // namespace nilnf
