#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nilnf/cohom.hpp"
#include "nilnf/sl2.hpp"
#include "nilnf/vfield.hpp"

namespace nilnf {

struct CheckReport {
  std::string name;
  bool ok = false;
  double magnitude = 0;  // |residual|_1; 0 when exactly zero
};

struct Verification {
  std::string backend;  // "exact" or "float"
  std::vector<CheckReport> checks;

  bool all_ok() const;
  // "exact-zero", "within-tolerance" or "failed".
  std::string status() const;
};

template <FieldScalar S>
CheckReport zero_check(const std::string& name, const VectorField<S>& residual, double scale = 1) {
  CheckReport c{name, false, 0};
  if (!residual.is_zero()) c.magnitude = rnorm(residual, Rational(1)).value;
  if constexpr (ScalarTraits<S>::exact)
    c.ok = residual.is_zero();
  else
    c.ok = c.magnitude <= float_tolerance() * std::max(1.0, scale);
  return c;
}

template <FieldScalar S>
bool linear_part_is(const VectorField<S>& v, const Matrix<S>& a) {
  auto diff = v.linear_matrix() - a;
  if constexpr (ScalarTraits<S>::exact) {
    return diff.is_zero();
  } else {
    for (std::size_t i = 0; i < diff.rows(); ++i)
      for (std::size_t j = 0; j < diff.cols(); ++j)
        if (std::fabs(diff(i, j)) > float_tolerance()) return false;
    return true;
  }
}

template <FieldScalar S>
void require_perturbation_of_n(const Sl2Triple<S>& t, const VectorField<S>& v, const char* who) {
  if (v.dim() != t.dim()) throw PreconditionError(std::string(who) + ": dimension mismatch");
  for (int i = 0; i < v.dim(); ++i)
    if (!ScalarTraits<S>::is_zero(v[i].coefficient(Multidegree(v.dim()))))
      throw PreconditionError(std::string(who) + ": field does not vanish at the origin");
  if (!linear_part_is(v, t.n_matrix)) throw PreconditionError(std::string(who) + ": linear part is not N");
}

// Good form: NF - N = f N* with N(f) = N*(f) = 0, checked on J^cap.
template <FieldScalar S>
struct ConditionReport {
  bool holds = false;
  Poly<S> f;
  std::string reason;
};

template <FieldScalar S>
ConditionReport<S> check_condition(const Sl2Triple<S>& t, const VectorField<S>& nf, int cap) {
  require_perturbation_of_n(t, nf, "check_condition");
  int n = t.dim();
  ConditionReport<S> rep{false, Poly<S>(n), ""};
  VectorField<S> g = (nf - t.N).truncate(cap);
  for (int k = 2; k <= std::max(1, g.degree()); ++k) {
    auto target = g.coordinates(k);
    if (vector_is_zero(target)) continue;
    SliceBasis pb{SliceBasis::Kind::Polynomials, n, k - 1};
    Matrix<S> a(target.size(), pb.dim());
    for (std::size_t j = 0; j < pb.dim(); ++j) {
      auto e = Poly<S>::monomial(pb.monomial(j), ScalarTraits<S>::from_int(1));
      a.set_column(j, (e * t.Nstar).coordinates(k));
    }
    auto x = solve(a, target);
    if (!x) {
      rep.reason = "degree " + std::to_string(k) + " part is not a multiple of N*";
      return rep;
    }
    rep.f += Poly<S>::from_coordinates(n, k - 1, *x);
  }
  if (!t.N.apply(rep.f).is_zero()) {
    rep.reason = "N(f) != 0";
    return rep;
  }
  if (!t.Nstar.apply(rep.f).is_zero()) {
    rep.reason = "N*(f) != 0";
    return rep;
  }
  rep.holds = true;
  return rep;
}

// The normal form is NF = (id + U)_* V with U = total_shift, every
// homogeneous part of U orthogonal to Ker d0. That condition fixes U and NF
// uniquely, so both drivers return the same NF.
template <FieldScalar S>
struct NormalizationResult {
  std::string driver;
  int order = 0;
  VectorField<S> normal_form;
  // Terms of the conjugated field above `order` up to `remainder_order`.
  VectorField<S> remainder;
  int remainder_order = 0;
  // Pieces of total_shift, one per degree (degreewise) or per window
  // (newton); they sum to total_shift.
  std::vector<VectorField<S>> transformations;
  std::vector<std::pair<int, int>> windows;
  VectorField<S> total_shift;
  Verification verification;
};

namespace detail {

template <FieldScalar S>
void finish_verification(const Sl2Triple<S>& t, const VectorField<S>& input, NormalizationResult<S>& r) {
  r.verification.backend = ScalarTraits<S>::name;
  double scale = rnorm(input, Rational(1)).value;
  r.verification.checks.push_back(zero_check("nf_in_ker_d0_star", apply_d0_star(t, r.normal_form - t.N), scale));
  VectorField<S> ker_leak(t.dim());
  if (!r.total_shift.is_zero()) {
    Window<S> w(t, r.total_shift.min_degree(), r.total_shift.degree());
    ker_leak = w.ker_d0_part(r.total_shift);
  }
  r.verification.checks.push_back(zero_check("shift_orthogonal_to_ker_d0", ker_leak, scale));
  // (id + U)_* V = NF iff (I + DU) V = NF o (id + U).
  r.verification.checks.push_back(zero_check(
      "conjugacy", conjugacy_residual(r.normal_form, r.total_shift, input.truncate(r.order), r.order), scale));
}

}  // namespace detail

// Degree by degree: with Y = (id + U)_* V normalized below k, the degree-k
// piece u = -d0*(box^-1 pi_Im Y_k) is added to U, which replaces Y_k by its
// Ker d0* part and leaves lower degrees unchanged.
template <FieldScalar S>
NormalizationResult<S> normalize_degreewise(const Sl2Triple<S>& t, const VectorField<S>& v, int order,
                                            int remainder_order = -1) {
  require_perturbation_of_n(t, v, "normalize");
  if (order < 1) throw PreconditionError("normalize: order must be >= 1");
  int top = std::max(order, remainder_order);
  NormalizationResult<S> r;
  r.driver = "degreewise";
  r.order = order;
  r.remainder_order = top;
  VectorField<S> x = v.truncate(top);
  VectorField<S> y = x;
  VectorField<S> shift(t.dim());
  r.verification.backend = ScalarTraits<S>::name;
  for (int k = 2; k <= order; ++k) {
    Window<S> w(t, k, k);
    auto split = w.project(y.homogeneous_part(k));
    VectorField<S> u = -apply_d0_star(t, w.box_solve(split.im_part)).homogeneous_part(k);
    if (!u.is_zero()) {
      shift += u;
      y = push_forward(x, shift, top);
    }
    r.verification.checks.push_back(
        zero_check("slice_" + std::to_string(k) + "_reduced", y.homogeneous_part(k) - split.ker_part));
    r.transformations.push_back(u);
    r.windows.emplace_back(k, k);
  }
  r.normal_form = y.truncate(order);
  r.remainder = y - r.normal_form;
  r.total_shift = shift;
  detail::finish_verification(t, v, r);
  return r;
}

struct NewtonStepOptions {
  // Throw PreconditionError when NF_m is not of the form N + f N* with f a
  // joint invariant.
  bool require_good_form = false;
};

template <FieldScalar S>
struct NewtonStepResult {
  int m = 0, lo = 0, hi = 0;
  VectorField<S> U, V, Btilde;
  VectorField<S> conjugated, nf_next, remainder_next;
  int neumann_terms = 0;
  ConditionReport<S> nf_condition;
  ConditionReport<S> nf_next_condition;
  Verification verification;
};

// One doubling step: Y = NF_m + R with deg NF_m <= m and ord R >= m+1.
// Solves the iterated equation on [m+1, min(2m, order)] and conjugates Y.
template <FieldScalar S>
NewtonStepResult<S> newton_step(const Sl2Triple<S>& t, const VectorField<S>& nf, const VectorField<S>& remainder,
                                int m, int order, const NewtonStepOptions& opt = {}) {
  require_perturbation_of_n(t, nf, "newton_step");
  if (m < 1) throw PreconditionError("newton_step: m must be >= 1");
  if (nf.degree() > m) throw PreconditionError("newton_step: deg NF_m must be <= m");
  if (!remainder.is_zero() && remainder.min_degree() < m + 1)
    throw PreconditionError("newton_step: remainder must have order >= m+1");
  NewtonStepResult<S> r;
  r.m = m;
  r.lo = m + 1;
  r.hi = std::min(2 * m, order);
  if (r.lo > r.hi) throw PreconditionError("newton_step: empty degree window");
  r.nf_condition = check_condition(t, nf, m);
  if (opt.require_good_form && !r.nf_condition.holds)
    throw PreconditionError("newton_step: NF_m not of the form N + f N*: " + r.nf_condition.reason);
  int n = t.dim();
  Window<S> w(t, r.lo, r.hi);
  VectorField<S> g = nf - t.N;
  VectorField<S> b = remainder.window(r.lo, r.hi);
  auto split = w.project(b);
  auto sol = solve_window(w, g, split.im_part);
  r.U = sol.U;
  r.V = sol.V;
  r.neumann_terms = sol.neumann_terms;
  VectorField<S> reduced = b - lie_bracket(t.N + g, r.U).truncate(r.hi);
  auto rsplit = w.project(reduced);
  r.Btilde = rsplit.ker_part;
  VectorField<S> y = nf + remainder.truncate(order);
  r.conjugated = conjugate_truncated(y, r.U, order);
  r.nf_next = r.conjugated.truncate(r.hi);
  r.remainder_next = r.conjugated - r.nf_next;
  r.nf_next_condition = check_condition(t, r.nf_next, r.hi);
  double scale = rnorm(y, Rational(1)).value;
  r.verification.backend = ScalarTraits<S>::name;
  r.verification.checks.push_back(zero_check("window_equation", sol.residual, scale));
  r.verification.checks.push_back(zero_check("window_image_removed", rsplit.im_part, scale));
  r.verification.checks.push_back(zero_check("jet_matches_nf_plus_btilde", r.nf_next - nf - r.Btilde, scale));
  r.verification.checks.push_back(zero_check("U_orthogonal_to_ker_d0", w.ker_d0_part(r.U), scale));
  (void)n;
  return r;
}

template <FieldScalar S>
struct NewtonRun {
  NormalizationResult<S> result;
  std::vector<NewtonStepResult<S>> steps;
};

// Doubling schedule m = 1, 2, 4, ... with windows capped at `order`. Each
// step adds W in Im d0* on [m+1, 2m] to the total shift U, so that
// (id + U + W)_* V is normalized to 2m. With Phi = id + U, that push-forward
// is (id + W o Phi^-1)_* Y for Y = Phi_* V, and W o Phi^-1 - W raises
// degree; W is therefore found by re-solving the iterated equation of the
// window, at most hi - lo + 1 times.
template <FieldScalar S>
NewtonRun<S> normalize_newton(const Sl2Triple<S>& t, const VectorField<S>& v, int order,
                              const NewtonStepOptions& opt = {}) {
  require_perturbation_of_n(t, v, "normalize");
  if (order < 1) throw PreconditionError("normalize: order must be >= 1");
  NewtonRun<S> run;
  auto& r = run.result;
  r.driver = "newton";
  r.order = order;
  r.remainder_order = order;
  int n = t.dim();
  VectorField<S> x = v.truncate(order);
  VectorField<S> y = x;
  VectorField<S> shift(n);
  double scale = rnorm(x, Rational(1)).value;
  for (int m = 1; m + 1 <= order; m *= 2) {
    NewtonStepResult<S> s;
    s.m = m;
    s.lo = m + 1;
    s.hi = std::min(2 * m, order);
    VectorField<S> nf = y.truncate(m);
    s.nf_condition = check_condition(t, nf, m);
    if (opt.require_good_form && !s.nf_condition.holds)
      throw PreconditionError("newton_step: NF_m not of the form N + f N*: " + s.nf_condition.reason);
    Window<S> w(t, s.lo, s.hi);
    VectorField<S> g = nf - t.N;
    VectorField<S> z = w.project(y.window(s.lo, s.hi)).im_part;
    VectorField<S> phi_inv = inverse_shift(shift, s.hi);
    VectorField<S> wsh(n);
    WindowSolution<S> sol;
    int passes = shift.is_zero() ? 1 : s.hi - s.lo + 1;
    for (int pass = 0; pass < passes; ++pass) {
      VectorField<S> rhs = z;
      if (!shift.is_zero() && !wsh.is_zero()) {
        VectorField<S> e = compose_with_shift(wsh, phi_inv, s.hi) - wsh;
        rhs += w.project(lie_bracket(t.N + g, e).truncate(s.hi).window(s.lo, s.hi)).im_part;
      }
      sol = solve_window(w, g, rhs);
      VectorField<S> next = -sol.U.window(s.lo, s.hi);
      bool settled = (next - wsh).is_zero();
      wsh = next;
      if (settled && pass > 0) break;
    }
    s.U = wsh;
    s.V = -sol.V;
    s.neumann_terms = sol.neumann_terms;
    if (!wsh.is_zero()) {
      shift += wsh;
      y = push_forward(x, shift, order);
    }
    s.conjugated = y;
    s.nf_next = y.truncate(s.hi);
    s.remainder_next = y - s.nf_next;
    s.Btilde = s.nf_next - nf;
    s.nf_next_condition = check_condition(t, s.nf_next, s.hi);
    s.verification.backend = ScalarTraits<S>::name;
    s.verification.checks.push_back(zero_check("window_equation", sol.residual, scale));
    s.verification.checks.push_back(zero_check("window_image_removed", w.project(s.Btilde).im_part, scale));
    s.verification.checks.push_back(zero_check("U_orthogonal_to_ker_d0", w.ker_d0_part(s.U), scale));
    r.transformations.push_back(s.U);
    r.windows.emplace_back(s.lo, s.hi);
    for (const auto& c : s.verification.checks)
      r.verification.checks.push_back({"m" + std::to_string(m) + "_" + c.name, c.ok, c.magnitude});
    run.steps.push_back(std::move(s));
  }
  r.normal_form = y.truncate(order);
  r.remainder = y - r.normal_form;
  r.total_shift = shift;
  detail::finish_verification(t, v, r);
  return run;
}

// Joint invariants: Ker N ∩ Ker N* on P_k for 1 <= k <= cap, one basis per
// degree (reduced echelon, so the output is canonical).
template <FieldScalar S>
struct FirstIntegralBasis {
  int cap = 0;
  std::vector<std::vector<Poly<S>>> by_degree;  // index k-1
  std::vector<Poly<S>> all() const {
    std::vector<Poly<S>> out;
    for (const auto& d : by_degree) out.insert(out.end(), d.begin(), d.end());
    return out;
  }
};

template <FieldScalar S>
std::vector<Poly<S>> echelon_polys(const std::vector<Poly<S>>& polys, int n, int lo, int hi);

template <FieldScalar S>
std::vector<Poly<S>> joint_invariants_of_degree(const Sl2Triple<S>& t, int k, Exec exec) {
  auto ops = slice_operators(t, SliceBasis::Kind::Polynomials, k, exec);
  std::size_t d = ops.dim();
  Matrix<S> stacked(2 * d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      stacked(i, j) = ops.Y(i, j);
      stacked(d + i, j) = ops.X(i, j);
    }
  std::vector<Poly<S>> out;
  for (const auto& v : kernel(stacked, Exec::Serial)) out.push_back(Poly<S>::from_coordinates(t.dim(), k, v));
  return echelon_polys(out, t.dim(), k, k);
}

template <FieldScalar S>
FirstIntegralBasis<S> first_integrals(const Sl2Triple<S>& t, int cap, Exec exec = default_exec()) {
  if (cap < 1) throw PreconditionError("first_integrals: cap must be >= 1");
  FirstIntegralBasis<S> b;
  b.cap = cap;
  b.by_degree.resize(static_cast<std::size_t>(cap));
  parallel_for(cap, exec, [&](long i) {
    b.by_degree[static_cast<std::size_t>(i)] = joint_invariants_of_degree(t, static_cast<int>(i) + 1, Exec::Serial);
  });
  return b;
}

// Polynomial first integrals of an arbitrary field V (vanishing at 0):
// f in P_{<=cap+margin}, f(0) = 0, with J^{cap+margin}(V(f)) = 0; reports
// the distinct jets J^cap f. Constants are always first integrals and are
// omitted. margin = 0 is the plain truncated convention, which also accepts
// elements whose obstruction only shows at higher degree; margin < 0 means
// margin = cap.
template <FieldScalar S>
struct FieldFirstIntegrals {
  int cap = 0, margin = 0;
  std::vector<Poly<S>> basis;  // J^cap images, reduced echelon
};

template <FieldScalar S>
FieldFirstIntegrals<S> first_integrals_of_field(const VectorField<S>& v, int cap, int margin = -1,
                                                Exec exec = default_exec()) {
  if (cap < 1) throw PreconditionError("first_integrals: need cap >= 1");
  if (margin < 0) margin = cap;
  int n = v.dim();
  for (int i = 0; i < n; ++i)
    if (!ScalarTraits<S>::is_zero(v[i].coefficient(Multidegree(n))))
      throw PreconditionError("first_integrals: field must vanish at the origin");
  int top = cap + margin;
  std::vector<Multidegree> cols;
  for (int k = 1; k <= top; ++k)
    for (const auto& m : monomial_basis(n, k)) cols.push_back(m);
  std::vector<Multidegree> rows;
  for (int k = 1; k <= top; ++k)
    for (const auto& m : monomial_basis(n, k)) rows.push_back(m);
  Matrix<S> a(rows.size(), cols.size());
  auto column = [&](std::size_t j) {
    Poly<S> img = v.apply(Poly<S>::monomial(cols[j], ScalarTraits<S>::from_int(1))).truncate(top);
    for (const auto& [m, c] : img.terms()) {
      auto it = std::lower_bound(rows.begin(), rows.end(), m);
      a(static_cast<std::size_t>(it - rows.begin()), j) = c;
    }
  };
  parallel_for(static_cast<long>(cols.size()), exec, [&](long j) { column(static_cast<std::size_t>(j)); }, 9);
  std::vector<Poly<S>> jets;
  for (const auto& k : kernel(a, exec)) {
    Poly<S> f(n);
    for (std::size_t j = 0; j < cols.size(); ++j)
      if (cols[j].degree() <= cap && !ScalarTraits<S>::is_zero(k[j])) f.add_term(cols[j], k[j]);
    if (!f.is_zero()) jets.push_back(f);
  }
  FieldFirstIntegrals<S> out;
  out.cap = cap;
  out.margin = margin;
  out.basis = echelon_polys(jets, n, 1, cap);
  return out;
}

// Reduced echelon basis of span(polys) in the monomial order on degrees
// lo..hi, highest degree columns first.
template <FieldScalar S>
std::vector<Poly<S>> echelon_polys(const std::vector<Poly<S>>& polys, int n, int lo, int hi) {
  if (polys.empty()) return {};
  std::vector<Multidegree> cols;
  for (int k = hi; k >= lo; --k)
    for (const auto& m : monomial_basis(n, k)) cols.push_back(m);
  Matrix<S> a(polys.size(), cols.size());
  for (std::size_t i = 0; i < polys.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j) a(i, j) = polys[i].coefficient(cols[j]);
  auto piv = rref(a, Exec::Serial);
  std::vector<Poly<S>> out;
  for (std::size_t i = 0; i < piv.size(); ++i) {
    Poly<S> f(n);
    for (std::size_t j = 0; j < cols.size(); ++j)
      if (!ScalarTraits<S>::is_zero(a(i, j))) f.add_term(cols[j], a(i, j));
    out.push_back(f);
  }
  return out;
}

// Three-dimensional normal form family for the Jordan type [3]: with
// h = x z - y^2/2 and p = x^a h^b, E1(p) = p (x dx + y dy + z dz),
// E2(p) = p (x dy + y dz), E3(p) = p dz.
template <FieldScalar S>
std::vector<VectorField<S>> nf3_family(int degree) {
  std::vector<VectorField<S>> out;
  const int n = 3;
  Poly<S> x = Poly<S>::variable(n, 0), y = Poly<S>::variable(n, 1), z = Poly<S>::variable(n, 2);
  Poly<S> h = x * z - ScalarTraits<S>::from_rational(Rational(1, 2)) * (y * y);
  auto powers = [&](int deg) {
    std::vector<Poly<S>> ps;
    for (int b = 0; 2 * b <= deg; ++b) {
      Poly<S> p = Poly<S>::constant(n, ScalarTraits<S>::from_int(1));
      for (int i = 0; i < deg - 2 * b; ++i) p = p * x;
      for (int i = 0; i < b; ++i) p = p * h;
      ps.push_back(p);
    }
    return ps;
  };
  VectorField<S> euler(std::vector<Poly<S>>{x, y, z});
  VectorField<S> e2(std::vector<Poly<S>>{Poly<S>(n), x, y});
  VectorField<S> e3 = VectorField<S>::single(2, Poly<S>::constant(n, ScalarTraits<S>::from_int(1)));
  if (degree >= 1)
    for (const auto& p : powers(degree - 1)) {
      out.push_back(p * euler);
      out.push_back(p * e2);
    }
  for (const auto& p : powers(degree)) out.push_back(p * e3);
  return out;
}

template <FieldScalar S>
struct ShapeReport {
  bool matches = false;
  int first_bad_degree = -1;
};

// Whether every slice of NF - N in degrees 2..order lies in the family span.
template <FieldScalar S>
ShapeReport<S> check_nf3_shape(const VectorField<S>& nf, const VectorField<S>& n_field, int order) {
  if (nf.dim() != 3) throw PreconditionError("check_nf3_shape: dimension must be 3");
  ShapeReport<S> rep;
  VectorField<S> g = nf - n_field;
  for (int k = 2; k <= order; ++k) {
    auto target = g.coordinates(k);
    if (vector_is_zero(target)) continue;
    auto fam = nf3_family<S>(k);
    Matrix<S> a(target.size(), fam.size());
    for (std::size_t j = 0; j < fam.size(); ++j) a.set_column(j, fam[j].coordinates(k));
    if (!solve(a, target)) {
      rep.first_bad_degree = k;
      return rep;
    }
  }
  rep.matches = true;
  return rep;
}

// Schedule constants of the convergence argument.
struct ScheduleConstants {
  int n = 0;
  double d = 0;
  double c = 0;      // |df/dx_j|_r <= c max(|X-N|_r, |D(X-N)|_r)
  double c0 = 0;     // measured ||Q2|| / sum_j ||df/dx_j||
  double linear_max = 0;
  double eta = 0;    // largest 2^-k with (6 + c0 n c linear_max) eta < 1/2
};

template <FieldScalar S>
ScheduleConstants schedule_constants(const Sl2Triple<S>& t, double c0) {
  ScheduleConstants sc;
  sc.n = t.dim();
  sc.d = solver_constant(t).d;
  double best_row = 0, max_entry = 0;
  for (std::size_t i = 0; i < t.nstar_matrix.rows(); ++i) {
    double row = 0;
    for (std::size_t j = 0; j < t.nstar_matrix.cols(); ++j) {
      double s = ScalarTraits<S>::to_double(t.nstar_matrix(i, j));
      row += s * s;
      max_entry = std::max(max_entry, std::fabs(s));
    }
    best_row = std::max(best_row, row);
  }
  sc.c = (2.0 / best_row) * (1.0 + 2.0 * max_entry / best_row);
  sc.c0 = c0;
  Rational one(1);
  sc.linear_max = std::max({rnorm(t.N, one).value, rnorm(t.Nstar, one).value, rnorm(t.Hprime, one).value});
  double k = 6 + c0 * sc.n * sc.c * sc.linear_max;
  sc.eta = 1;
  while (k * sc.eta >= 0.5) sc.eta /= 2;
  return sc;
}

struct SchedulePoint {
  int m = 0;
  double r = 0, rho = 0, R = 0;
  bool ordered = false;  // rho < R < r <= 1
};
SchedulePoint schedule_point(int m, double r, double d);

template <FieldScalar S>
struct SetMembership {
  double nf_size = 0;         // max(|X-N|_r, |D(X-N)|_r)
  double nf_threshold = 0;    // eta - 8n/m
  bool nf_member = false;
  double remainder_size = 0;  // |R|_r
  bool remainder_member = false;
};

template <FieldScalar S>
SetMembership<S> set_membership(const Sl2Triple<S>& t, const VectorField<S>& nf, const VectorField<S>& rem, int m,
                                const Rational& r, const ScheduleConstants& sc) {
  SetMembership<S> s;
  VectorField<S> g = nf - t.N;
  s.nf_size = std::max(rnorm(g, r).value, rnorm_jacobian(g, r));
  s.nf_threshold = sc.eta - 8.0 * t.dim() / m;
  s.nf_member = s.nf_size < s.nf_threshold;
  s.remainder_size = rnorm(rem, r).value;
  s.remainder_member = s.remainder_size < 1;
  return s;
}

struct RadiiReport {
  double r0 = 0, d = 0;
  int kmax = 0;
  std::vector<long double> R;  // R_0..R_kmax
  int m1 = -1;                 // -1 when not found
  long double limit = 0;
  bool tail_verified = false;  // R_k > R_m1 / 2 for m1 < k <= kmax
  // Partial sums of sum ln(2^(i+1) d)/2^i, sum 1/2^i and sum i/2^i.
  std::vector<long double> series_log, series_geom, series_lin;
  int m0 = -1;                 // least m = 2^k with rho < R < r, -1 if none
};

// R_{k+1} = gamma_k m^(-2/m) R_k, m = 2^k, gamma_k = (2 m d)^(-1/m).
RadiiReport radii_sequence(double r0, int kmax, double d);

}  // namespace nilnf
