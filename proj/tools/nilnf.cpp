// Command-line front end. Exit codes: 0 ok, 2 parse/usage, 3 precondition,
// 4 verification failure.
#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

#include "nilnf/cohom.hpp"
#include "nilnf/json_io.hpp"
#include "nilnf/normalform.hpp"
#include "nilnf/sl2.hpp"

using namespace nilnf;

namespace {

constexpr int kExitParse = 2;
constexpr int kExitPrecondition = 3;
constexpr int kExitVerification = 4;

struct Common {
  std::string mode = "exact";
  double tol = 1e-9;
  std::string format = "json";
};

struct Opts {
  std::string jordan;
  std::string input, nf, remainder, fm, z, field;
  std::string space = "vf";
  std::string driver = "degreewise";
  std::string coordinates = "scaled";
  int order = 6, degree = 2, m = 2, cap = 6, margin = -1, kmax = 30, lambda_max = 200;
  int remainder_order = -1;
  double r = 1, d = 0;
  bool require_good_form = false;
};

Json read_json(const std::string& path) {
  std::string text;
  if (path == "-") {
    text.assign(std::istreambuf_iterator<char>(std::cin), {});
  } else {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    text.assign(std::istreambuf_iterator<char>(in), {});
  }
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) throw ParseError("empty input: " + path);
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError(std::string("malformed JSON in ") + path + ": " + e.what());
  }
}

JordanType jordan_of(const Opts& o) {
  if (o.jordan.empty()) throw ParseError("--jordan is required");
  JordanType jt;
  try {
    jt = JordanType::parse(o.jordan);
  } catch (const std::invalid_argument& e) {
    if (dynamic_cast<const PreconditionError*>(&e)) throw;
    throw ParseError(e.what());
  }
  jt.validate();
  return jt;
}

Rational radius_of(double r) {
  if (!(r > 0 && r <= 1)) throw PreconditionError("radius must lie in (0, 1]");
  return Rational(r);
}

template <FieldScalar S>
VectorField<S> read_field(const Sl2Triple<S>& t, const std::string& path, const std::string& coords) {
  auto v = vfield_from_json<S>(read_json(path));
  if (v.dim() != t.dim()) throw PreconditionError("input dimension does not match the Jordan type");
  if (coords == "jordan") return to_scaled_coordinates(t, v);
  if (coords != "scaled") throw ParseError("--coordinates must be scaled or jordan");
  return v;
}

Json verification_json(const Verification& v, bool& ok) {
  ok = ok && v.all_ok();
  return to_json(v);
}

template <FieldScalar S>
Json condition_json(const ConditionReport<S>& c) {
  Json j{{"holds", c.holds}};
  if (c.holds)
    j["f"] = to_json(c.f);
  else
    j["reason"] = c.reason;
  return j;
}

template <FieldScalar S>
int cmd_normalize(const Opts& o, Json& out) {
  auto t = build_triple<S>(jordan_of(o));
  auto v = read_field(t, o.input, o.coordinates);
  NormalizationResult<S> r;
  Json steps = Json::array();
  if (o.driver == "degreewise") {
    r = normalize_degreewise(t, v, o.order, o.remainder_order);
  } else if (o.driver == "newton") {
    auto run = normalize_newton(t, v, o.order, NewtonStepOptions{o.require_good_form});
    for (const auto& s : run.steps)
      steps.push_back(Json{{"m", s.m},
                           {"window", {s.lo, s.hi}},
                           {"neumann_terms", s.neumann_terms},
                           {"nf_condition", condition_json(s.nf_condition)}});
    r = std::move(run.result);
  } else {
    throw ParseError("--driver must be degreewise or newton");
  }
  bool ok = true;
  Json us = Json::array();
  for (std::size_t i = 0; i < r.transformations.size(); ++i)
    us.push_back(Json{{"window", {r.windows[i].first, r.windows[i].second}}, {"U", to_json(r.transformations[i])}});
  out = Json{{"command", "normalize"},
             {"jordan", t.jordan.to_string()},
             {"driver", r.driver},
             {"order", r.order},
             {"normal_form", to_json(r.normal_form)},
             {"transformations", us},
             {"total_shift", to_json(r.total_shift)},
             {"remainder_order", r.remainder_order},
             {"remainder", to_json(r.remainder)},
             {"condition", condition_json(check_condition(t, r.normal_form, r.order))}};
  if (!steps.empty()) out["newton_steps"] = steps;
  if (t.dim() == 3 && t.jordan.blocks.size() == 1) {
    auto shape = check_nf3_shape(r.normal_form, t.N, r.order);
    out["nf3_shape"] = Json{{"matches", shape.matches}, {"first_bad_degree", shape.first_bad_degree}};
  }
  out["verification"] = verification_json(r.verification, ok);
  return ok ? 0 : kExitVerification;
}

template <FieldScalar S>
int cmd_newton_step(const Opts& o, Json& out) {
  auto t = build_triple<S>(jordan_of(o));
  auto nf = read_field(t, o.nf, o.coordinates);
  VectorField<S> rem = o.remainder.empty() ? VectorField<S>(t.dim()) : read_field(t, o.remainder, o.coordinates);
  int order = o.order > 0 ? o.order : 2 * o.m;
  auto s = newton_step(t, nf, rem, o.m, order, NewtonStepOptions{o.require_good_form});
  Rational r = radius_of(o.r);
  double c0 = 0;
  if (s.nf_condition.holds && !s.nf_condition.f.is_zero()) {
    Window<S> w(t, s.lo, s.hi);
    c0 = operator_bounds(w, s.nf_condition.f, r).c0_measured;
  }
  auto sc = schedule_constants(t, c0);
  auto mem = set_membership(t, nf, rem, o.m, r, sc);
  auto pt = schedule_point(o.m, o.r, sc.d);
  bool ok = true;
  out = Json{{"command", "newton-step"},
             {"jordan", t.jordan.to_string()},
             {"m", s.m},
             {"window", {s.lo, s.hi}},
             {"U", to_json(s.U)},
             {"V", to_json(s.V)},
             {"Btilde", to_json(s.Btilde)},
             {"nf_next", to_json(s.nf_next)},
             {"remainder_next", to_json(s.remainder_next)},
             {"neumann_terms", s.neumann_terms},
             {"nf_condition", condition_json(s.nf_condition)},
             {"nf_next_condition", condition_json(s.nf_next_condition)},
             {"schedule",
              {{"eta", sc.eta},
               {"d", sc.d},
               {"c", sc.c},
               {"c0", sc.c0},
               {"rho", pt.rho},
               {"R", pt.R},
               {"ordered", pt.ordered},
               {"nf_size", mem.nf_size},
               {"nf_threshold", mem.nf_threshold},
               {"nf_member", mem.nf_member},
               {"remainder_size", mem.remainder_size},
               {"remainder_member", mem.remainder_member}}}};
  out["verification"] = verification_json(s.verification, ok);
  return ok ? 0 : kExitVerification;
}

template <FieldScalar S>
int cmd_decompose(const Opts& o, Json& out) {
  auto t = build_triple<S>(jordan_of(o));
  SliceBasis::Kind kind;
  if (o.space == "vf")
    kind = SliceBasis::Kind::VectorFields;
  else if (o.space == "poly")
    kind = SliceBasis::Kind::Polynomials;
  else
    throw ParseError("--space must be vf or poly");
  if (o.degree < (kind == SliceBasis::Kind::VectorFields ? 1 : 0)) throw PreconditionError("degree out of range");
  auto dec = decompose(t, kind, o.degree);
  Verification v;
  v.backend = ScalarTraits<S>::name;
  auto rel = check_slice_relations(dec->ops);
  v.checks.push_back({"slice_relations", !rel.has_value(), 0});
  std::size_t total = 0;
  for (const auto& c : dec->chains) total += static_cast<std::size_t>(c.length());
  v.checks.push_back({"dimension_sum", total == dec->dim(), 0});
  bool orth = true, norms = true;
  for (std::size_t a = 0; a < dec->chains.size(); ++a) {
    const auto& ca = dec->chains[a];
    for (int m = 0; m <= ca.weight; ++m) {
      S direct = dec->ops.inner(ca.vectors[m], ca.vectors[m]);
      S formula = chain_norm_sq_formula(ca.weight, m, ca.norm_sq[0]);
      if (!ScalarTraits<S>::is_zero(direct - formula)) norms = false;
    }
    for (std::size_t b = a + 1; b < dec->chains.size(); ++b)
      for (int m = 0; m <= ca.weight; ++m)
        for (int k = 0; k <= dec->chains[b].weight; ++k)
          if (!ScalarTraits<S>::is_zero(dec->ops.inner(ca.vectors[m], dec->chains[b].vectors[k]))) orth = false;
  }
  v.checks.push_back({"chain_orthogonality", orth, 0});
  v.checks.push_back({"norm_formula", norms, 0});
  bool ok = true;
  out = Json{{"command", "sl2-decompose"}, {"jordan", t.jordan.to_string()}};
  out["decomposition"] = to_json(*dec);
  out["verification"] = verification_json(v, ok);
  return ok ? 0 : kExitVerification;
}

template <FieldScalar S>
int cmd_cohom(const Opts& o, Json& out) {
  auto t = build_triple<S>(jordan_of(o));
  Poly<S> f = o.fm.empty() ? Poly<S>(t.dim()) : poly_from_json<S>(read_json(o.fm));
  if (f.dim() != t.dim()) throw PreconditionError("f_m dimension does not match the Jordan type");
  auto z = read_field(t, o.z, o.coordinates);
  auto sol = iterated_solve(t, f, z, o.m);
  Window<S> w(t, o.m + 1, 2 * o.m);
  auto q = w.im_matrix([&](const VectorField<S>& v) { return apply_Q1(w, f, v) - apply_Q2(w, f, v); });
  auto alpha = nilpotency_index(q);
  Verification v;
  v.backend = ScalarTraits<S>::name;
  v.checks.push_back(zero_check("equation_residual", sol.residual, rnorm(z, Rational(1)).value));
  v.checks.push_back({"Q_nilpotent", alpha.has_value(), 0});
  bool ok = true;
  out = Json{{"command", "cohom-solve"},
             {"jordan", t.jordan.to_string()},
             {"m", o.m},
             {"window", {w.lo(), w.hi()}},
             {"U", to_json(sol.U)},
             {"V", to_json(sol.V)},
             {"neumann_terms", sol.neumann_terms},
             {"nilpotency_index", alpha ? static_cast<long>(*alpha) : -1}};
  out["verification"] = verification_json(v, ok);
  return ok ? 0 : kExitVerification;
}

template <FieldScalar S>
Json poly_list(const std::vector<Poly<S>>& ps) {
  Json a = Json::array();
  for (const auto& p : ps) a.push_back(to_json(p));
  return a;
}

template <FieldScalar S>
int cmd_first_integrals(const Opts& o, Json& out) {
  bool ok = true;
  Verification v;
  v.backend = ScalarTraits<S>::name;
  if (!o.field.empty()) {
    auto f = vfield_from_json<S>(read_json(o.field));
    auto fi = first_integrals_of_field(f, o.cap, o.margin);
    bool annihilated = true;
    for (const auto& p : fi.basis)
      if (!f.apply(p).truncate(o.cap).is_zero()) annihilated = false;
    v.checks.push_back({"jet_annihilated", annihilated, 0});
    out = Json{{"command", "first-integrals"},
               {"source", "field"},
               {"cap", fi.cap},
               {"convention", "f in P_{<=cap+margin}, f(0)=0, J^{cap+margin}(V(f)) = 0; reported as J^cap f"},
               {"margin", fi.margin},
               {"basis", poly_list(fi.basis)}};
  } else {
    auto t = build_triple<S>(jordan_of(o));
    auto fi = first_integrals(t, o.cap);
    Json dims = Json::array();
    bool annihilated = true;
    for (const auto& d : fi.by_degree) {
      dims.push_back(d.size());
      for (const auto& p : d)
        if (!is_joint_invariant(t, p)) annihilated = false;
    }
    v.checks.push_back({"joint_invariance", annihilated, 0});
    out = Json{{"command", "first-integrals"},
               {"source", "jordan"},
               {"jordan", t.jordan.to_string()},
               {"cap", fi.cap},
               {"dims_by_degree", dims},
               {"basis", poly_list(fi.all())}};
  }
  out["verification"] = verification_json(v, ok);
  return ok ? 0 : kExitVerification;
}

template <FieldScalar S>
int cmd_check_condition(const Opts& o, Json& out) {
  auto t = build_triple<S>(jordan_of(o));
  auto nf = read_field(t, o.input, o.coordinates);
  int cap = o.cap > 0 ? o.cap : std::max(1, nf.degree());
  auto c = check_condition(t, nf, cap);
  out = Json{{"command", "check-condition"}, {"jordan", t.jordan.to_string()}, {"cap", cap}};
  out["condition"] = condition_json(c);
  return 0;
}

template <FieldScalar S>
int cmd_bounds(const Opts& o, Json& out) {
  auto t = build_triple<S>(jordan_of(o));
  Poly<S> f = o.fm.empty() ? Poly<S>(t.dim()) : poly_from_json<S>(read_json(o.fm));
  if (f.dim() != t.dim()) throw PreconditionError("f_m dimension does not match the Jordan type");
  Rational r = radius_of(o.r);
  Window<S> w(t, o.m + 1, 2 * o.m);
  auto b = operator_bounds(w, f, r);
  auto scan = scan_q1_factor(o.lambda_max);
  auto sc = schedule_constants(t, b.c0_measured);
  auto dc = solver_constant(t);
  Verification v;
  v.backend = ScalarTraits<S>::name;
  v.checks.push_back({"q1_factor_scan_bounded", scan.bounded_by_six, 0});
  v.checks.push_back({"q1_realized_factors_bounded", b.scalar_factor_bounded, 0});
  v.checks.push_back({"q1_spectral_within_bound", b.q1_within_bound, 0});
  bool ok = true;
  out = Json{{"command", "bounds"},
             {"jordan", t.jordan.to_string()},
             {"window", {w.lo(), w.hi()}},
             {"r", o.r},
             {"q1_bound", b.q1_bound},
             {"q2_bound", b.q2_bound},
             {"q1_spectral", b.q1_spectral},
             {"q2_spectral", b.q2_spectral},
             {"c0_measured", b.c0_measured},
             {"f_norm", b.f_norm},
             {"f_rnorm", b.f_rnorm},
             {"grad_rnorm", b.grad_rnorm},
             {"scalar_factor_max", b.scalar_factor_max},
             {"q1_factor_scan",
              {{"lambda_max", o.lambda_max},
               {"max_factor_sq", scan.max_factor_sq.get_str()},
               {"argmax", {scan.argmax_lambda, scan.argmax_n}}}},
             {"solver_constant", {{"d", dc.d}, {"derivative_part", dc.derivative_part}, {"linear_part", dc.linear_part}}},
             {"schedule", {{"c", sc.c}, {"eta", sc.eta}, {"linear_max", sc.linear_max}}}};
  out["verification"] = verification_json(v, ok);
  return ok ? 0 : kExitVerification;
}

int cmd_radii(const Opts& o, Json& out) {
  double d = o.d;
  if (d <= 0) {
    if (o.jordan.empty()) throw ParseError("radii: give --d or --jordan");
    d = solver_constant(build_triple<double>(jordan_of(o))).d;
  }
  auto rep = radii_sequence(o.r, o.kmax, d);
  Json R = Json::array();
  for (auto x : rep.R) R.push_back(static_cast<double>(x));
  Json gaps = Json::array();
  for (std::size_t i = 1; i < rep.series_log.size(); ++i)
    gaps.push_back({static_cast<double>(rep.series_log[i] - rep.series_log[i - 1]),
                    static_cast<double>(rep.series_geom[i] - rep.series_geom[i - 1]),
                    static_cast<double>(rep.series_lin[i] - rep.series_lin[i - 1])});
  Verification v;
  v.backend = "float";
  v.checks.push_back({"m1_found", rep.m1 >= 0, 0});
  // The tail bound is only checkable when the sequence reaches past m1.
  bool tail_checked = rep.m1 >= 0 && rep.m1 < rep.kmax;
  if (tail_checked) v.checks.push_back({"tail_bounded_below", rep.tail_verified, 0});
  v.checks.push_back({"limit_positive", rep.limit > 0, 0});
  bool ok = true;
  out = Json{{"command", "radii"},
             {"r0", rep.r0},
             {"d", rep.d},
             {"kmax", rep.kmax},
             {"R", R},
             {"m1", rep.m1},
             {"limit", static_cast<double>(rep.limit)},
             {"series_gaps", gaps},
             {"m0", rep.m0},
             {"tail_checked", tail_checked},
             {"tail_verified", rep.tail_verified}};
  out["verification"] = verification_json(v, ok);
  return ok ? 0 : kExitVerification;
}

template <FieldScalar S>
int dispatch(const std::string& cmd, const Opts& o, Json& out) {
  if (cmd == "normalize") return cmd_normalize<S>(o, out);
  if (cmd == "newton-step") return cmd_newton_step<S>(o, out);
  if (cmd == "sl2-decompose") return cmd_decompose<S>(o, out);
  if (cmd == "cohom-solve") return cmd_cohom<S>(o, out);
  if (cmd == "first-integrals") return cmd_first_integrals<S>(o, out);
  if (cmd == "check-condition") return cmd_check_condition<S>(o, out);
  if (cmd == "bounds") return cmd_bounds<S>(o, out);
  if (cmd == "radii") return cmd_radii(o, out);
  throw ParseError("unknown subcommand " + cmd);
}

void print_text(const Json& j, int indent = 0) {
  std::string pad(static_cast<std::size_t>(indent), ' ');
  for (const auto& [k, v] : j.items()) {
    if (v.is_object() && !v.contains("terms") && !v.contains("components")) {
      std::cout << pad << k << ":\n";
      print_text(v, indent + 2);
    } else {
      std::cout << pad << k << ": " << v.dump() << "\n";
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Normal forms of perturbations of regular nilpotent vector fields"};
  app.require_subcommand(0, 1);
  app.fallthrough();
  Common common;
  Opts o;
  app.add_option("--mode", common.mode, "exact or float")->check(CLI::IsMember({"exact", "float"}));
  app.add_option("--tol", common.tol, "zero tolerance in float mode")->check(CLI::PositiveNumber);
  app.add_option("--format", common.format, "json or text")->check(CLI::IsMember({"json", "text"}));

  auto jordan = [&](CLI::App* s, bool required = true) {
    auto* opt = s->add_option("--jordan", o.jordan, "Jordan block sizes, e.g. 3 or 3,2");
    if (required) opt->required();
  };
  auto coords = [&](CLI::App* s) {
    s->add_option("--coordinates", o.coordinates, "input coordinates: scaled (triple) or jordan (unit superdiagonal)")
        ->check(CLI::IsMember({"scaled", "jordan"}));
  };

  auto* norm = app.add_subcommand("normalize", "normalize a perturbation of N");
  jordan(norm);
  coords(norm);
  norm->add_option("--input", o.input, "vector field JSON (- for stdin)")->required();
  norm->add_option("--order", o.order, "normalization order")->check(CLI::PositiveNumber);
  norm->add_option("--remainder-order", o.remainder_order, "degreewise: keep conjugated terms up to this degree");
  norm->add_option("--driver", o.driver)->check(CLI::IsMember({"degreewise", "newton"}));
  norm->add_flag("--require-good-form", o.require_good_form);

  auto* step = app.add_subcommand("newton-step", "one doubling step NF_m + R -> NF_2m + R'");
  jordan(step);
  coords(step);
  step->add_option("--nf", o.nf, "NF_m JSON")->required();
  step->add_option("--remainder", o.remainder, "remainder JSON");
  step->add_option("--m", o.m)->required()->check(CLI::PositiveNumber);
  step->add_option("--order", o.order, "global truncation order (default 2m)");
  step->add_option("--r", o.r, "radius for the schedule diagnostics");
  step->add_flag("--require-good-form", o.require_good_form);

  auto* dec = app.add_subcommand("sl2-decompose", "chain decomposition of a homogeneous slice");
  jordan(dec);
  dec->add_option("--space", o.space)->check(CLI::IsMember({"vf", "poly"}));
  dec->add_option("--degree", o.degree)->required();

  auto* coh = app.add_subcommand("cohom-solve", "iterated cohomological equation on [m+1, 2m]");
  jordan(coh);
  coords(coh);
  coh->add_option("--m", o.m)->required()->check(CLI::PositiveNumber);
  coh->add_option("--fm", o.fm, "joint invariant f_m JSON (default 0)");
  coh->add_option("--z", o.z, "right-hand side JSON")->required();

  auto* fi = app.add_subcommand("first-integrals", "polynomial first integrals up to a degree cap");
  jordan(fi, false);
  fi->add_option("--field", o.field, "vector field JSON (instead of --jordan)");
  fi->add_option("--cap", o.cap)->check(CLI::PositiveNumber);
  fi->add_option("--margin", o.margin, "extra degrees checked beyond the cap (default: cap)");

  auto* cc = app.add_subcommand("check-condition", "is NF = N + f N* with f a joint invariant?");
  jordan(cc);
  coords(cc);
  cc->add_option("--input", o.input, "normal form JSON")->required();
  cc->add_option("--cap", o.cap, "degree cap (default deg NF)");
  o.cap = 6;

  auto* rad = app.add_subcommand("radii", "radii sequence of the convergence argument");
  rad->add_option("--r", o.r, "initial radius in (1/2, 1]");
  rad->add_option("--d", o.d, "solver constant (default: computed from --jordan)");
  jordan(rad, false);
  rad->add_option("--kmax", o.kmax);

  auto* bnd = app.add_subcommand("bounds", "Q1/Q2 operator bounds and schedule constants");
  jordan(bnd);
  bnd->add_option("--fm", o.fm, "joint invariant f_m JSON (default 0)");
  bnd->add_option("--m", o.m)->check(CLI::PositiveNumber);
  bnd->add_option("--r", o.r);
  bnd->add_option("--lambda-max", o.lambda_max)->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kExitParse;
  }
  if (app.get_subcommands().empty()) {
    std::cerr << app.help();
    return kExitParse;
  }
  if (cc->parsed() && cc->count("--cap") == 0) o.cap = 0;
  std::string cmd = app.get_subcommands().front()->get_name();
  if (fi->parsed() && o.field.empty() == o.jordan.empty()) {
    std::cerr << "first-integrals: give exactly one of --jordan and --field\n";
    return kExitParse;
  }

  set_float_tolerance(common.tol);
  Json out;
  int rc = 0;
  try {
    rc = common.mode == "exact" ? dispatch<RadScalar>(cmd, o, out) : dispatch<double>(cmd, o, out);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const Json::exception& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const PreconditionError& e) {
    std::cerr << "precondition failed: " << e.what() << "\n";
    return kExitPrecondition;
  } catch (const VerificationError& e) {
    std::cerr << "verification failed: " << e.what() << "\n";
    return kExitVerification;
  }
  out["mode"] = common.mode;
  if (common.format == "json")
    std::cout << out.dump(2) << "\n";
  else
    print_text(out);
  if (rc == kExitVerification) std::cerr << "verification failed\n";
  return rc;
}
