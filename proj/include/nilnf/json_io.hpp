#pragma once

#include <json.hpp>
#include <stdexcept>
#include <string>

#include "nilnf/normalform.hpp"
#include "nilnf/poly.hpp"
#include "nilnf/scalar.hpp"
#include "nilnf/sl2.hpp"
#include "nilnf/vfield.hpp"

namespace nilnf {

using Json = nlohmann::ordered_json;

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// {"terms": [{"rad": d, "num": "..", "den": ".."}]}
Json to_json(const RadScalar& x);
// Accepts the object form, an integer, or a rational string such as "-3/2".
RadScalar rad_from_json(const Json& j);

Json scalar_to_json(const RadScalar& x);
Json scalar_to_json(double x);

template <FieldScalar S>
S scalar_from_json(const Json& j);
template <>
RadScalar scalar_from_json<RadScalar>(const Json& j);
template <>
double scalar_from_json<double>(const Json& j);

template <FieldScalar S>
Json to_json(const Poly<S>& p) {
  Json terms = Json::array();
  for (const auto& [m, c] : p.terms()) {
    Json alpha = Json::array();
    for (int i = 0; i < p.dim(); ++i) alpha.push_back(m[i]);
    terms.push_back(Json{{"alpha", alpha}, {"coeff", scalar_to_json(c)}});
  }
  return Json{{"n", p.dim()}, {"terms", terms}};
}

template <FieldScalar S>
Poly<S> poly_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("n") || !j.contains("terms")) throw ParseError("polynomial: expected {n, terms}");
  int n = j.at("n").get<int>();
  if (n < 1 || n > kMaxVariables) throw ParseError("polynomial: unsupported dimension");
  Poly<S> p(n);
  for (const auto& t : j.at("terms")) {
    const auto& a = t.at("alpha");
    if (!a.is_array() || static_cast<int>(a.size()) != n) throw ParseError("polynomial: alpha length must equal n");
    std::vector<int> e;
    for (const auto& x : a) {
      int v = x.get<int>();
      if (v < 0 || v > 255) throw ParseError("polynomial: exponent out of range");
      e.push_back(v);
    }
    p.add_term(Multidegree::from_vector(e), scalar_from_json<S>(t.at("coeff")));
  }
  return p;
}

template <FieldScalar S>
Json to_json(const VectorField<S>& v) {
  Json comps = Json::array();
  for (const auto& c : v.components()) comps.push_back(to_json(c));
  return Json{{"n", v.dim()}, {"components", comps}};
}

template <FieldScalar S>
VectorField<S> vfield_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("n") || !j.contains("components"))
    throw ParseError("vector field: expected {n, components}");
  int n = j.at("n").get<int>();
  const auto& c = j.at("components");
  if (!c.is_array() || static_cast<int>(c.size()) != n) throw ParseError("vector field: need n components");
  std::vector<Poly<S>> comps;
  for (const auto& p : c) {
    comps.push_back(poly_from_json<S>(p));
    if (comps.back().dim() != n) throw ParseError("vector field: component dimension mismatch");
  }
  return VectorField<S>(std::move(comps));
}

Json to_json(const Verification& v);

template <FieldScalar S>
Json to_json(const ChainDecomposition<S>& d) {
  Json chains = Json::array();
  for (const auto& c : d.chains) {
    Json norms = Json::array();
    for (const auto& x : c.norm_sq) norms.push_back(scalar_to_json(x));
    auto kind = d.basis().kind;
    Json prim;
    if (kind == SliceBasis::Kind::Polynomials)
      prim = to_json(Poly<S>::from_coordinates(d.basis().n, d.basis().degree, c.vectors[0]));
    else
      prim = to_json(VectorField<S>::from_coordinates(d.basis().n, d.basis().degree, c.vectors[0]));
    chains.push_back(Json{{"weight", c.weight}, {"primitive", prim}, {"norm_sq", norms}});
  }
  return Json{{"space", d.basis().kind == SliceBasis::Kind::Polynomials ? "poly" : "vf"},
              {"degree", d.basis().degree},
              {"dim", d.dim()},
              {"chains", chains}};
}

}  // namespace nilnf
