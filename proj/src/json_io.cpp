#include "nilnf/json_io.hpp"

namespace nilnf {

namespace {

Integer parse_integer(const Json& j, const char* what) {
  if (j.is_number_integer()) return Integer(j.get<long>());
  if (j.is_string()) {
    Integer z;
    if (z.set_str(j.get<std::string>(), 10) != 0) throw ParseError(std::string("scalar: bad integer in ") + what);
    return z;
  }
  throw ParseError(std::string("scalar: ") + what + " must be an integer or decimal string");
}

Rational parse_rational_string(const std::string& s) {
  Rational q;
  if (s.empty() || q.set_str(s, 10) != 0) throw ParseError("scalar: bad rational string '" + s + "'");
  if (q.get_den() == 0) throw ParseError("scalar: zero denominator");
  q.canonicalize();
  return q;
}

}  // namespace

Json to_json(const RadScalar& x) {
  Json terms = Json::array();
  for (const auto& t : x.terms())
    terms.push_back(Json{{"rad", t.radicand}, {"num", t.coeff.get_num().get_str()}, {"den", t.coeff.get_den().get_str()}});
  return Json{{"terms", terms}};
}

RadScalar rad_from_json(const Json& j) {
  if (j.is_number_integer()) return RadScalar(Rational(j.get<long>()));
  if (j.is_string()) return RadScalar(parse_rational_string(j.get<std::string>()));
  if (j.is_number_float()) throw ParseError("scalar: floating-point literal not allowed in exact mode");
  if (!j.is_object() || !j.contains("terms") || !j.at("terms").is_array())
    throw ParseError("scalar: expected {\"terms\": [...]}");
  std::vector<RadScalar::Term> terms;
  for (const auto& t : j.at("terms")) {
    if (!t.contains("rad") || !t.contains("num")) throw ParseError("scalar: term needs rad and num");
    long rad = t.at("rad").get<long>();
    if (rad < 1) throw ParseError("scalar: radicand must be >= 1");
    Integer num = parse_integer(t.at("num"), "num");
    Integer den = t.contains("den") ? parse_integer(t.at("den"), "den") : Integer(1);
    if (den == 0) throw ParseError("scalar: zero denominator");
    Rational q(num, den);
    q.canonicalize();
    // Radicands need not be square-free on input.
    RadicalForm f = reduce_radical(static_cast<std::uint64_t>(rad));
    terms.push_back({f.radicand, q * Rational(Integer(static_cast<unsigned long>(f.factor)))});
  }
  return RadScalar::from_terms(std::move(terms));
}

Json scalar_to_json(const RadScalar& x) { return to_json(x); }
Json scalar_to_json(double x) { return x; }

template <>
RadScalar scalar_from_json<RadScalar>(const Json& j) {
  return rad_from_json(j);
}

template <>
double scalar_from_json<double>(const Json& j) {
  if (j.is_number()) return j.get<double>();
  return rad_from_json(j).to_double();
}

Json to_json(const Verification& v) {
  Json checks = Json::array();
  for (const auto& c : v.checks) checks.push_back(Json{{"name", c.name}, {"ok", c.ok}, {"residual", c.magnitude}});
  return Json{{"backend", v.backend}, {"status", v.status()}, {"checks", checks}};
}

}  // namespace nilnf
