#include "nilnf/normalform.hpp"

#include <cmath>

namespace nilnf {

bool Verification::all_ok() const {
  for (const auto& c : checks)
    if (!c.ok) return false;
  return true;
}

std::string Verification::status() const {
  if (!all_ok()) return "failed";
  if (backend == "exact") return "exact-zero";
  for (const auto& c : checks)
    if (c.magnitude != 0) return "within-tolerance";
  return "exact-zero";
}

SchedulePoint schedule_point(int m, double r, double d) {
  SchedulePoint p;
  p.m = m;
  p.r = r;
  double md = static_cast<double>(m);
  double gamma = std::pow(2 * md * d, -1.0 / md);
  p.rho = std::pow(md, -2.0 / md) * r;
  p.R = gamma * std::pow(md, -4.0 / md) * r;
  p.ordered = p.rho < p.R && p.R < p.r && p.r <= 1;
  return p;
}

namespace {

// ln(gamma_i (2^i)^(-2^(1-i))) = -(ln(2^(i+1) d) + 2 i ln 2) / 2^i.
long double log_factor(int i, long double d) {
  long double m = std::ldexp(1.0L, i);
  return -(std::log(2 * m * d) + 2 * i * std::log(2.0L)) / m;
}

}  // namespace

RadiiReport radii_sequence(double r0, int kmax, double d) {
  if (!(r0 > 0.5 && r0 <= 1)) throw PreconditionError("radii: need 1/2 < r <= 1");
  if (!(d > 0)) throw PreconditionError("radii: need d > 0");
  if (kmax < 1 || kmax > 60) throw PreconditionError("radii: need 1 <= kmax <= 60");
  RadiiReport rep;
  rep.r0 = r0;
  rep.d = d;
  rep.kmax = kmax;
  long double ld = d;
  rep.R.push_back(r0);
  for (int k = 0; k < kmax; ++k) rep.R.push_back(rep.R.back() * std::exp(log_factor(k, ld)));

  // Factors decay like i/2^i; beyond this index they are below 1e-19.
  const int horizon = 80;
  std::vector<long double> logs(horizon);
  for (int i = 0; i < horizon; ++i) logs[i] = log_factor(i, ld);
  long double total = 0;
  for (int i = 0; i < horizon; ++i) total += logs[i];
  rep.limit = r0 * std::exp(total);

  // m1: least index whose every partial product from m1 on exceeds 1/2.
  for (int m1 = 0; m1 < horizon && rep.m1 < 0; ++m1) {
    long double acc = 0, worst = 0;
    for (int i = m1; i < horizon; ++i) {
      acc += logs[i];
      worst = std::min(worst, acc);
    }
    if (worst > std::log(0.5L)) rep.m1 = m1;
  }
  if (rep.m1 >= 0 && rep.m1 <= kmax) {
    rep.tail_verified = true;
    for (int k = rep.m1 + 1; k <= kmax; ++k)
      if (!(rep.R[k] > rep.R[rep.m1] / 2)) rep.tail_verified = false;
  }

  long double a = 0, b = 0, c = 0;
  for (int i = 0; i <= kmax; ++i) {
    long double p = std::ldexp(1.0L, -i);
    a += std::log(std::ldexp(2.0L, i) * ld) * p;
    b += p;
    c += i * p;
    rep.series_log.push_back(a);
    rep.series_geom.push_back(b);
    rep.series_lin.push_back(c);
  }

  for (int k = 0; k <= kmax && rep.m0 < 0; ++k) {
    int m = 1 << std::min(k, 30);
    if (schedule_point(m, r0, d).ordered) rep.m0 = m;
  }
  return rep;
}

}  // namespace nilnf
