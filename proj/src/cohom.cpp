#include "nilnf/cohom.hpp"

namespace nilnf {

Q1FactorScan scan_q1_factor(int lambda_max) {
  Q1FactorScan s;
  s.max_factor_sq = 0;
  for (int lambda = 3; lambda <= lambda_max; ++lambda)
    for (int n = 3; n <= lambda; ++n) {
      Rational q = q1_factor_sq(lambda, n);
      if (q > s.max_factor_sq) {
        s.max_factor_sq = q;
        s.argmax_lambda = lambda;
        s.argmax_n = n;
      }
    }
  s.bounded_by_six = s.max_factor_sq <= 36;
  return s;
}

}  // namespace nilnf
