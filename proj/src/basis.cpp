#include "nilnf/basis.hpp"

#include <map>
#include <memory>
#include <mutex>

namespace nilnf {

std::string Multidegree::to_string(const std::vector<std::string>& names) const {
  std::string s;
  for (int i = 0; i < n_; ++i) {
    int e = (*this)[i];
    if (e == 0) continue;
    if (!s.empty()) s += "*";
    s += names[static_cast<std::size_t>(i)];
    if (e > 1) s += "^" + std::to_string(e);
  }
  return s.empty() ? "1" : s;
}

std::vector<std::string> variable_names(int n) {
  static const char* kShort[] = {"x", "y", "z", "w"};
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i) out.push_back(n <= 4 ? kShort[i] : "x" + std::to_string(i + 1));
  return out;
}

namespace {

void enumerate(int n, int k, int pos, Multidegree& cur, std::vector<Multidegree>& out) {
  if (pos == n - 1) {
    cur.set(pos, k);
    out.push_back(cur);
    cur.set(pos, 0);
    return;
  }
  for (int e = k; e >= 0; --e) {
    cur.set(pos, e);
    enumerate(n, k - e, pos + 1, cur, out);
  }
  cur.set(pos, 0);
}

}  // namespace

const std::vector<Multidegree>& monomial_basis(int n, int k) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::unique_ptr<std::vector<Multidegree>>> cache;
  if (n < 1 || n > kMaxVariables || k < 0) throw std::invalid_argument("monomial_basis: bad (n, k)");
  std::lock_guard lock(mu);
  auto& slot = cache[{n, k}];
  if (!slot) {
    slot = std::make_unique<std::vector<Multidegree>>();
    Multidegree cur(n);
    enumerate(n, k, 0, cur, *slot);
  }
  return *slot;
}

std::size_t monomial_index(const Multidegree& m) {
  const auto& basis = monomial_basis(m.size(), m.degree());
  auto it = std::lower_bound(basis.begin(), basis.end(), m);
  return static_cast<std::size_t>(it - basis.begin());
}

std::size_t slice_dimension(int n, int k) { return monomial_basis(n, k).size(); }

}  // namespace nilnf
