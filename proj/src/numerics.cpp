#include "nilnf/numerics.hpp"

#include <Eigen/SVD>
#include <stdexcept>

namespace nilnf {

double spectral_norm(const std::vector<double>& a, std::size_t rows, std::size_t cols) {
  if (a.size() != rows * cols) throw std::invalid_argument("spectral_norm: shape mismatch");
  if (rows == 0 || cols == 0) return 0;
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> m(
      a.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues()(0);
}

}  // namespace nilnf
