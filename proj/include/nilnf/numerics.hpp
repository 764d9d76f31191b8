#pragma once

#include <cstddef>
#include <vector>

namespace nilnf {

// Largest singular value of a rows x cols row-major matrix.
double spectral_norm(const std::vector<double>& a, std::size_t rows, std::size_t cols);

}  // namespace nilnf
