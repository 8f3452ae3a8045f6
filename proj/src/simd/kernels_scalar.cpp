#include <cmath>

#include "dbandit/simd/kernels.hpp"

namespace dbandit::simd::scalar {

void column_mean_stderr(const double* matrix, std::size_t rows, std::size_t cols, double* mean,
                        double* stderr_out) {
  const auto n = static_cast<double>(rows);
  const double root_n = std::sqrt(n);
  const double dof = rows > 1 ? static_cast<double>(rows - 1) : 1.0;
  for (std::size_t c = 0; c < cols; ++c) {
    double sum = 0.0;
    for (std::size_t r = 0; r < rows; ++r) sum = sum + matrix[r * cols + c];
    const double m = sum / n;

    double ss = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
      const double dev = matrix[r * cols + c] - m;
      ss = ss + dev * dev;
    }
    mean[c] = m;
    stderr_out[c] = rows > 1 ? std::sqrt(ss / dof) / root_n : 0.0;
  }
}

std::size_t count_at_most(const std::int64_t* values, std::size_t n, std::int64_t threshold) {
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i) count += values[i] <= threshold ? 1 : 0;
  return count;
}

}  // namespace dbandit::simd::scalar
