// AArch64 only; Advanced SIMD is part of the base ISA there.
#include <arm_neon.h>

#include <cmath>

#include "dbandit/simd/kernels.hpp"

namespace dbandit::simd::neon {

void column_mean_stderr(const double* matrix, std::size_t rows, std::size_t cols, double* mean,
                        double* stderr_out) {
  const auto n = static_cast<double>(rows);
  const double root_n = std::sqrt(n);
  const double dof = rows > 1 ? static_cast<double>(rows - 1) : 1.0;
  const float64x2_t vn = vdupq_n_f64(n);
  const float64x2_t vroot_n = vdupq_n_f64(root_n);
  const float64x2_t vdof = vdupq_n_f64(dof);

  std::size_t c = 0;
  for (; c + 4 <= cols; c += 4) {
    float64x2_t s0 = vdupq_n_f64(0.0), s1 = s0;
    for (std::size_t r = 0; r < rows; ++r) {
      const double* row = matrix + r * cols + c;
      s0 = vaddq_f64(s0, vld1q_f64(row));
      s1 = vaddq_f64(s1, vld1q_f64(row + 2));
    }
    const float64x2_t m0 = vdivq_f64(s0, vn), m1 = vdivq_f64(s1, vn);
    float64x2_t q0 = vdupq_n_f64(0.0), q1 = q0;
    for (std::size_t r = 0; r < rows; ++r) {
      const double* row = matrix + r * cols + c;
      const float64x2_t d0 = vsubq_f64(vld1q_f64(row), m0);
      const float64x2_t d1 = vsubq_f64(vld1q_f64(row + 2), m1);
      // Separate multiply and add; a fused vfmaq would change rounding.
      q0 = vaddq_f64(q0, vmulq_f64(d0, d0));
      q1 = vaddq_f64(q1, vmulq_f64(d1, d1));
    }
    vst1q_f64(mean + c, m0);
    vst1q_f64(mean + c + 2, m1);
    if (rows > 1) {
      vst1q_f64(stderr_out + c, vdivq_f64(vsqrtq_f64(vdivq_f64(q0, vdof)), vroot_n));
      vst1q_f64(stderr_out + c + 2, vdivq_f64(vsqrtq_f64(vdivq_f64(q1, vdof)), vroot_n));
    } else {
      for (std::size_t k = 0; k < 4; ++k) stderr_out[c + k] = 0.0;
    }
  }
  for (; c < cols; ++c) {
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
  const int64x2_t vt = vdupq_n_s64(threshold);
  uint64x2_t acc = vdupq_n_u64(0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    // vcleq yields all-ones lanes; shift down to 0/1 before accumulating.
    acc = vaddq_u64(acc, vshrq_n_u64(vcleq_s64(vld1q_s64(values + i), vt), 63));
  }
  auto count = static_cast<std::size_t>(vgetq_lane_u64(acc, 0) + vgetq_lane_u64(acc, 1));
  for (; i < n; ++i) count += values[i] <= threshold ? 1 : 0;
  return count;
}

}  // namespace dbandit::simd::neon
