// Built with -mavx2 (and without FMA contraction); only entered after a
// runtime CPU check.
#include <immintrin.h>

#include <cmath>

#include "dbandit/simd/kernels.hpp"

namespace dbandit::simd::avx2 {

namespace {

constexpr std::size_t kLanes = 4;
constexpr std::size_t kBlock = 4 * kLanes;

void tail_columns(const double* matrix, std::size_t rows, std::size_t cols, std::size_t begin,
                  double* mean, double* stderr_out) {
  const auto n = static_cast<double>(rows);
  const double root_n = std::sqrt(n);
  const double dof = rows > 1 ? static_cast<double>(rows - 1) : 1.0;
  for (std::size_t c = begin; c < cols; ++c) {
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

}  // namespace

void column_mean_stderr(const double* matrix, std::size_t rows, std::size_t cols, double* mean,
                        double* stderr_out) {
  const auto n = static_cast<double>(rows);
  const __m256d vn = _mm256_set1_pd(n);
  const __m256d vroot_n = _mm256_set1_pd(std::sqrt(n));
  const __m256d vdof = _mm256_set1_pd(rows > 1 ? static_cast<double>(rows - 1) : 1.0);

  std::size_t c = 0;
  for (; c + kBlock <= cols; c += kBlock) {
    __m256d s0 = _mm256_setzero_pd(), s1 = s0, s2 = s0, s3 = s0;
    for (std::size_t r = 0; r < rows; ++r) {
      const double* row = matrix + r * cols + c;
      s0 = _mm256_add_pd(s0, _mm256_loadu_pd(row));
      s1 = _mm256_add_pd(s1, _mm256_loadu_pd(row + 4));
      s2 = _mm256_add_pd(s2, _mm256_loadu_pd(row + 8));
      s3 = _mm256_add_pd(s3, _mm256_loadu_pd(row + 12));
    }
    const __m256d m0 = _mm256_div_pd(s0, vn), m1 = _mm256_div_pd(s1, vn);
    const __m256d m2 = _mm256_div_pd(s2, vn), m3 = _mm256_div_pd(s3, vn);

    __m256d q0 = _mm256_setzero_pd(), q1 = q0, q2 = q0, q3 = q0;
    for (std::size_t r = 0; r < rows; ++r) {
      const double* row = matrix + r * cols + c;
      const __m256d d0 = _mm256_sub_pd(_mm256_loadu_pd(row), m0);
      const __m256d d1 = _mm256_sub_pd(_mm256_loadu_pd(row + 4), m1);
      const __m256d d2 = _mm256_sub_pd(_mm256_loadu_pd(row + 8), m2);
      const __m256d d3 = _mm256_sub_pd(_mm256_loadu_pd(row + 12), m3);
      q0 = _mm256_add_pd(q0, _mm256_mul_pd(d0, d0));
      q1 = _mm256_add_pd(q1, _mm256_mul_pd(d1, d1));
      q2 = _mm256_add_pd(q2, _mm256_mul_pd(d2, d2));
      q3 = _mm256_add_pd(q3, _mm256_mul_pd(d3, d3));
    }

    _mm256_storeu_pd(mean + c, m0);
    _mm256_storeu_pd(mean + c + 4, m1);
    _mm256_storeu_pd(mean + c + 8, m2);
    _mm256_storeu_pd(mean + c + 12, m3);
    if (rows > 1) {
      auto se = [&](__m256d q) { return _mm256_div_pd(_mm256_sqrt_pd(_mm256_div_pd(q, vdof)), vroot_n); };
      _mm256_storeu_pd(stderr_out + c, se(q0));
      _mm256_storeu_pd(stderr_out + c + 4, se(q1));
      _mm256_storeu_pd(stderr_out + c + 8, se(q2));
      _mm256_storeu_pd(stderr_out + c + 12, se(q3));
    } else {
      for (std::size_t k = 0; k < kBlock; ++k) stderr_out[c + k] = 0.0;
    }
  }
  tail_columns(matrix, rows, cols, c, mean, stderr_out);
}

std::size_t count_at_most(const std::int64_t* values, std::size_t n, std::int64_t threshold) {
  const __m256i vt = _mm256_set1_epi64x(threshold);
  // Lanes hold 0 or -1 (all ones) per compare; subtracting accumulates counts.
  __m256i acc0 = _mm256_setzero_si256(), acc1 = acc0;
  std::size_t i = 0;
  for (; i + 2 * kLanes <= n; i += 2 * kLanes) {
    const __m256i a = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(values + i));
    const __m256i b = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(values + i + kLanes));
    // value <= t  <=>  !(value > t)
    acc0 = _mm256_sub_epi64(acc0, _mm256_cmpgt_epi64(a, vt));
    acc1 = _mm256_sub_epi64(acc1, _mm256_cmpgt_epi64(b, vt));
  }
  alignas(32) std::int64_t lanes[kLanes];
  _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), _mm256_add_epi64(acc0, acc1));
  const auto greater = static_cast<std::size_t>(lanes[0] + lanes[1] + lanes[2] + lanes[3]);
  std::size_t count = i - greater;
  for (; i < n; ++i) count += values[i] <= threshold ? 1 : 0;
  return count;
}

}  // namespace dbandit::simd::avx2
