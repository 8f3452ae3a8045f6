#include <cstdlib>
#include <stdexcept>
#include <string>

#include "dbandit/simd/kernels.hpp"

namespace dbandit::simd {

namespace {

bool cpu_has_avx2() noexcept {
#if defined(DBANDIT_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

bool force_scalar() noexcept {
  const char* v = std::getenv("DBANDIT_FORCE_SCALAR");
  return v != nullptr && *v != '\0' && std::string(v) != "0";
}

void require(Isa isa) {
  if (!isa_available(isa))
    throw std::invalid_argument("SIMD variant '" + std::string(to_string(isa)) + "' is not available");
}

}  // namespace

std::string_view to_string(Isa isa) noexcept {
  switch (isa) {
    case Isa::kScalar: return "scalar";
    case Isa::kAvx2: return "avx2";
    case Isa::kNeon: return "neon";
  }
  return "unknown";
}

bool isa_available(Isa isa) noexcept {
  switch (isa) {
    case Isa::kScalar: return true;
    case Isa::kAvx2: return cpu_has_avx2();
    case Isa::kNeon:
#if defined(DBANDIT_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Isa best_isa() noexcept {
  static const Isa chosen = [] {
    if (force_scalar()) return Isa::kScalar;
    if (isa_available(Isa::kAvx2)) return Isa::kAvx2;
    if (isa_available(Isa::kNeon)) return Isa::kNeon;
    return Isa::kScalar;
  }();
  return chosen;
}

void column_mean_stderr(std::span<const double> matrix, std::size_t rows, std::span<double> mean,
                        std::span<double> stderr_out, Isa isa) {
  if (rows == 0) throw std::invalid_argument("column_mean_stderr: no rows");
  const std::size_t cols = mean.size();
  if (stderr_out.size() != cols || matrix.size() != rows * cols)
    throw std::invalid_argument("column_mean_stderr: shape mismatch");
  require(isa);
  switch (isa) {
#if defined(DBANDIT_HAVE_AVX2)
    case Isa::kAvx2:
      return avx2::column_mean_stderr(matrix.data(), rows, cols, mean.data(), stderr_out.data());
#endif
#if defined(DBANDIT_HAVE_NEON)
    case Isa::kNeon:
      return neon::column_mean_stderr(matrix.data(), rows, cols, mean.data(), stderr_out.data());
#endif
    default:
      return scalar::column_mean_stderr(matrix.data(), rows, cols, mean.data(), stderr_out.data());
  }
}

void column_mean_stderr(std::span<const double> matrix, std::size_t rows, std::span<double> mean,
                        std::span<double> stderr_out) {
  column_mean_stderr(matrix, rows, mean, stderr_out, best_isa());
}

std::size_t count_at_most(std::span<const std::int64_t> values, std::int64_t threshold, Isa isa) {
  require(isa);
  switch (isa) {
#if defined(DBANDIT_HAVE_AVX2)
    case Isa::kAvx2: return avx2::count_at_most(values.data(), values.size(), threshold);
#endif
#if defined(DBANDIT_HAVE_NEON)
    case Isa::kNeon: return neon::count_at_most(values.data(), values.size(), threshold);
#endif
    default: return scalar::count_at_most(values.data(), values.size(), threshold);
  }
}

std::size_t count_at_most(std::span<const std::int64_t> values, std::int64_t threshold) {
  return count_at_most(values, threshold, best_isa());
}

}  // namespace dbandit::simd
