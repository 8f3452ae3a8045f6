#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

// Data-parallel inner loops of the harness with one scalar reference
// implementation and vector variants selected at runtime. The vector
// variants vectorise across independent columns/elements and keep the
// scalar operation order inside each lane, so their results are bitwise
// identical to the scalar reference.

namespace dbandit::simd {

enum class Isa { kScalar, kAvx2, kNeon };

std::string_view to_string(Isa isa) noexcept;

// Compiled in and supported by the running CPU.
bool isa_available(Isa isa) noexcept;

// Widest available ISA. DBANDIT_FORCE_SCALAR=1 in the environment pins the
// scalar reference.
Isa best_isa() noexcept;

// Per-column mean and standard error (sample stddev / sqrt(rows)) of a
// row-major rows x cols matrix. With one row the standard error is 0.
void column_mean_stderr(std::span<const double> matrix, std::size_t rows,
                        std::span<double> mean, std::span<double> stderr_out, Isa isa);
void column_mean_stderr(std::span<const double> matrix, std::size_t rows,
                        std::span<double> mean, std::span<double> stderr_out);

// Number of values <= threshold.
std::size_t count_at_most(std::span<const std::int64_t> values, std::int64_t threshold, Isa isa);
std::size_t count_at_most(std::span<const std::int64_t> values, std::int64_t threshold);

namespace scalar {
void column_mean_stderr(const double* matrix, std::size_t rows, std::size_t cols, double* mean,
                        double* stderr_out);
std::size_t count_at_most(const std::int64_t* values, std::size_t n, std::int64_t threshold);
}  // namespace scalar

namespace avx2 {
void column_mean_stderr(const double* matrix, std::size_t rows, std::size_t cols, double* mean,
                        double* stderr_out);
std::size_t count_at_most(const std::int64_t* values, std::size_t n, std::int64_t threshold);
}  // namespace avx2

namespace neon {
void column_mean_stderr(const double* matrix, std::size_t rows, std::size_t cols, double* mean,
                        double* stderr_out);
std::size_t count_at_most(const std::int64_t* values, std::size_t n, std::int64_t threshold);
}  // namespace neon

}  // namespace dbandit::simd
