#include <bit>
#include <cmath>
#include <cstring>
#include <limits>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "dbandit/rng.hpp"
#include "dbandit/simd/kernels.hpp"

using namespace dbandit;
using dbandit::simd::Isa;

namespace {

std::vector<Isa> vector_isas() {
  std::vector<Isa> out;
  for (Isa isa : {Isa::kAvx2, Isa::kNeon})
    if (simd::isa_available(isa)) out.push_back(isa);
  return out;
}

bool bitwise_equal(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

// Cumulative-regret-like rows: nondecreasing with random increments.
std::vector<double> random_traces(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_real_distribution<double> u(0.0, 0.5);
  std::vector<double> m(rows * cols);
  for (std::size_t r = 0; r < rows; ++r) {
    double acc = 0.0;
    for (std::size_t c = 0; c < cols; ++c) m[r * cols + c] = acc += (u(rng) < 0.2 ? u(rng) : 0.0);
  }
  return m;
}

}  // namespace

TEST_CASE("dispatch reports a usable isa") {
  CHECK(simd::isa_available(Isa::kScalar));
  CHECK(simd::isa_available(simd::best_isa()));
  MESSAGE("best isa: " << simd::to_string(simd::best_isa()));
}

TEST_CASE("column statistics: scalar reference against a direct computation") {
  const std::vector<double> m{1, 2, 3,  //
                              3, 2, 7,  //
                              5, 2, 8};
  std::vector<double> mean(3), se(3);
  simd::column_mean_stderr(m, 3, mean, se, Isa::kScalar);
  CHECK(mean == std::vector<double>{3.0, 2.0, 6.0});
  CHECK(se[0] == doctest::Approx(2.0 / std::sqrt(3.0)));
  CHECK(se[1] == 0.0);
  CHECK(se[2] == doctest::Approx(std::sqrt(7.0) / std::sqrt(3.0)));

  std::vector<double> one_mean(3), one_se(3);
  simd::column_mean_stderr(std::span(m).first(3), 1, one_mean, one_se, Isa::kScalar);
  CHECK(one_se == std::vector<double>{0.0, 0.0, 0.0});
}

TEST_CASE("vector column statistics are bitwise identical to scalar") {
  for (Isa isa : vector_isas()) {
    for (std::size_t rows : {1u, 2u, 7u, 30u, 100u}) {
      for (std::size_t cols : {1u, 3u, 4u, 15u, 16u, 17u, 33u, 1001u}) {
        const auto m = random_traces(rows, cols, rows * 1000 + cols);
        std::vector<double> ms(cols), ss(cols), mv(cols), sv(cols);
        simd::column_mean_stderr(m, rows, ms, ss, Isa::kScalar);
        simd::column_mean_stderr(m, rows, mv, sv, isa);
        CAPTURE(simd::to_string(isa));
        CAPTURE(rows);
        CAPTURE(cols);
        CHECK(bitwise_equal(ms, mv));
        CHECK(bitwise_equal(ss, sv));
      }
    }
  }
}

TEST_CASE("count_at_most agrees across variants") {
  Rng rng(8);
  std::uniform_int_distribution<std::int64_t> u(-50, 400);
  for (std::size_t n : {0u, 1u, 7u, 8u, 9u, 1000u, 100003u}) {
    std::vector<std::int64_t> v(n);
    for (auto& x : v) x = u(rng);
    if (n > 3) v[2] = std::numeric_limits<std::int64_t>::max();  // infinite-delay sentinel
    for (std::int64_t t : {std::int64_t{-100}, std::int64_t{0}, std::int64_t{68}, std::int64_t{400},
                           std::numeric_limits<std::int64_t>::max() - 1}) {
      std::size_t oracle = 0;
      for (auto x : v) oracle += x <= t;
      CHECK(simd::count_at_most(v, t, Isa::kScalar) == oracle);
      for (Isa isa : vector_isas()) CHECK(simd::count_at_most(v, t, isa) == oracle);
    }
  }
}

TEST_CASE("shape errors and unavailable isas are rejected") {
  std::vector<double> m(6), mean(4), se(4);
  CHECK_THROWS_AS(simd::column_mean_stderr(m, 2, mean, se, Isa::kScalar), std::invalid_argument);
  CHECK_THROWS_AS(simd::column_mean_stderr(m, 0, mean, se, Isa::kScalar), std::invalid_argument);
  for (Isa isa : {Isa::kAvx2, Isa::kNeon}) {
    if (!simd::isa_available(isa)) {
      std::vector<std::int64_t> v{1};
      CHECK_THROWS_AS(simd::count_at_most(v, 0, isa), std::invalid_argument);
    }
  }
}
