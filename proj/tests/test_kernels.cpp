#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "ergmbf/kernels.hpp"

using namespace ergmbf::kernels;

namespace {

std::vector<double> normals(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z(0.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = z(rng);
  return v;
}

long double dot_ld(const std::vector<double>& a, const std::vector<double>& b, std::size_t n) {
  long double s = 0;
  for (std::size_t i = 0; i < n; ++i) s += static_cast<long double>(a[i]) * b[i];
  return s;
}

long double abs_dot_ld(const std::vector<double>& a, const std::vector<double>& b, std::size_t n) {
  long double s = 0;
  for (std::size_t i = 0; i < n; ++i) s += std::fabs(static_cast<long double>(a[i]) * b[i]);
  return s;
}

std::vector<const KernelTable*> tables() {
  std::vector<const KernelTable*> t{&scalar_table()};
  if (avx2_table() != nullptr) t.push_back(avx2_table());
  return t;
}

}  // namespace

TEST_CASE("reductions agree with an extended-precision sum") {
  for (const KernelTable* table : tables()) {
    CAPTURE(table->name);
    for (std::size_t n : {0, 1, 3, 4, 7, 8, 9, 15, 16, 17, 31, 64, 100, 1023}) {
      CAPTURE(n);
      auto a = normals(n + 1, 1 + n);
      auto b = normals(n + 1, 1000 + n);
      auto w = normals(n + 1, 2000 + n);
      const double scale = static_cast<double>(abs_dot_ld(a, b, n)) + 1e-300;
      CHECK(std::abs(table->dot(a.data(), b.data(), n) - static_cast<double>(dot_ld(a, b, n))) <= 4e-15 * scale * (1.0 + n));

      std::vector<double> ab(n);
      for (std::size_t i = 0; i < n; ++i) ab[i] = a[i] * b[i];
      const double wd = static_cast<double>(dot_ld(ab, w, n));
      const double wscale = static_cast<double>(abs_dot_ld(ab, w, n)) + 1e-300;
      CHECK(std::abs(table->weighted_dot(a.data(), b.data(), w.data(), n) - wd) <= 4e-15 * wscale * (1.0 + n));
    }
  }
}

TEST_CASE("axpy matches the elementwise definition") {
  for (const KernelTable* table : tables()) {
    CAPTURE(table->name);
    for (std::size_t n : {0, 1, 5, 8, 13, 64, 257}) {
      auto x = normals(n, 7 + n);
      auto y = normals(n, 70 + n);
      auto out = y;
      table->axpy(-1.75, x.data(), out.data(), n);
      for (std::size_t i = 0; i < n; ++i) {
        const double want = y[i] + -1.75 * x[i];
        CHECK(std::abs(out[i] - want) <= 4e-16 * (std::abs(y[i]) + std::abs(1.75 * x[i])));
      }
    }
  }
}

TEST_CASE("SIMD variant is equivalent to the scalar reference") {
  const KernelTable* simd = avx2_table();
  if (simd == nullptr) {
    MESSAGE("AVX2 variant unavailable on this machine; skipped");
    return;
  }
  const KernelTable& ref = scalar_table();
  CHECK(active().name == simd->name);
  for (std::size_t n : {1, 2, 5, 8, 33, 500}) {
    auto a = normals(n, n);
    auto b = normals(n, 3 * n + 1);
    auto w = normals(n, 5 * n + 2);
    CHECK(simd->dot(a.data(), b.data(), n) == doctest::Approx(ref.dot(a.data(), b.data(), n)).epsilon(1e-12));
    CHECK(simd->weighted_dot(a.data(), b.data(), w.data(), n) ==
          doctest::Approx(ref.weighted_dot(a.data(), b.data(), w.data(), n)).epsilon(1e-12));
  }
}

TEST_CASE("affine sign masks: SIMD and scalar agree bit for bit") {
  std::vector<const KernelTable*> ts = tables();
  for (std::size_t rows : {1, 2, 5, 17, 64}) {
    for (std::size_t cols : {1, 3, 6}) {
      for (std::size_t n : {1, 3, 4, 7, 64, 4099}) {
        CAPTURE(rows);
        CAPTURE(cols);
        CAPTURE(n);
        auto b = normals(rows * cols, rows * 31 + cols);
        auto off = normals(rows, rows + 99);
        const std::size_t stride = n + 3;
        auto z = normals(cols * stride, n + cols);
        std::vector<std::vector<std::uint64_t>> plus, minus;
        for (const KernelTable* t : ts) {
          plus.emplace_back(n);
          minus.emplace_back(n);
          t->affine_sign_masks(b.data(), off.data(), rows, cols, z.data(), stride, n, plus.back().data(),
                               minus.back().data());
        }
        // Reference definition, independent of either variant.
        for (std::size_t d = 0; d < n; ++d) {
          std::uint64_t mp = 0, mm = 0;
          for (std::size_t r = 0; r < rows; ++r) {
            double lin = 0.0;
            for (std::size_t k = 0; k < cols; ++k) lin = std::fma(b[r * cols + k], z[k * stride + d], lin);
            if (off[r] + lin > 0) mp |= std::uint64_t{1} << r;
            if (off[r] - lin > 0) mm |= std::uint64_t{1} << r;
          }
          for (std::size_t t = 0; t < ts.size(); ++t) {
            if (plus[t][d] != mp || minus[t][d] != mm) {
              FAIL_CHECK("mask mismatch in " << ts[t]->name << " at draw " << d);
              break;
            }
          }
        }
        if (ts.size() == 2) {
          CHECK(plus[0] == plus[1]);
          CHECK(minus[0] == minus[1]);
        }
      }
    }
  }
}
