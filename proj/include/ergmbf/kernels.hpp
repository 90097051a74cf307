#pragma once

// Data-parallel inner loops with a portable scalar reference and an AVX2/FMA
// variant. The variant is chosen once at runtime; set ERGMBF_FORCE_SCALAR=1 to
// pin the reference path.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace ergmbf::kernels {

struct KernelTable {
  std::string_view name;

  double (*dot)(const double* a, const double* b, std::size_t n);
  double (*weighted_dot)(const double* a, const double* b, const double* w,
                         std::size_t n);
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);

  // For each draw d (column of the SoA block z, `cols` rows by n draws):
  //   lin_r = sum_k b[r*cols + k] * z[k*stride + d]
  //   bit r of plus[d]  set iff offset[r] + lin_r > 0
  //   bit r of minus[d] set iff offset[r] - lin_r > 0
  // rows <= 64. Accumulation is a left-to-right FMA chain in both variants,
  // so masks agree bit-for-bit.
  void (*affine_sign_masks)(const double* b, const double* offset,
                            std::size_t rows, std::size_t cols, const double* z,
                            std::size_t stride, std::size_t n,
                            std::uint64_t* plus, std::uint64_t* minus);
};

const KernelTable& scalar_table();

/// nullptr when the CPU lacks AVX2+FMA or the build did not include it.
const KernelTable* avx2_table();

/// The table used by the free functions below.
const KernelTable& active();

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}

inline double weighted_dot(std::span<const double> a, std::span<const double> b,
                           std::span<const double> w) {
  return active().weighted_dot(a.data(), b.data(), w.data(), a.size());
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active().axpy(alpha, x.data(), y.data(), x.size());
}

}  // namespace ergmbf::kernels
