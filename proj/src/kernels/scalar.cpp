#include <cmath>

#include "ergmbf/kernels.hpp"

namespace ergmbf::kernels {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

double weighted_dot_scalar(const double* a, const double* b, const double* w,
                           std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i] * w[i];
  return s;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void affine_sign_masks_scalar(const double* b, const double* offset,
                              std::size_t rows, std::size_t cols,
                              const double* z, std::size_t stride,
                              std::size_t n, std::uint64_t* plus,
                              std::uint64_t* minus) {
  for (std::size_t d = 0; d < n; ++d) {
    std::uint64_t mp = 0;
    std::uint64_t mm = 0;
    for (std::size_t r = 0; r < rows; ++r) {
      double lin = 0.0;
      const double* br = b + r * cols;
      for (std::size_t k = 0; k < cols; ++k) lin = std::fma(br[k], z[k * stride + d], lin);
      if (offset[r] + lin > 0.0) mp |= std::uint64_t{1} << r;
      if (offset[r] - lin > 0.0) mm |= std::uint64_t{1} << r;
    }
    plus[d] = mp;
    minus[d] = mm;
  }
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{"scalar", dot_scalar, weighted_dot_scalar,
                                 axpy_scalar, affine_sign_masks_scalar};
  return table;
}

}  // namespace ergmbf::kernels
