#include "simd_kernels.hpp"

// Scalar reference kernels. These define the semantics the SIMD variants are
// tested against.

namespace wv::simd::detail {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void dot3_scalar(const double* a, const double* b, std::size_t n,
                 double& ab, double& aa, double& bb) {
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sab += a[i] * b[i];
    saa += a[i] * a[i];
    sbb += b[i] * b[i];
  }
  ab = sab;
  aa = saa;
  bb = sbb;
}

double norm_sq_scalar(const double* a, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * a[i];
  return acc;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scale_scalar(double* x, double alpha, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= alpha;
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table = {
      dot_scalar, dot3_scalar, norm_sq_scalar, axpy_scalar, scale_scalar,
  };
  return table;
}

}  // namespace wv::simd::detail
