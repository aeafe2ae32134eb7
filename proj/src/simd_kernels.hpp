#pragma once

#include <cstddef>

// Internal kernel table shared by the dispatcher and the per-ISA
// implementation files.

namespace wv::simd::detail {

struct KernelTable {
  double (*dot)(const double*, const double*, std::size_t);
  void (*dot3)(const double*, const double*, std::size_t, double&, double&, double&);
  double (*norm_sq)(const double*, std::size_t);
  void (*axpy)(double, const double*, double*, std::size_t);
  void (*scale)(double*, double, std::size_t);
};

const KernelTable& scalar_kernels();

// Null when the binary was built without AVX2 support.
const KernelTable* avx2_kernels();

}  // namespace wv::simd::detail
