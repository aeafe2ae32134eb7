#pragma once

#include <cstddef>

// Dispatched numeric kernels. Every data-parallel inner loop in the library
// (cosine distances, attention dot products, projections, gradient updates)
// goes through these entry points. A scalar reference implementation always
// exists; an AVX2+FMA variant is selected at runtime when the CPU supports
// it. The two variants are equivalence-tested against each other.

namespace wv::simd {

enum class Isa { scalar = 0, avx2 = 1 };

const char* isa_name(Isa isa);

// Best ISA the running CPU supports.
Isa detected_isa();

// ISA currently used by the kernel entry points. Defaults to detected_isa(),
// overridable with WORDVISION_ISA=scalar|avx2.
Isa active_isa();

// Clamped to detected_isa(). Intended for tests and benchmarks.
void set_active_isa(Isa isa);

double dot(const double* a, const double* b, std::size_t n);

// One-pass dot(a,b), dot(a,a), dot(b,b); the cosine-distance inner loop.
void dot3(const double* a, const double* b, std::size_t n,
          double& ab, double& aa, double& bb);

double norm_sq(const double* a, std::size_t n);

// y += alpha * x
void axpy(double alpha, const double* x, double* y, std::size_t n);

// x *= alpha
void scale(double* x, double alpha, std::size_t n);

// out = W x, W row-major (rows x cols)
void matvec(const double* w, std::size_t rows, std::size_t cols,
            const double* x, double* out);

// W += alpha * u v^T, W row-major (m x n)
void rank1_update(double alpha, const double* u, std::size_t m,
                  const double* v, std::size_t n, double* w);

}  // namespace wv::simd
