#include "wordvision/simd.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

#include "simd_kernels.hpp"

namespace wv::simd {

namespace {

using detail::KernelTable;

Isa detect() {
#if defined(__x86_64__) && defined(__GNUC__)
  if (detail::avx2_kernels() != nullptr &&
      __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) {
    return Isa::avx2;
  }
#endif
  return Isa::scalar;
}

Isa initial_isa() {
  Isa best = detect();
  if (const char* env = std::getenv("WORDVISION_ISA")) {
    if (std::strcmp(env, "scalar") == 0) return Isa::scalar;
    if (std::strcmp(env, "avx2") == 0 && best == Isa::avx2) return Isa::avx2;
  }
  return best;
}

std::atomic<const KernelTable*>& active_table() {
  static std::atomic<const KernelTable*> table{
      initial_isa() == Isa::avx2 ? detail::avx2_kernels() : &detail::scalar_kernels()};
  return table;
}

}  // namespace

const char* isa_name(Isa isa) {
  switch (isa) {
    case Isa::avx2: return "avx2";
    default: return "scalar";
  }
}

Isa detected_isa() {
  static const Isa isa = detect();
  return isa;
}

Isa active_isa() {
  return active_table().load() == detail::avx2_kernels() ? Isa::avx2 : Isa::scalar;
}

void set_active_isa(Isa isa) {
  if (isa == Isa::avx2 && detected_isa() == Isa::avx2) {
    active_table().store(detail::avx2_kernels());
  } else {
    active_table().store(&detail::scalar_kernels());
  }
}

double dot(const double* a, const double* b, std::size_t n) {
  return active_table().load()->dot(a, b, n);
}

void dot3(const double* a, const double* b, std::size_t n,
          double& ab, double& aa, double& bb) {
  active_table().load()->dot3(a, b, n, ab, aa, bb);
}

double norm_sq(const double* a, std::size_t n) {
  return active_table().load()->norm_sq(a, n);
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  active_table().load()->axpy(alpha, x, y, n);
}

void scale(double* x, double alpha, std::size_t n) {
  active_table().load()->scale(x, alpha, n);
}

void matvec(const double* w, std::size_t rows, std::size_t cols,
            const double* x, double* out) {
  const KernelTable* t = active_table().load();
  for (std::size_t r = 0; r < rows; ++r) out[r] = t->dot(w + r * cols, x, cols);
}

void rank1_update(double alpha, const double* u, std::size_t m,
                  const double* v, std::size_t n, double* w) {
  const KernelTable* t = active_table().load();
  for (std::size_t r = 0; r < m; ++r) t->axpy(alpha * u[r], v, w + r * n, n);
}

}  // namespace wv::simd
