#pragma once

#include <complex>
#include <cstddef>

namespace qnet::kernels {

using cplx = std::complex<double>;

// Hot inner loops of the dense complex algebra. Scalar reference versions are
// the semantics; the AVX2 variants are selected at runtime when the CPU has
// AVX2+FMA and must agree with scalar to roundoff (equivalence-tested).
struct Backend {
  const char* name;
  cplx (*dotu)(const cplx* a, const cplx* b, std::size_t n);       // Σ a_i b_i
  cplx (*dotc)(const cplx* a, const cplx* b, std::size_t n);       // Σ conj(a_i) b_i
  void (*axpy)(cplx alpha, const cplx* x, cplx* y, std::size_t n); // y += α x
  void (*axpy_conj)(cplx alpha, const cplx* x, cplx* y, std::size_t n); // y += α conj(x)
  void (*scal)(cplx alpha, cplx* x, std::size_t n);                // x = α x
  double (*sum_abs2)(const cplx* x, std::size_t n);                // Σ |x_i|²
};

const Backend& scalar_backend();
bool avx2_available();
const Backend& avx2_backend(); // valid only when avx2_available()

const Backend& active();
void force_backend(const Backend& b); // tests only
void reset_backend();

inline cplx dotu(const cplx* a, const cplx* b, std::size_t n) { return active().dotu(a, b, n); }
inline cplx dotc(const cplx* a, const cplx* b, std::size_t n) { return active().dotc(a, b, n); }
inline void axpy(cplx alpha, const cplx* x, cplx* y, std::size_t n) { active().axpy(alpha, x, y, n); }
inline void axpy_conj(cplx alpha, const cplx* x, cplx* y, std::size_t n) { active().axpy_conj(alpha, x, y, n); }
inline void scal(cplx alpha, cplx* x, std::size_t n) { active().scal(alpha, x, n); }
inline double sum_abs2(const cplx* x, std::size_t n) { return active().sum_abs2(x, n); }

} // namespace qnet::kernels
