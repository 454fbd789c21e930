// AVX2+FMA variants of the complex kernels. Two complex doubles per 256-bit
// lane, interleaved [re, im]. Built only when the compiler supports -mavx2;
// callers gate on avx2_available() before touching this backend.

#include "qnet/kernels.hpp"

#if defined(QNET_HAVE_AVX2)

#include <immintrin.h>

namespace qnet::kernels {

namespace {

// [ar*br - ai*bi, ar*bi + ai*br] per complex pair.
inline __m256d cmul(__m256d a, __m256d b) {
  const __m256d a_re = _mm256_movedup_pd(a);
  const __m256d a_im = _mm256_permute_pd(a, 0xF);
  const __m256d b_sw = _mm256_permute_pd(b, 0x5);
  return _mm256_fmaddsub_pd(a_re, b, _mm256_mul_pd(a_im, b_sw));
}

// conj(a) * b = [ar*br + ai*bi, ar*bi - ai*br].
inline __m256d cmul_conj_a(__m256d a, __m256d b) {
  const __m256d a_re = _mm256_movedup_pd(a);
  const __m256d a_im = _mm256_permute_pd(a, 0xF);
  const __m256d b_sw = _mm256_permute_pd(b, 0x5);
  return _mm256_fmsubadd_pd(a_re, b, _mm256_mul_pd(a_im, b_sw));
}

inline cplx hsum_c(__m256d acc) {
  double buf[4];
  _mm256_storeu_pd(buf, acc);
  return {buf[0] + buf[2], buf[1] + buf[3]};
}

cplx dotu_avx2(const cplx* a, const cplx* b, std::size_t n) {
  const double* pa = reinterpret_cast<const double*>(a);
  const double* pb = reinterpret_cast<const double*>(b);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    acc = _mm256_add_pd(acc, cmul(_mm256_loadu_pd(pa + 2 * i), _mm256_loadu_pd(pb + 2 * i)));
  }
  cplx s = hsum_c(acc);
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

cplx dotc_avx2(const cplx* a, const cplx* b, std::size_t n) {
  const double* pa = reinterpret_cast<const double*>(a);
  const double* pb = reinterpret_cast<const double*>(b);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    acc = _mm256_add_pd(acc, cmul_conj_a(_mm256_loadu_pd(pa + 2 * i), _mm256_loadu_pd(pb + 2 * i)));
  }
  cplx s = hsum_c(acc);
  for (; i < n; ++i) s += std::conj(a[i]) * b[i];
  return s;
}

void axpy_avx2(cplx alpha, const cplx* x, cplx* y, std::size_t n) {
  const double* px = reinterpret_cast<const double*>(x);
  double* py = reinterpret_cast<double*>(y);
  const __m256d a_re = _mm256_set1_pd(alpha.real());
  const __m256d a_im = _mm256_set1_pd(alpha.imag());
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d vx = _mm256_loadu_pd(px + 2 * i);
    const __m256d x_sw = _mm256_permute_pd(vx, 0x5);
    const __m256d prod = _mm256_fmaddsub_pd(a_re, vx, _mm256_mul_pd(a_im, x_sw));
    _mm256_storeu_pd(py + 2 * i, _mm256_add_pd(_mm256_loadu_pd(py + 2 * i), prod));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void axpy_conj_avx2(cplx alpha, const cplx* x, cplx* y, std::size_t n) {
  const double* px = reinterpret_cast<const double*>(x);
  double* py = reinterpret_cast<double*>(y);
  const __m256d a_re = _mm256_set1_pd(alpha.real());
  const __m256d a_im = _mm256_set1_pd(alpha.imag());
  const __m256d flip_odd = _mm256_set_pd(-0.0, 0.0, -0.0, 0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d vx = _mm256_loadu_pd(px + 2 * i);
    const __m256d x_sw = _mm256_permute_pd(vx, 0x5);
    // conj(alpha)*x, then conjugate the product: alpha*conj(x).
    __m256d prod = _mm256_fmsubadd_pd(a_re, vx, _mm256_mul_pd(a_im, x_sw));
    prod = _mm256_xor_pd(prod, flip_odd);
    _mm256_storeu_pd(py + 2 * i, _mm256_add_pd(_mm256_loadu_pd(py + 2 * i), prod));
  }
  for (; i < n; ++i) y[i] += alpha * std::conj(x[i]);
}

void scal_avx2(cplx alpha, cplx* x, std::size_t n) {
  double* px = reinterpret_cast<double*>(x);
  const __m256d a_re = _mm256_set1_pd(alpha.real());
  const __m256d a_im = _mm256_set1_pd(alpha.imag());
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d vx = _mm256_loadu_pd(px + 2 * i);
    const __m256d x_sw = _mm256_permute_pd(vx, 0x5);
    _mm256_storeu_pd(px + 2 * i, _mm256_fmaddsub_pd(a_re, vx, _mm256_mul_pd(a_im, x_sw)));
  }
  for (; i < n; ++i) x[i] *= alpha;
}

double sum_abs2_avx2(const cplx* x, std::size_t n) {
  const double* px = reinterpret_cast<const double*>(x);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d vx = _mm256_loadu_pd(px + 2 * i);
    acc = _mm256_fmadd_pd(vx, vx, acc);
  }
  double buf[4];
  _mm256_storeu_pd(buf, acc);
  double s = buf[0] + buf[1] + buf[2] + buf[3];
  for (; i < n; ++i) s += x[i].real() * x[i].real() + x[i].imag() * x[i].imag();
  return s;
}

} // namespace

const Backend& avx2_backend() {
  static const Backend b{"avx2", dotu_avx2,      dotc_avx2, axpy_avx2,
                         axpy_conj_avx2, scal_avx2, sum_abs2_avx2};
  return b;
}

} // namespace qnet::kernels

#endif // QNET_HAVE_AVX2
