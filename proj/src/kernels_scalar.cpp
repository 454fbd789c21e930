#include "qnet/kernels.hpp"

namespace qnet::kernels {

namespace {

cplx dotu_scalar(const cplx* a, const cplx* b, std::size_t n) {
  double re = 0.0, im = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double ar = a[i].real(), ai = a[i].imag();
    const double br = b[i].real(), bi = b[i].imag();
    re += ar * br - ai * bi;
    im += ar * bi + ai * br;
  }
  return {re, im};
}

cplx dotc_scalar(const cplx* a, const cplx* b, std::size_t n) {
  double re = 0.0, im = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double ar = a[i].real(), ai = a[i].imag();
    const double br = b[i].real(), bi = b[i].imag();
    re += ar * br + ai * bi;
    im += ar * bi - ai * br;
  }
  return {re, im};
}

void axpy_scalar(cplx alpha, const cplx* x, cplx* y, std::size_t n) {
  const double pr = alpha.real(), pi = alpha.imag();
  for (std::size_t i = 0; i < n; ++i) {
    const double xr = x[i].real(), xi = x[i].imag();
    y[i] += cplx(pr * xr - pi * xi, pr * xi + pi * xr);
  }
}

void axpy_conj_scalar(cplx alpha, const cplx* x, cplx* y, std::size_t n) {
  const double pr = alpha.real(), pi = alpha.imag();
  for (std::size_t i = 0; i < n; ++i) {
    const double xr = x[i].real(), xi = x[i].imag();
    y[i] += cplx(pr * xr + pi * xi, pi * xr - pr * xi);
  }
}

void scal_scalar(cplx alpha, cplx* x, std::size_t n) {
  const double pr = alpha.real(), pi = alpha.imag();
  for (std::size_t i = 0; i < n; ++i) {
    const double xr = x[i].real(), xi = x[i].imag();
    x[i] = cplx(pr * xr - pi * xi, pr * xi + pi * xr);
  }
}

double sum_abs2_scalar(const cplx* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    s += x[i].real() * x[i].real() + x[i].imag() * x[i].imag();
  }
  return s;
}

} // namespace

const Backend& scalar_backend() {
  static const Backend b{"scalar", dotu_scalar,      dotc_scalar, axpy_scalar,
                         axpy_conj_scalar, scal_scalar, sum_abs2_scalar};
  return b;
}

} // namespace qnet::kernels
