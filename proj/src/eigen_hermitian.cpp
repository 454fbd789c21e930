// Hermitian eigensolver: complex Householder reduction to a real symmetric
// tridiagonal, then implicit-shift QL. Eigenvalues-only skips all reflector
// bookkeeping; the eigensystem variant back-transforms the tridiagonal
// eigenvector matrix through the stored reflectors and the phase diagonal.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "qnet/qlinalg.hpp"

namespace qnet {

namespace {

struct Reflector {
  i64 offset = 0;          // first row/col the reflector touches
  std::vector<cplx> u;     // unit vector; empty → identity step
};

// In-place reduction of Hermitian W. d gets the real diagonal, e the real
// non-negative off-diagonal, phases the diagonal unitary that realifies the
// complex tridiagonal. Reflectors are recorded only when requested.
void tridiagonalize(ComplexMatrix& w, std::vector<double>& d, std::vector<double>& e,
                    std::vector<cplx>& phases, std::vector<Reflector>* reflectors) {
  const i64 n = w.rows;
  d.assign(static_cast<std::size_t>(n), 0.0);
  e.assign(static_cast<std::size_t>(std::max<i64>(n - 1, 0)), 0.0);
  std::vector<cplx> ec(static_cast<std::size_t>(std::max<i64>(n - 1, 0)), cplx(0.0, 0.0));
  std::vector<cplx> u, p, v;
  for (i64 k = 0; k + 2 < n; ++k) {
    const i64 m = n - k - 1;
    u.assign(static_cast<std::size_t>(m), cplx(0.0, 0.0));
    for (i64 i = 0; i < m; ++i) u[static_cast<std::size_t>(i)] = std::conj(w(k, k + 1 + i));
    const double sigma = std::sqrt(kernels::sum_abs2(u.data(), u.size()));
    if (sigma < 1e-300) {
      ec[static_cast<std::size_t>(k)] = cplx(0.0, 0.0);
      if (reflectors) reflectors->push_back({k + 1, {}});
      continue;
    }
    const cplx alpha = u[0];
    const double aa = std::abs(alpha);
    const cplx phase = (aa == 0.0) ? cplx(1.0, 0.0) : alpha / aa;
    const cplx beta = -phase * sigma;
    u[0] -= beta; // v = x - beta e0; |v0| = |x0| + sigma, no cancellation
    const double vnorm = std::sqrt(kernels::sum_abs2(u.data(), u.size()));
    kernels::scal(cplx(1.0 / vnorm, 0.0), u.data(), u.size());
    // p = A2 u on the trailing block, then the Hermitian rank-2 update
    p.assign(static_cast<std::size_t>(m), cplx(0.0, 0.0));
    for (i64 i = 0; i < m; ++i) {
      p[static_cast<std::size_t>(i)] =
          kernels::dotu(w.row(k + 1 + i) + (k + 1), u.data(), static_cast<std::size_t>(m));
    }
    const double mu = kernels::dotc(u.data(), p.data(), static_cast<std::size_t>(m)).real();
    v = p;
    kernels::axpy(cplx(-mu, 0.0), u.data(), v.data(), static_cast<std::size_t>(m));
    for (i64 i = 0; i < m; ++i) {
      cplx* rowp = w.row(k + 1 + i) + (k + 1);
      kernels::axpy_conj(-2.0 * u[static_cast<std::size_t>(i)], v.data(), rowp,
                         static_cast<std::size_t>(m));
      kernels::axpy_conj(-2.0 * v[static_cast<std::size_t>(i)], u.data(), rowp,
                         static_cast<std::size_t>(m));
    }
    ec[static_cast<std::size_t>(k)] = beta;
    if (reflectors) reflectors->push_back({k + 1, u});
  }
  if (n >= 2) ec[static_cast<std::size_t>(n - 2)] = std::conj(w(n - 2, n - 1));
  for (i64 i = 0; i < n; ++i) d[static_cast<std::size_t>(i)] = w(i, i).real();
  phases.assign(static_cast<std::size_t>(n), cplx(1.0, 0.0));
  for (i64 i = 0; i + 1 < n; ++i) {
    const double mag = std::abs(ec[static_cast<std::size_t>(i)]);
    e[static_cast<std::size_t>(i)] = mag;
    const cplx unit = (mag < 1e-300) ? cplx(1.0, 0.0) : ec[static_cast<std::size_t>(i)] / mag;
    phases[static_cast<std::size_t>(i + 1)] = phases[static_cast<std::size_t>(i)] * unit;
  }
}

// Implicit-shift QL on a real symmetric tridiagonal (tql2 lineage: the
// deflation threshold tst1 is absolute in the matrix scale, so clusters of
// numerically-zero eigenvalues deflate instead of churning). When z is
// non-null it is an n×n row-major matrix whose columns get rotated alongside.
void tridiagonal_ql(std::vector<double>& d, std::vector<double>& e, i64 n, std::vector<double>* z) {
  if (n <= 1) return;
  e.resize(static_cast<std::size_t>(n), 0.0); // e[n-1] sentinel
  const double eps = std::numeric_limits<double>::epsilon();
  double f = 0.0, tst1 = 0.0;
  for (i64 l = 0; l < n; ++l) {
    int iter = 0;
    const double h0 = eps * (std::abs(d[static_cast<std::size_t>(l)]) +
                             std::abs(e[static_cast<std::size_t>(l)]));
    if (tst1 < h0) tst1 = h0;
    i64 m = l;
    while (m < n && std::abs(e[static_cast<std::size_t>(m)]) > tst1) ++m;
    if (m != l) {
      do {
        if (iter++ == 64) throw std::runtime_error("tridiagonal QL did not converge");
        // origin shift: deflate d[l], d[l+1] against the accumulated shift f
        const i64 l1 = l + 1;
        double g = d[static_cast<std::size_t>(l)];
        double p = (d[static_cast<std::size_t>(l1)] - g) / (2.0 * e[static_cast<std::size_t>(l)]);
        double r = std::hypot(p, 1.0);
        d[static_cast<std::size_t>(l)] = e[static_cast<std::size_t>(l)] / (p + std::copysign(r, p));
        d[static_cast<std::size_t>(l1)] = e[static_cast<std::size_t>(l)] * (p + std::copysign(r, p));
        const double dl1 = d[static_cast<std::size_t>(l1)];
        double h = g - d[static_cast<std::size_t>(l)];
        for (i64 i = l + 2; i < n; ++i) d[static_cast<std::size_t>(i)] -= h;
        f += h;
        // QL sweep from m down to l
        p = d[static_cast<std::size_t>(m)];
        double c = 1.0, c2 = c, c3 = c;
        const double el1 = e[static_cast<std::size_t>(l1)];
        double s = 0.0, s2 = 0.0;
        for (i64 i = m - 1; i >= l; --i) {
          c3 = c2;
          c2 = c;
          s2 = s;
          g = c * e[static_cast<std::size_t>(i)];
          h = c * p;
          r = std::hypot(p, e[static_cast<std::size_t>(i)]);
          e[static_cast<std::size_t>(i + 1)] = s * r;
          s = e[static_cast<std::size_t>(i)] / r;
          c = p / r;
          p = c * d[static_cast<std::size_t>(i)] - s * g;
          d[static_cast<std::size_t>(i + 1)] = h + s * (c * g + s * d[static_cast<std::size_t>(i)]);
          if (z) {
            double* zp = z->data();
            for (i64 row = 0; row < n; ++row) {
              const double zt = zp[row * n + i + 1];
              zp[row * n + i + 1] = s * zp[row * n + i] + c * zt;
              zp[row * n + i] = c * zp[row * n + i] - s * zt;
            }
          }
        }
        p = -s * s2 * c3 * el1 * e[static_cast<std::size_t>(l)] / dl1;
        e[static_cast<std::size_t>(l)] = s * p;
        d[static_cast<std::size_t>(l)] = c * p;
      } while (std::abs(e[static_cast<std::size_t>(l)]) > tst1);
    }
    d[static_cast<std::size_t>(l)] += f;
  }
}

ComplexMatrix hermitian_working_copy(const ComplexMatrix& m) {
  if (!m.square()) throw std::invalid_argument("eigensolve requires a square matrix");
  const double defect = hermiticity_defect(m);
  if (defect > tol::kHermitian) {
    throw std::invalid_argument("matrix is not hermitian within 1e-10");
  }
  ComplexMatrix w(m.rows, m.rows);
  for (i64 i = 0; i < m.rows; ++i) {
    for (i64 j = 0; j <= i; ++j) {
      const cplx v = 0.5 * (m(i, j) + std::conj(m(j, i)));
      w(i, j) = v;
      w(j, i) = std::conj(v);
    }
    w(i, i) = cplx(w(i, i).real(), 0.0);
  }
  return w;
}

std::vector<i64> descending_order(const std::vector<double>& d) {
  std::vector<i64> idx(d.size());
  std::iota(idx.begin(), idx.end(), i64{0});
  std::stable_sort(idx.begin(), idx.end(), [&](i64 a, i64 b) {
    return d[static_cast<std::size_t>(a)] > d[static_cast<std::size_t>(b)];
  });
  return idx;
}

} // namespace

Spectrum hermitian_spectrum(const ComplexMatrix& m) {
  ComplexMatrix w = hermitian_working_copy(m);
  const i64 n = w.rows;
  if (n == 0) return {};
  std::vector<double> d, e;
  std::vector<cplx> phases;
  tridiagonalize(w, d, e, phases, nullptr);
  tridiagonal_ql(d, e, n, nullptr);
  std::sort(d.begin(), d.end(), std::greater<>());
  Spectrum s;
  s.values = std::move(d);
  return s;
}

EigenSystem hermitian_eigensystem(const ComplexMatrix& m) {
  ComplexMatrix w = hermitian_working_copy(m);
  const i64 n = w.rows;
  EigenSystem sys;
  if (n == 0) return sys;
  std::vector<double> d, e;
  std::vector<cplx> phases;
  std::vector<Reflector> reflectors;
  tridiagonalize(w, d, e, phases, &reflectors);
  std::vector<double> z(static_cast<std::size_t>(n * n), 0.0);
  for (i64 i = 0; i < n; ++i) z[static_cast<std::size_t>(i * n + i)] = 1.0;
  tridiagonal_ql(d, e, n, &z);

  const auto order = descending_order(d);
  sys.values.values.resize(static_cast<std::size_t>(n));
  for (i64 j = 0; j < n; ++j) {
    sys.values.values[static_cast<std::size_t>(j)] = d[static_cast<std::size_t>(order[j])];
  }
  // V = (Householder product) · diag(phases) · Z, columns in descending order
  ComplexMatrix v(n, n);
  for (i64 i = 0; i < n; ++i) {
    for (i64 j = 0; j < n; ++j) {
      v(i, j) = phases[static_cast<std::size_t>(i)] *
                z[static_cast<std::size_t>(i * n + order[j])];
    }
  }
  std::vector<cplx> t(static_cast<std::size_t>(n));
  for (auto it = reflectors.rbegin(); it != reflectors.rend(); ++it) {
    if (it->u.empty()) continue;
    const i64 off = it->offset;
    const i64 len = static_cast<i64>(it->u.size());
    std::fill(t.begin(), t.end(), cplx(0.0, 0.0));
    for (i64 i = 0; i < len; ++i) {
      kernels::axpy(std::conj(it->u[static_cast<std::size_t>(i)]), v.row(off + i), t.data(),
                    static_cast<std::size_t>(n));
    }
    for (i64 i = 0; i < len; ++i) {
      kernels::axpy(-2.0 * it->u[static_cast<std::size_t>(i)], t.data(), v.row(off + i),
                    static_cast<std::size_t>(n));
    }
  }
  sys.vectors = std::move(v);
  return sys;
}

} // namespace qnet
