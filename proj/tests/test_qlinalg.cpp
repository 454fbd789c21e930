#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "qnet/netbuild.hpp" // haar_unitary for invariance checks
#include "qnet/qlinalg.hpp"
#include "qnet/rng.hpp"

using namespace qnet;

namespace {

ComplexMatrix random_matrix(i64 r, i64 c, Rng& rng) {
  ComplexMatrix m(r, c);
  for (auto& z : m.a) z = rng.complex_gaussian();
  return m;
}

ComplexMatrix random_hermitian(i64 n, Rng& rng) {
  const ComplexMatrix g = random_matrix(n, n, rng);
  ComplexMatrix h(n, n);
  for (i64 i = 0; i < n; ++i) {
    for (i64 j = 0; j < n; ++j) h(i, j) = 0.5 * (g(i, j) + std::conj(g(j, i)));
  }
  return h;
}

// PSD with exact rank r: Gram of an n×r Gaussian factor.
ComplexMatrix random_psd_rank(i64 n, i64 r, Rng& rng) {
  const ComplexMatrix g = random_matrix(n, r, rng);
  return matmul(g, adjoint(g));
}

ComplexMatrix bell_density() {
  PureVector bell(4);
  bell.amps[0] = bell.amps[3] = 1.0 / std::sqrt(2.0);
  return outer(bell);
}

// Test-only oracle: det(A − xI) for Hermitian A via complex LU with partial
// pivoting (real-valued for Hermitian input); eigenvalues located by sign
// changes on a grid and refined by bisection.
double char_poly(const ComplexMatrix& a, double x) {
  const i64 n = a.rows;
  ComplexMatrix m = a;
  for (i64 i = 0; i < n; ++i) m(i, i) -= x;
  cplx det = 1.0;
  int swaps = 0;
  for (i64 col = 0; col < n; ++col) {
    i64 piv = col;
    for (i64 r = col + 1; r < n; ++r) {
      if (std::abs(m(r, col)) > std::abs(m(piv, col))) piv = r;
    }
    if (std::abs(m(piv, col)) == 0.0) return 0.0;
    if (piv != col) {
      for (i64 c = 0; c < n; ++c) std::swap(m(piv, c), m(col, c));
      ++swaps;
    }
    det *= m(col, col);
    for (i64 r = col + 1; r < n; ++r) {
      const cplx f = m(r, col) / m(col, col);
      for (i64 c = col; c < n; ++c) m(r, c) -= f * m(col, c);
    }
  }
  if (swaps % 2) det = -det;
  return det.real();
}

std::vector<double> bisection_eigenvalues(const ComplexMatrix& a) {
  const i64 n = a.rows;
  double lo = 0.0, hi = 0.0;
  for (i64 i = 0; i < n; ++i) {
    double radius = 0.0;
    for (i64 j = 0; j < n; ++j) {
      if (j != i) radius += std::abs(a(i, j));
    }
    lo = std::min(lo, a(i, i).real() - radius);
    hi = std::max(hi, a(i, i).real() + radius);
  }
  lo -= 1e-6;
  hi += 1e-6;
  const int grid = 4096;
  std::vector<double> roots;
  double x_prev = lo, f_prev = char_poly(a, lo);
  for (int g = 1; g <= grid; ++g) {
    const double x = lo + (hi - lo) * g / grid;
    const double f = char_poly(a, x);
    if ((f_prev < 0 && f > 0) || (f_prev > 0 && f < 0)) {
      double xl = x_prev, xh = x, fl = f_prev;
      for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (xl + xh);
        const double fm = char_poly(a, mid);
        if ((fl < 0) == (fm < 0)) {
          xl = mid;
          fl = fm;
        } else {
          xh = mid;
        }
      }
      roots.push_back(0.5 * (xl + xh));
    }
    x_prev = x;
    f_prev = f;
  }
  std::sort(roots.begin(), roots.end(), std::greater<>());
  return roots;
}

} // namespace

TEST_CASE("tensor products") {
  const ComplexMatrix i2 = ComplexMatrix::identity(2);
  CHECK(max_abs_diff(tensor(i2, i2), ComplexMatrix::identity(4)) == 0.0);

  ComplexMatrix d10(2, 2), d01(2, 2);
  d10(0, 0) = 1.0;
  d01(1, 1) = 1.0;
  ComplexMatrix expect(4, 4);
  expect(1, 1) = 1.0; // diag(1,0)⊗diag(0,1) = diag(0,1,0,0)
  CHECK(max_abs_diff(tensor(d10, d01), expect) == 0.0);

  Rng rng(11);
  const ComplexMatrix a = random_matrix(2, 2, rng);
  const ComplexMatrix b = random_matrix(2, 2, rng);
  CHECK(std::abs(trace(tensor(a, b)) - trace(a) * trace(b)) < 1e-12);

  CHECK_THROWS_AS(tensor(random_matrix(3000, 3000, rng), random_matrix(2, 2, rng)),
                  std::length_error);
}

TEST_CASE("partial trace") {
  const std::vector<i64> two_qubits{2, 2};
  const ComplexMatrix bell = bell_density();
  const int keep0[] = {0};
  const ComplexMatrix marg = partial_trace(bell, two_qubits, keep0);
  ComplexMatrix half(2, 2);
  half(0, 0) = half(1, 1) = 0.5;
  CHECK(max_abs_diff(marg, half) < 1e-12);

  Rng rng(12);
  ComplexMatrix rho = random_psd_rank(2, 2, rng);
  kernels::scal(cplx(1.0 / trace(rho).real(), 0.0), rho.a.data(), rho.a.size());
  ComplexMatrix sig = random_psd_rank(3, 3, rng);
  kernels::scal(cplx(1.0 / trace(sig).real(), 0.0), sig.a.data(), sig.a.size());
  const std::vector<i64> dims23{2, 3};
  CHECK(max_abs_diff(partial_trace(tensor(rho, sig), dims23, keep0), rho) < 1e-12);

  // sequential traces agree regardless of order
  const ComplexMatrix r3 = [&] {
    ComplexMatrix m = random_psd_rank(8, 8, rng);
    kernels::scal(cplx(1.0 / trace(m).real(), 0.0), m.a.data(), m.a.size());
    return m;
  }();
  const std::vector<i64> q3{2, 2, 2};
  const int keep2[] = {2};
  const ComplexMatrix direct = partial_trace(r3, q3, keep2);
  const int keep12[] = {1, 2};
  const ComplexMatrix step1 = partial_trace(r3, q3, keep12); // traced particle 0
  const std::vector<i64> q2{2, 2};
  const int keep1of2[] = {1};
  const ComplexMatrix two_step = partial_trace(step1, q2, keep1of2);
  CHECK(max_abs_diff(direct, two_step) < 1e-12);

  // keep = ∅ gives the 1×1 trace
  const ComplexMatrix tr = partial_trace(bell, two_qubits, std::span<const int>{});
  CHECK(tr.rows == 1);
  CHECK(std::abs(tr(0, 0) - cplx(1.0, 0.0)) < 1e-12);

  CHECK_THROWS_AS(partial_trace(bell, q3, keep0), std::invalid_argument);
}

TEST_CASE("partial trace of a tensor factors out the other trace") {
  Rng rng(13);
  for (int trial = 0; trial < 10; ++trial) {
    const ComplexMatrix a = random_matrix(3, 3, rng);
    const ComplexMatrix b = random_matrix(4, 4, rng);
    const std::vector<i64> dims{3, 4};
    const int keep0[] = {0};
    ComplexMatrix expect = a;
    kernels::scal(trace(b), expect.a.data(), expect.a.size());
    CHECK(max_abs_diff(partial_trace(tensor(a, b), dims, keep0), expect) < 1e-12);
  }
}

TEST_CASE("partial transpose") {
  Rng rng(14);
  const std::vector<i64> dims{2, 2};
  const ComplexMatrix m = random_hermitian(4, rng);
  const int all[] = {0, 1};
  // flipping every factor is the full transpose
  ComplexMatrix t(4, 4);
  for (i64 i = 0; i < 4; ++i) {
    for (i64 j = 0; j < 4; ++j) t(i, j) = m(j, i);
  }
  CHECK(max_abs_diff(partial_transpose(m, dims, all), t) < 1e-15);
  // flipping nothing is the identity
  CHECK(max_abs_diff(partial_transpose(m, dims, std::span<const int>{}), m) < 1e-15);
  // involution, trace- and hermiticity-preserving
  const int flip1[] = {1};
  const ComplexMatrix pt = partial_transpose(m, dims, flip1);
  CHECK(max_abs_diff(partial_transpose(pt, dims, flip1), m) < 1e-15);
  CHECK(std::abs(trace(pt) - trace(m)) < 1e-12);
  CHECK(hermiticity_defect(pt) < 1e-12);

  const Spectrum s = hermitian_spectrum(partial_transpose(bell_density(), dims, flip1));
  REQUIRE(s.values.size() == 4);
  CHECK(s.values[0] == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(s.values[1] == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(s.values[2] == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(s.values[3] == doctest::Approx(-0.5).epsilon(1e-10));
}

TEST_CASE("hermitian spectrum: fixed values and unitary invariance") {
  ComplexMatrix half(2, 2);
  half(0, 0) = half(1, 1) = 0.5;
  const Spectrum s = hermitian_spectrum(half);
  CHECK(s.values[0] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(s.values[1] == doctest::Approx(0.5).epsilon(1e-14));

  Rng rng(15);
  ComplexMatrix d(2, 2);
  d(0, 0) = 0.7;
  d(1, 1) = 0.3;
  const ComplexMatrix u = haar_unitary(2, rng);
  const ComplexMatrix rotated = matmul(matmul(u, d), adjoint(u));
  const Spectrum sr = hermitian_spectrum(rotated);
  CHECK(std::abs(sr.values[0] - 0.7) < 1e-10);
  CHECK(std::abs(sr.values[1] - 0.3) < 1e-10);

  for (i64 n : {8, 24}) {
    const ComplexMatrix h = random_hermitian(n, rng);
    const ComplexMatrix v = haar_unitary(n, rng);
    const Spectrum s1 = hermitian_spectrum(h);
    const Spectrum s2 = hermitian_spectrum(matmul(matmul(v, h), adjoint(v)));
    for (i64 i = 0; i < n; ++i) {
      CHECK(std::abs(s1.values[static_cast<std::size_t>(i)] -
                     s2.values[static_cast<std::size_t>(i)]) < 1e-9);
    }
  }

  ComplexMatrix bad(2, 2);
  bad(0, 1) = 1.0; // not hermitian
  CHECK_THROWS_AS(hermitian_spectrum(bad), std::invalid_argument);
}

TEST_CASE("hermitian spectrum against the bisection oracle") {
  Rng rng(16);
  const ComplexMatrix h = random_hermitian(8, rng);
  const Spectrum s = hermitian_spectrum(h);
  const auto oracle = bisection_eigenvalues(h);
  REQUIRE(oracle.size() == 8);
  for (std::size_t i = 0; i < 8; ++i) {
    CHECK(std::abs(s.values[i] - oracle[i]) < 1e-8);
  }
}

TEST_CASE("degenerate spectra are recovered cleanly") {
  Rng rng(22);
  const double eigs[6] = {2.0, 1.0, 1.0, 1.0, 0.5, 0.0};
  ComplexMatrix d(6, 6);
  for (i64 i = 0; i < 6; ++i) d(i, i) = eigs[i];
  const ComplexMatrix u = haar_unitary(6, rng);
  const ComplexMatrix m = matmul(matmul(u, d), adjoint(u));
  const Spectrum s = hermitian_spectrum(m);
  for (i64 i = 0; i < 6; ++i) {
    CHECK(std::abs(s.values[static_cast<std::size_t>(i)] - eigs[i]) < 1e-9);
  }
  const EigenSystem es = hermitian_eigensystem(m);
  ComplexMatrix rebuilt(6, 6);
  for (i64 k = 0; k < 6; ++k) {
    for (i64 i = 0; i < 6; ++i) {
      for (i64 j = 0; j < 6; ++j) {
        rebuilt(i, j) += es.values.values[static_cast<std::size_t>(k)] * es.vectors(i, k) *
                         std::conj(es.vectors(j, k));
      }
    }
  }
  CHECK(max_abs_diff(rebuilt, m) < 1e-9);
}

TEST_CASE("eigensystem reconstructs the matrix") {
  Rng rng(17);
  for (i64 n : {2, 5, 16, 40}) {
    const ComplexMatrix h = random_hermitian(n, rng);
    const EigenSystem es = hermitian_eigensystem(h);
    ComplexMatrix rebuilt(n, n);
    for (i64 k = 0; k < n; ++k) {
      for (i64 i = 0; i < n; ++i) {
        for (i64 j = 0; j < n; ++j) {
          rebuilt(i, j) += es.values.values[static_cast<std::size_t>(k)] * es.vectors(i, k) *
                           std::conj(es.vectors(j, k));
        }
      }
    }
    CHECK(max_abs_diff(rebuilt, h) < 1e-8);
  }
}

TEST_CASE("numerical rank") {
  Spectrum pure;
  pure.values = {1.0, 0.0, 0.0, 0.0};
  CHECK(numerical_rank(pure) == 1);
  Spectrum half;
  half.values = {0.5, 0.5};
  CHECK(numerical_rank(half) == 2);
  Spectrum zero;
  zero.values = {0.0, 0.0};
  CHECK(numerical_rank(zero) == 0);

  Rng rng(18);
  // a rank-2 times a rank-3 positive matrix has rank exactly 6
  CHECK(numerical_rank(hermitian_spectrum(
            tensor(random_psd_rank(4, 2, rng), random_psd_rank(5, 3, rng)))) == 6);
  // rank multiplies across tensor products (25 random low-rank PSD pairs)
  for (int trial = 0; trial < 25; ++trial) {
    const i64 na = 2 + static_cast<i64>(rng.below(7)); // ≤ 8
    const i64 nb = 2 + static_cast<i64>(rng.below(7));
    const i64 ra = 1 + static_cast<i64>(rng.below(static_cast<std::uint64_t>(na)));
    const i64 rb = 1 + static_cast<i64>(rng.below(static_cast<std::uint64_t>(nb)));
    const ComplexMatrix a = random_psd_rank(na, ra, rng);
    const ComplexMatrix b = random_psd_rank(nb, rb, rng);
    CHECK(numerical_rank(hermitian_spectrum(tensor(a, b))) == static_cast<int>(ra * rb));
  }
}

TEST_CASE("trace norm") {
  CHECK(trace_norm(bell_density()) == doctest::Approx(1.0).epsilon(1e-10));
  const std::vector<i64> dims{2, 2};
  const int flip1[] = {1};
  CHECK(trace_norm(partial_transpose(bell_density(), dims, flip1)) ==
        doctest::Approx(2.0).epsilon(1e-10));
  CHECK(trace_norm(ComplexMatrix(3, 3)) == 0.0);

  // non-hermitian path: singular values are known by construction
  Rng rng(19);
  const ComplexMatrix u = haar_unitary(4, rng);
  const ComplexMatrix v = haar_unitary(4, rng);
  ComplexMatrix d(4, 4);
  const double sv[4] = {2.0, 1.25, 0.5, 0.125};
  for (i64 i = 0; i < 4; ++i) d(i, i) = sv[i];
  const ComplexMatrix m = matmul(matmul(u, d), adjoint(v));
  CHECK(trace_norm(m) == doctest::Approx(3.875).epsilon(1e-10));
}

TEST_CASE("particle permutation and block application") {
  Rng rng(20);
  const std::vector<i64> dims{2, 3, 2};
  PureVector v(12);
  for (auto& z : v.amps) z = rng.complex_gaussian();
  v.normalize();
  // permute then permute back with the inverse
  const std::vector<int> perm{2, 0, 1};
  const PureVector w = permute_particles(v, dims, perm);
  const std::vector<i64> new_dims{2, 2, 3};
  std::vector<int> inv(3);
  for (int s = 0; s < 3; ++s) inv[static_cast<std::size_t>(perm[static_cast<std::size_t>(s)])] = s;
  const PureVector back = permute_particles(w, new_dims, inv);
  for (i64 i = 0; i < 12; ++i) {
    CHECK(std::abs(back.amps[static_cast<std::size_t>(i)] - v.amps[static_cast<std::size_t>(i)]) <
          1e-15);
  }
  // explicit digit check against naive reindexing
  for (i64 a = 0; a < 2; ++a) {
    for (i64 b = 0; b < 3; ++b) {
      for (i64 c = 0; c < 2; ++c) {
        const i64 old_idx = (a * 3 + b) * 2 + c;
        const i64 new_idx = (c * 2 + a) * 3 + b; // slots (2,0,1)
        CHECK(std::abs(w.amps[static_cast<std::size_t>(new_idx)] -
                       v.amps[static_cast<std::size_t>(old_idx)]) < 1e-15);
      }
    }
  }

  // block operator equals the dense I⊗U⊗I construction
  const ComplexMatrix u = haar_unitary(3, rng);
  const PureVector via_block = apply_block(v, dims, 1, 1, u);
  const ComplexMatrix dense = tensor(tensor(ComplexMatrix::identity(2), u), ComplexMatrix::identity(2));
  PureVector via_dense(12);
  for (i64 i = 0; i < 12; ++i) {
    via_dense.amps[static_cast<std::size_t>(i)] =
        kernels::dotu(dense.row(i), v.amps.data(), 12);
  }
  for (i64 i = 0; i < 12; ++i) {
    CHECK(std::abs(via_block.amps[static_cast<std::size_t>(i)] -
                   via_dense.amps[static_cast<std::size_t>(i)]) < 1e-12);
  }

  ComplexMatrix rho = outer(v);
  const ComplexMatrix conj_block = conjugate_by_block(rho, dims, 1, 1, u);
  const ComplexMatrix conj_dense = matmul(matmul(dense, rho), adjoint(dense));
  CHECK(max_abs_diff(conj_block, conj_dense) < 1e-12);
}

TEST_CASE("pure-state marginals match the dense route") {
  Rng rng(21);
  const std::vector<i64> dims{2, 3, 2, 2};
  PureVector v(24);
  for (auto& z : v.amps) z = rng.complex_gaussian();
  v.normalize();
  const ComplexMatrix rho = outer(v);
  const int keep[] = {1, 3};
  const ComplexMatrix a = reduced_density_pure(v, dims, keep);
  const ComplexMatrix b = partial_trace(rho, dims, keep);
  CHECK(max_abs_diff(a, b) < 1e-12);

  // spectrum via the smaller side agrees with the dense eigensolve
  const Spectrum s1 = reduced_spectrum_pure(v, dims, keep);
  const Spectrum s2 = hermitian_spectrum(b);
  for (std::size_t i = 0; i < std::min(s1.values.size(), s2.values.size()); ++i) {
    CHECK(std::abs(s1.values[i] - s2.values[i]) < 1e-11);
  }
}
