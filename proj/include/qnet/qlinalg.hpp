#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "qnet/kernels.hpp"
#include "qnet/tolerances.hpp"

namespace qnet {

using cplx = std::complex<double>;
using i64 = std::int64_t;

// Dense row-major complex matrix. The only matrix type in the project;
// everything desk-scale (hard cap 4096 per side).
struct ComplexMatrix {
  i64 rows = 0;
  i64 cols = 0;
  std::vector<cplx> a;

  ComplexMatrix() = default;
  ComplexMatrix(i64 r, i64 c);

  static ComplexMatrix identity(i64 n);

  cplx& operator()(i64 i, i64 j) { return a[static_cast<std::size_t>(i * cols + j)]; }
  const cplx& operator()(i64 i, i64 j) const { return a[static_cast<std::size_t>(i * cols + j)]; }
  cplx* row(i64 i) { return a.data() + i * cols; }
  const cplx* row(i64 i) const { return a.data() + i * cols; }
  bool square() const { return rows == cols; }
};

// Pure amplitude vector; dim = product of the particle dimensions it spans.
struct PureVector {
  i64 dim = 0;
  std::vector<cplx> amps;

  PureVector() = default;
  explicit PureVector(i64 d);
  double norm2() const;         // Σ|amps|²
  void normalize();
};

// Real eigenvalues sorted descending.
struct Spectrum {
  std::vector<double> values;
  double sum() const;
  double max_value() const { return values.empty() ? 0.0 : values.front(); }
};

struct EigenSystem {
  Spectrum values;
  ComplexMatrix vectors; // column j ↔ values[j]
};

// --- elementwise / structural helpers -------------------------------------

ComplexMatrix adjoint(const ComplexMatrix& m);
ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix outer(const PureVector& v);
cplx trace(const ComplexMatrix& m);
double max_abs(const ComplexMatrix& m);
double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);
double hermiticity_defect(const ComplexMatrix& m); // max |M_ij - conj(M_ji)|
bool is_hermitian(const ComplexMatrix& m, double tolerance = tol::kHermitian);
void add_scaled(ComplexMatrix& acc, const ComplexMatrix& m, double w); // acc += w m

// --- tensor algebra --------------------------------------------------------

// Kronecker products; a's indices are most significant.
ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b);
PureVector tensor(const PureVector& a, const PureVector& b);

// Reduced matrix on the kept factors (ascending particle order preserved).
// keep may be empty: returns the 1×1 trace.
ComplexMatrix partial_trace(const ComplexMatrix& m, std::span<const i64> dims,
                            std::span<const int> keep);

// Transpose applied to the flipped factors only.
ComplexMatrix partial_transpose(const ComplexMatrix& m, std::span<const i64> dims,
                                std::span<const int> flip);

// Reorder particles. perm[new_slot] = old_particle; dims are the old dims.
PureVector permute_particles(const PureVector& v, std::span<const i64> dims,
                             std::span<const int> perm);
ComplexMatrix permute_particles(const ComplexMatrix& m, std::span<const i64> dims,
                                std::span<const int> perm);

// Apply op (k×k, k = Π dims[first..first+count)) on a contiguous particle
// block of a vector; conjugate_by_block does (I⊗U⊗I) ρ (I⊗U⊗I)†.
PureVector apply_block(const PureVector& v, std::span<const i64> dims, int first,
                       int count, const ComplexMatrix& op, bool conj_op = false);
ComplexMatrix conjugate_by_block(const ComplexMatrix& rho, std::span<const i64> dims,
                                 int first, int count, const ComplexMatrix& op);

// Marginals of a pure state. The spectrum routine works on whichever side of
// the cut is smaller (nonzero spectra across a pure-state cut coincide), so it
// never forms a matrix larger than min(dim_keep, dim_rest)².
ComplexMatrix reduced_density_pure(const PureVector& v, std::span<const i64> dims,
                                   std::span<const int> keep);
Spectrum reduced_spectrum_pure(const PureVector& v, std::span<const i64> dims,
                               std::span<const int> keep);

// --- spectra ---------------------------------------------------------------

// Eigenvalues of a Hermitian matrix (defect ≤ kHermitian enforced),
// descending. Householder tridiagonalization + implicit-shift QL.
Spectrum hermitian_spectrum(const ComplexMatrix& m);
EigenSystem hermitian_eigensystem(const ComplexMatrix& m);

// Count of eigenvalues above tol·max(λ_max, 1e-300); 0 only for ~zero input.
int numerical_rank(const Spectrum& s, double tolerance = tol::kRankRel);

// Sum of singular values (Σ|λ| on the Hermitian fast path).
double trace_norm(const ComplexMatrix& m);

} // namespace qnet
