#include "qnet/qlinalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace qnet {

namespace {

i64 checked_product(std::span<const i64> dims) {
  i64 p = 1;
  for (i64 d : dims) {
    if (d < 1) throw std::invalid_argument("particle dimension must be >= 1");
    p *= d;
  }
  return p;
}

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

std::vector<i64> full_strides(std::span<const i64> dims) {
  std::vector<i64> s(dims.size());
  i64 acc = 1;
  for (int p = static_cast<int>(dims.size()) - 1; p >= 0; --p) {
    s[static_cast<std::size_t>(p)] = acc;
    acc *= dims[static_cast<std::size_t>(p)];
  }
  return s;
}

// All embedded offsets of the sub-register `parts` into the full index space:
// offsets[t] = Σ digit_i(t) · full_stride(parts[i]).
std::vector<i64> embedded_offsets(std::span<const i64> dims, std::span<const int> parts) {
  const auto strides = full_strides(dims);
  i64 count = 1;
  for (int p : parts) count *= dims[static_cast<std::size_t>(p)];
  std::vector<i64> off(static_cast<std::size_t>(count), 0);
  i64 repeat = count;
  for (int p : parts) {
    const i64 d = dims[static_cast<std::size_t>(p)];
    const i64 stride = strides[static_cast<std::size_t>(p)];
    repeat /= d;
    i64 idx = 0;
    while (idx < count) {
      for (i64 digit = 0; digit < d; ++digit) {
        for (i64 r = 0; r < repeat; ++r) off[static_cast<std::size_t>(idx++)] += digit * stride;
      }
    }
  }
  return off;
}

std::vector<int> complement_of(std::span<const int> keep, int n) {
  std::vector<char> in(static_cast<std::size_t>(n), 0);
  for (int p : keep) {
    require(p >= 0 && p < n, "particle index out of range");
    require(!in[static_cast<std::size_t>(p)], "duplicate particle index");
    in[static_cast<std::size_t>(p)] = 1;
  }
  std::vector<int> rest;
  for (int p = 0; p < n; ++p) {
    if (!in[static_cast<std::size_t>(p)]) rest.push_back(p);
  }
  return rest;
}

// G = M M† for the row-major view (rows × rowlen); exactly Hermitian by
// construction.
ComplexMatrix gram_rows(const cplx* m, i64 rows, i64 rowlen) {
  ComplexMatrix g(rows, rows);
  for (i64 i = 0; i < rows; ++i) {
    for (i64 j = 0; j <= i; ++j) {
      const cplx v = kernels::dotc(m + j * rowlen, m + i * rowlen, static_cast<std::size_t>(rowlen));
      g(i, j) = v;
      g(j, i) = std::conj(v);
    }
    g(i, i) = cplx(g(i, i).real(), 0.0);
  }
  return g;
}

} // namespace

ComplexMatrix::ComplexMatrix(i64 r, i64 c) : rows(r), cols(c) {
  if (r < 0 || c < 0 || r > tol::kMaxMatrixDim || c > tol::kMaxMatrixDim) {
    throw std::length_error("matrix dimension exceeds the 4096 desk-scale cap");
  }
  a.assign(static_cast<std::size_t>(r * c), cplx(0.0, 0.0));
}

ComplexMatrix ComplexMatrix::identity(i64 n) {
  ComplexMatrix m(n, n);
  for (i64 i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

PureVector::PureVector(i64 d) : dim(d) {
  if (d < 1 || d > tol::kMaxVectorDim) {
    throw std::length_error("vector dimension exceeds the 2^18 desk-scale cap");
  }
  amps.assign(static_cast<std::size_t>(d), cplx(0.0, 0.0));
}

double PureVector::norm2() const {
  return kernels::sum_abs2(amps.data(), amps.size());
}

void PureVector::normalize() {
  const double n2 = norm2();
  if (n2 <= 0.0) throw std::invalid_argument("cannot normalize the zero vector");
  kernels::scal(cplx(1.0 / std::sqrt(n2), 0.0), amps.data(), amps.size());
}

double Spectrum::sum() const {
  return std::accumulate(values.begin(), values.end(), 0.0);
}

ComplexMatrix adjoint(const ComplexMatrix& m) {
  ComplexMatrix r(m.cols, m.rows);
  for (i64 i = 0; i < m.rows; ++i) {
    for (i64 j = 0; j < m.cols; ++j) r(j, i) = std::conj(m(i, j));
  }
  return r;
}

ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b) {
  require(a.cols == b.rows, "matmul dimension mismatch");
  ComplexMatrix c(a.rows, b.cols);
  for (i64 i = 0; i < a.rows; ++i) {
    cplx* ci = c.row(i);
    for (i64 k = 0; k < a.cols; ++k) {
      const cplx aik = a(i, k);
      if (aik == cplx(0.0, 0.0)) continue;
      kernels::axpy(aik, b.row(k), ci, static_cast<std::size_t>(b.cols));
    }
  }
  return c;
}

ComplexMatrix outer(const PureVector& v) {
  ComplexMatrix m(v.dim, v.dim);
  for (i64 i = 0; i < v.dim; ++i) {
    kernels::axpy_conj(v.amps[static_cast<std::size_t>(i)], v.amps.data(), m.row(i),
                       static_cast<std::size_t>(v.dim));
  }
  return m;
}

cplx trace(const ComplexMatrix& m) {
  require(m.square(), "trace requires a square matrix");
  cplx t = 0.0;
  for (i64 i = 0; i < m.rows; ++i) t += m(i, i);
  return t;
}

double max_abs(const ComplexMatrix& m) {
  double v = 0.0;
  for (const cplx& z : m.a) v = std::max(v, std::abs(z));
  return v;
}

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  require(a.rows == b.rows && a.cols == b.cols, "shape mismatch");
  double v = 0.0;
  for (std::size_t i = 0; i < a.a.size(); ++i) v = std::max(v, std::abs(a.a[i] - b.a[i]));
  return v;
}

double hermiticity_defect(const ComplexMatrix& m) {
  require(m.square(), "hermiticity check requires a square matrix");
  double v = 0.0;
  for (i64 i = 0; i < m.rows; ++i) {
    for (i64 j = 0; j <= i; ++j) v = std::max(v, std::abs(m(i, j) - std::conj(m(j, i))));
  }
  return v;
}

bool is_hermitian(const ComplexMatrix& m, double tolerance) {
  return m.square() && hermiticity_defect(m) <= tolerance;
}

void add_scaled(ComplexMatrix& acc, const ComplexMatrix& m, double w) {
  require(acc.rows == m.rows && acc.cols == m.cols, "shape mismatch");
  kernels::axpy(cplx(w, 0.0), m.a.data(), acc.a.data(), m.a.size());
}

ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows * b.rows > tol::kMaxMatrixDim || a.cols * b.cols > tol::kMaxMatrixDim) {
    throw std::length_error("tensor product exceeds the 4096 desk-scale matrix cap");
  }
  ComplexMatrix c(a.rows * b.rows, a.cols * b.cols);
  for (i64 ia = 0; ia < a.rows; ++ia) {
    for (i64 ib = 0; ib < b.rows; ++ib) {
      cplx* dst = c.row(ia * b.rows + ib);
      for (i64 ja = 0; ja < a.cols; ++ja) {
        kernels::axpy(a(ia, ja), b.row(ib), dst + ja * b.cols, static_cast<std::size_t>(b.cols));
      }
    }
  }
  return c;
}

PureVector tensor(const PureVector& a, const PureVector& b) {
  if (a.dim * b.dim > tol::kMaxVectorDim) {
    throw std::length_error("tensor product exceeds the 2^18 desk-scale vector cap");
  }
  PureVector c(a.dim * b.dim);
  for (i64 i = 0; i < a.dim; ++i) {
    kernels::axpy(a.amps[static_cast<std::size_t>(i)], b.amps.data(),
                  c.amps.data() + i * b.dim, static_cast<std::size_t>(b.dim));
  }
  return c;
}

ComplexMatrix partial_trace(const ComplexMatrix& m, std::span<const i64> dims,
                            std::span<const int> keep) {
  const i64 full = checked_product(dims);
  require(m.square() && m.rows == full, "matrix does not match the particle layout");
  std::vector<int> keep_sorted(keep.begin(), keep.end());
  std::sort(keep_sorted.begin(), keep_sorted.end());
  const auto rest = complement_of(keep_sorted, static_cast<int>(dims.size()));
  const auto off_keep = embedded_offsets(dims, keep_sorted);
  const auto off_rest = embedded_offsets(dims, rest);
  const i64 dk = static_cast<i64>(off_keep.size());
  ComplexMatrix out(dk, dk);
  for (i64 r = 0; r < dk; ++r) {
    for (i64 c = 0; c < dk; ++c) {
      cplx s = 0.0;
      for (const i64 t : off_rest) {
        s += m.a[static_cast<std::size_t>((off_keep[static_cast<std::size_t>(r)] + t) * full +
                                          off_keep[static_cast<std::size_t>(c)] + t)];
      }
      out(r, c) = s;
    }
  }
  return out;
}

ComplexMatrix partial_transpose(const ComplexMatrix& m, std::span<const i64> dims,
                                std::span<const int> flip) {
  const i64 full = checked_product(dims);
  require(m.square() && m.rows == full, "matrix does not match the particle layout");
  std::vector<int> flip_sorted(flip.begin(), flip.end());
  std::sort(flip_sorted.begin(), flip_sorted.end());
  const auto rest = complement_of(flip_sorted, static_cast<int>(dims.size()));
  const auto off_flip = embedded_offsets(dims, flip_sorted);
  const auto off_rest = embedded_offsets(dims, rest);
  ComplexMatrix out(full, full);
  for (const i64 fr : off_flip) {
    for (const i64 fc : off_flip) {
      for (const i64 rr : off_rest) {
        const cplx* src = m.row(fr + rr);
        cplx* dst = out.row(fc + rr);
        for (const i64 rc : off_rest) dst[fr + rc] = src[fc + rc];
      }
    }
  }
  return out;
}

namespace {

// map[old_index] = new_index for the particle reordering.
std::vector<i64> permutation_index_map(std::span<const i64> dims, std::span<const int> perm) {
  const int n = static_cast<int>(dims.size());
  require(static_cast<int>(perm.size()) == n, "permutation length mismatch");
  std::vector<int> slot_of(static_cast<std::size_t>(n), -1);
  for (int s = 0; s < n; ++s) {
    const int p = perm[static_cast<std::size_t>(s)];
    require(p >= 0 && p < n && slot_of[static_cast<std::size_t>(p)] == -1, "invalid permutation");
    slot_of[static_cast<std::size_t>(p)] = s;
  }
  std::vector<i64> new_dims(static_cast<std::size_t>(n));
  for (int s = 0; s < n; ++s) new_dims[static_cast<std::size_t>(s)] = dims[static_cast<std::size_t>(perm[s])];
  const auto new_strides = full_strides(new_dims);
  std::vector<i64> stride_for_old(static_cast<std::size_t>(n));
  for (int p = 0; p < n; ++p) {
    stride_for_old[static_cast<std::size_t>(p)] = new_strides[static_cast<std::size_t>(slot_of[p])];
  }
  const i64 full = checked_product(dims);
  const auto old_strides = full_strides(dims);
  std::vector<i64> map(static_cast<std::size_t>(full), 0);
  std::vector<i64> digits(static_cast<std::size_t>(n), 0);
  i64 cur = 0;
  for (i64 idx = 0; idx < full; ++idx) {
    map[static_cast<std::size_t>(idx)] = cur;
    // mixed-radix increment, least significant particle last
    for (int p = n - 1; p >= 0; --p) {
      cur += stride_for_old[static_cast<std::size_t>(p)];
      if (++digits[static_cast<std::size_t>(p)] < dims[static_cast<std::size_t>(p)]) break;
      digits[static_cast<std::size_t>(p)] = 0;
      cur -= stride_for_old[static_cast<std::size_t>(p)] * dims[static_cast<std::size_t>(p)];
    }
  }
  (void)old_strides;
  return map;
}

} // namespace

PureVector permute_particles(const PureVector& v, std::span<const i64> dims,
                             std::span<const int> perm) {
  require(v.dim == checked_product(dims), "vector does not match the particle layout");
  const auto map = permutation_index_map(dims, perm);
  PureVector out(v.dim);
  for (i64 i = 0; i < v.dim; ++i) {
    out.amps[static_cast<std::size_t>(map[static_cast<std::size_t>(i)])] =
        v.amps[static_cast<std::size_t>(i)];
  }
  return out;
}

ComplexMatrix permute_particles(const ComplexMatrix& m, std::span<const i64> dims,
                                std::span<const int> perm) {
  const i64 full = checked_product(dims);
  require(m.square() && m.rows == full, "matrix does not match the particle layout");
  const auto map = permutation_index_map(dims, perm);
  ComplexMatrix out(full, full);
  for (i64 i = 0; i < full; ++i) {
    const cplx* src = m.row(i);
    cplx* dst = out.row(map[static_cast<std::size_t>(i)]);
    for (i64 j = 0; j < full; ++j) dst[map[static_cast<std::size_t>(j)]] = src[j];
  }
  return out;
}

namespace {

// out(p, i, q) = Σ_j coef(op(i,j)) in(p, j, q) over contiguous post-slices.
void block_apply_raw(const cplx* in, cplx* out, i64 pre, i64 k, i64 post,
                     const ComplexMatrix& op, bool conj_op) {
  for (i64 p = 0; p < pre; ++p) {
    const cplx* in_base = in + p * k * post;
    cplx* out_base = out + p * k * post;
    for (i64 i = 0; i < k; ++i) {
      cplx* dst = out_base + i * post;
      for (i64 j = 0; j < k; ++j) {
        cplx c = op(i, j);
        if (conj_op) c = std::conj(c);
        if (c == cplx(0.0, 0.0)) continue;
        kernels::axpy(c, in_base + j * post, dst, static_cast<std::size_t>(post));
      }
    }
  }
}

void block_geometry(std::span<const i64> dims, int first, int count, i64& pre, i64& k, i64& post) {
  require(first >= 0 && count >= 0 && first + count <= static_cast<int>(dims.size()),
          "block out of range");
  pre = 1;
  k = 1;
  post = 1;
  for (int p = 0; p < first; ++p) pre *= dims[static_cast<std::size_t>(p)];
  for (int p = first; p < first + count; ++p) k *= dims[static_cast<std::size_t>(p)];
  for (int p = first + count; p < static_cast<int>(dims.size()); ++p) post *= dims[static_cast<std::size_t>(p)];
}

} // namespace

PureVector apply_block(const PureVector& v, std::span<const i64> dims, int first, int count,
                       const ComplexMatrix& op, bool conj_op) {
  require(v.dim == checked_product(dims), "vector does not match the particle layout");
  i64 pre, k, post;
  block_geometry(dims, first, count, pre, k, post);
  require(op.square() && op.rows == k, "operator does not match the block dimension");
  PureVector out(v.dim);
  block_apply_raw(v.amps.data(), out.amps.data(), pre, k, post, op, conj_op);
  return out;
}

ComplexMatrix conjugate_by_block(const ComplexMatrix& rho, std::span<const i64> dims, int first,
                                 int count, const ComplexMatrix& op) {
  const i64 full = checked_product(dims);
  require(rho.square() && rho.rows == full, "matrix does not match the particle layout");
  i64 pre, k, post;
  block_geometry(dims, first, count, pre, k, post);
  require(op.square() && op.rows == k, "operator does not match the block dimension");
  // rows: B = (I⊗U⊗I) ρ
  ComplexMatrix b(full, full);
  for (i64 p = 0; p < pre; ++p) {
    for (i64 i = 0; i < k; ++i) {
      for (i64 j = 0; j < k; ++j) {
        const cplx c = op(i, j);
        if (c == cplx(0.0, 0.0)) continue;
        for (i64 q = 0; q < post; ++q) {
          kernels::axpy(c, rho.row((p * k + j) * post + q), b.row((p * k + i) * post + q),
                        static_cast<std::size_t>(full));
        }
      }
    }
  }
  // columns: out = B (I⊗U⊗I)†, one row at a time
  ComplexMatrix out(full, full);
  for (i64 r = 0; r < full; ++r) {
    block_apply_raw(b.row(r), out.row(r), pre, k, post, op, /*conj_op=*/true);
  }
  return out;
}

ComplexMatrix reduced_density_pure(const PureVector& v, std::span<const i64> dims,
                                   std::span<const int> keep) {
  require(v.dim == checked_product(dims), "vector does not match the particle layout");
  std::vector<int> keep_sorted(keep.begin(), keep.end());
  std::sort(keep_sorted.begin(), keep_sorted.end());
  const auto rest = complement_of(keep_sorted, static_cast<int>(dims.size()));
  std::vector<int> perm(keep_sorted.begin(), keep_sorted.end());
  perm.insert(perm.end(), rest.begin(), rest.end());
  i64 dk = 1;
  for (int p : keep_sorted) dk *= dims[static_cast<std::size_t>(p)];
  if (dk > tol::kMaxMatrixDim) {
    throw std::length_error("reduced density exceeds the 4096 desk-scale matrix cap");
  }
  const PureVector reshaped = permute_particles(v, dims, perm);
  return gram_rows(reshaped.amps.data(), dk, v.dim / dk);
}

Spectrum reduced_spectrum_pure(const PureVector& v, std::span<const i64> dims,
                               std::span<const int> keep) {
  require(v.dim == checked_product(dims), "vector does not match the particle layout");
  std::vector<int> keep_sorted(keep.begin(), keep.end());
  std::sort(keep_sorted.begin(), keep_sorted.end());
  const auto rest = complement_of(keep_sorted, static_cast<int>(dims.size()));
  i64 dk = 1;
  for (int p : keep_sorted) dk *= dims[static_cast<std::size_t>(p)];
  // Same nonzero spectrum on both sides of a pure-state cut; Gram the smaller.
  const bool use_keep = dk <= v.dim / dk;
  const std::vector<int>& side = use_keep ? keep_sorted : rest;
  std::vector<int> perm(side.begin(), side.end());
  const std::vector<int>& other = use_keep ? rest : keep_sorted;
  perm.insert(perm.end(), other.begin(), other.end());
  const i64 ds = use_keep ? dk : v.dim / dk;
  const PureVector reshaped = permute_particles(v, dims, perm);
  const ComplexMatrix g = gram_rows(reshaped.amps.data(), ds, v.dim / ds);
  return hermitian_spectrum(g);
}

int numerical_rank(const Spectrum& s, double tolerance) {
  const double top = s.max_value();
  const double threshold = tolerance * std::max(top, 1e-300);
  int r = 0;
  for (double v : s.values) {
    if (v > threshold) ++r;
  }
  return r;
}

double trace_norm(const ComplexMatrix& m) {
  require(m.square(), "trace norm requires a square matrix");
  if (m.rows == 0) return 0.0;
  if (is_hermitian(m)) {
    const Spectrum s = hermitian_spectrum(m);
    double t = 0.0;
    for (double v : s.values) t += std::abs(v);
    return t;
  }
  const ComplexMatrix g = matmul(adjoint(m), m);
  ComplexMatrix h = g;
  // symmetrize away roundoff before the eigensolve
  for (i64 i = 0; i < h.rows; ++i) {
    for (i64 j = 0; j <= i; ++j) {
      const cplx v = 0.5 * (g(i, j) + std::conj(g(j, i)));
      h(i, j) = v;
      h(j, i) = std::conj(v);
    }
  }
  const Spectrum s = hermitian_spectrum(h);
  double t = 0.0;
  for (double v : s.values) t += std::sqrt(std::max(v, 0.0));
  return t;
}

} // namespace qnet
