#pragma once

#include <cstdint>

namespace qnet::tol {

// Single table of numeric tolerances and size caps used across the library.
// Values are referenced by name everywhere; nothing re-declares its own copy.

// Structural checks on inputs.
inline constexpr double kHermitian = 1e-10;      // max |M - M†| for "hermitian" inputs
inline constexpr double kUnitNorm = 1e-10;       // |Σ|amp|² - 1| for pure vectors
inline constexpr double kTraceOne = 1e-10;       // |tr ρ - 1| at construction
inline constexpr double kTraceOneLoose = 1e-8;   // entropy refuses inputs beyond this
inline constexpr double kMixWeights = 1e-12;     // |Σ p - 1| for mixture weights

// Eigenvalue handling for entropies.
inline constexpr double kEigFloor = 1e-12;       // below this an eigenvalue is exact zero
inline constexpr double kEigNegative = -1e-9;    // below this the density matrix is broken

// Numerical rank.
inline constexpr double kRankRel = 1e-8;         // relative threshold on eigenvalues

// Certification slacks.
inline constexpr double kCertEntropy = 1e-7;     // entropy-derived quantities (I4, additivity)
inline constexpr double kCertAlgebraic = 1e-9;   // exact algebraic identities
inline constexpr double kCertInequality = 1e-8;  // one-sided inequality slack (SSA, bounds)
inline constexpr double kCertChannelSign = 1e-9; // I4 >= -this after channel pairs

// Size caps (dense desk-scale arithmetic only).
inline constexpr std::int64_t kMaxVectorDim = std::int64_t{1} << 18;
inline constexpr std::int64_t kMaxMatrixDim = 4096;
// Matrices at the cap are allowed but worth a warning on construction paths
// that can reach them (classical mixtures of the 12-qubit topologies).
inline constexpr std::int64_t kWarnMatrixDim = 4096;

} // namespace qnet::tol
