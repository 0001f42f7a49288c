#ifndef QMETRO_MATCORE_HPP
#define QMETRO_MATCORE_HPP

#include "qmetro/types.hpp"

namespace qmetro {

// Density matrix: Hermitian, unit trace, positive semidefinite.
// Construct through makeDensityMatrix so the invariants are checked.
struct DensityMatrix {
  CMat rho;
  Index dim() const { return rho.rows(); }
};

// Hermiticity tolerances used throughout the library.
inline constexpr double kHermTol = 1e-12;
inline constexpr double kTraceTol = 1e-10;
inline constexpr double kPsdTol = 1e-10;

// Largest |h - h^dagger| entry.
double hermiticityDefect(const CMat& m);

// (m + m^dagger)/2.  Warns on stderr if the correction exceeds 1e-10.
CMat hermitize(const CMat& m);

// Validates Hermiticity (after symmetrization), trace 1 and positivity.
DensityMatrix makeDensityMatrix(const CMat& m);

// Pure state |psi><psi| from a normalized state vector.
DensityMatrix pureState(const CVec& psi);

// Kronecker product in the fixed lexicographic basis ordering.
CMat tensorProduct(const CMat& a, const CMat& b);

struct EigenSystem {
  RVec values;   // ascending
  CMat vectors;  // orthonormal columns
};

// Eigendecomposition of a Hermitian matrix; throws ContractError if the
// input is not Hermitian.
EigenSystem hermitianEigen(const CMat& h);

// Sum of |eigenvalue| over the spectrum of a Hermitian matrix.
double traceAbs(const CMat& h);

// True iff the smallest eigenvalue is >= -tol.
bool isPsd(const CMat& h, double tol);

// Frobenius inner product Re Tr(a^dagger b) convenience.
inline double realTraceProduct(const CMat& a, const CMat& b) {
  return (a.adjoint() * b).trace().real();
}

}  // namespace qmetro

#endif  // QMETRO_MATCORE_HPP
