#ifndef QMETRO_BOUNDS_HPP
#define QMETRO_BOUNDS_HPP

#include <optional>
#include <vector>

#include "qmetro/channels.hpp"
#include "qmetro/sdp.hpp"

namespace qmetro {

enum class BoundKind { Sld, Holevo, Nhb };

std::string toString(BoundKind k);

struct BoundResult {
  BoundKind kind = BoundKind::Sld;
  double value = 0;                     // sum of variances
  std::vector<CMat> x_ops;              // optimal estimator observables
  CMat z_matrix;                        // n x n, empty when not applicable
  double gap = 0;                       // solver relative gap (0 for sld)
  std::vector<double> per_parameter;    // diagnostic variance split
};

struct SldData {
  std::vector<CMat> operators;  // L_k
  RMat qfi;                     // J, real symmetric PSD
};

// L_k = 2 sum_{m,p: lm+lp > tau} |em><em| d_k rho |ep><ep| / (lm+lp),
// J_jk = Re Tr{d_j rho L_k}.
SldData sldData(const EstimationProblem& p);

// 1/J for one parameter, trace(J^-1) otherwise.  A singular J yields
// value = +infinity rather than an exception.
BoundResult sldBound(const EstimationProblem& p);

// Holevo bound H = min_X Tr Z[X] + TrAbs{Im Z[X]} over locally unbiased
// Hermitian X, solved as an SDP with an epigraph matrix V >= Z[X].
BoundResult holevoBound(const EstimationProblem& p, double tol = 1e-8);

// Nagaoka-Hayashi bound: min Tr{(1_n (x) rho) L} over block-symmetric L
// with Hermitian blocks and L >= X X^T, via the Schur-complement lift.
BoundResult nhb(const EstimationProblem& p, double tol = 1e-8);

// Evaluates Tr Z[X] + TrAbs{Im Z[X]} for caller-supplied X operators.
// Throws ContractError naming the violated constraint if the operators are
// not locally unbiased within 1e-8.
double evalHolevoCandidate(const EstimationProblem& p,
                           const std::vector<CMat>& xOps);

// M * bound(multiCopy(p, M)): collective-measurement value scaled to the
// per-copy resource count.
BoundResult copyScaledBounds(const EstimationProblem& p, int copies,
                             BoundKind kind);

// Internal helper shared with tests: affine parameterization of the locally
// unbiased X family.  x = x0 + basis * y over the Hermitian coordinate
// vectors of (X_1 .. X_n) stacked; throws ContractError when the constraint
// system is infeasible (linearly dependent derivatives).
struct UnbiasedFamily {
  std::vector<CMat> hermBasis;  // d^2 Hermitian basis matrices
  RVec x0;                      // particular solution, length n*d^2
  RMat basis;                   // (n*d^2) x nFree sparse-ish columns
  std::vector<CMat> assemble(const RVec& yFree, Index n, Index d) const;
};
UnbiasedFamily unbiasedFamily(const EstimationProblem& p);

}  // namespace qmetro

#endif  // QMETRO_BOUNDS_HPP
