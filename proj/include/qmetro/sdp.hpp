#ifndef QMETRO_SDP_HPP
#define QMETRO_SDP_HPP

#include <vector>

#include "qmetro/matcore.hpp"

namespace qmetro {

// Real embedding [[Re h, -Im h],[Im h, Re h]] of a Hermitian matrix; it is
// PSD iff h is, with every eigenvalue duplicated.
RMat embedHermitian(const CMat& h);

// Sparse symmetric matrix stored as an explicit full entry list.
struct SymMat {
  std::vector<int> rows;
  std::vector<int> cols;
  std::vector<double> vals;

  // Adds entry (r,c) and, when off-diagonal, its mirror (c,r).
  void add(int r, int c, double v);
  // Adds the full entry pattern of a dense symmetric matrix (drops zeros).
  void addDense(const RMat& m, int rowOffset = 0, int colOffset = 0);
  RMat dense(int d) const;
  // sum_k vals[k] * m(rows[k], cols[k]) == Tr(this * m) for symmetric m.
  double inner(const RMat& m) const;
  double maxAbs() const;
};

// Linear matrix inequality program
//   minimize c^T y   subject to   F0 + sum_i y_i F_i  PSD  (per block).
struct SdpProblem {
  RVec c;
  std::vector<int> blockDims;
  std::vector<SymMat> f0;                // per block
  std::vector<std::vector<SymMat>> fi;   // [variable][block]

  Index numVars() const { return c.size(); }
};

enum class SdpStatus { Optimal, Infeasible, MaxIter };

struct SdpOptions {
  double tol = 1e-8;
  int maxIter = 200;
  bool verbose = false;
};

struct SdpSolution {
  SdpStatus status = SdpStatus::MaxIter;
  RVec y;                 // variables at termination
  double primalValue = 0; // c^T y
  double dualValue = 0;   // -<F0, Z>, a lower bound on the optimum
  double gap = 0;         // relative primal-dual gap
  int iterations = 0;
};

// Dense primal-dual path-following interior-point solver (HKM directions
// with a Mehrotra corrector).  Deterministic: no randomization, fixed
// iteration order.
SdpSolution solveSdp(const SdpProblem& p, const SdpOptions& opts = {});

}  // namespace qmetro

#endif  // QMETRO_SDP_HPP
