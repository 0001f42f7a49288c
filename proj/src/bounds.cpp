#include "qmetro/bounds.hpp"

#include <Eigen/QR>

#include <cmath>
#include <limits>

namespace qmetro {

std::string toString(BoundKind k) {
  switch (k) {
    case BoundKind::Sld: return "sld";
    case BoundKind::Holevo: return "holevo";
    case BoundKind::Nhb: return "nhb";
  }
  throw ContractError("invalid bound kind");
}

namespace {

// Orthogonal-ish Hermitian coordinate basis: d diagonal units, then for each
// a<b a symmetric and an antisymmetric off-diagonal unit.
std::vector<CMat> hermitianBasis(Index d) {
  std::vector<CMat> basis;
  basis.reserve(d * d);
  for (Index a = 0; a < d; ++a) {
    CMat m = CMat::Zero(d, d);
    m(a, a) = 1.0;
    basis.push_back(std::move(m));
  }
  for (Index a = 0; a < d; ++a) {
    for (Index b = a + 1; b < d; ++b) {
      CMat s = CMat::Zero(d, d);
      s(a, b) = 1.0;
      s(b, a) = 1.0;
      basis.push_back(std::move(s));
      CMat t = CMat::Zero(d, d);
      t(a, b) = -I_UNIT;
      t(b, a) = I_UNIT;
      basis.push_back(std::move(t));
    }
  }
  return basis;
}

// Tr(a b) for Hermitian a, b is real.
double hermTrace(const CMat& a, const CMat& b) {
  return (a * b).trace().real();
}

CMat zMatrix(const DensityMatrix& rho, const std::vector<CMat>& x) {
  const Index n = static_cast<Index>(x.size());
  CMat z(n, n);
  for (Index j = 0; j < n; ++j) {
    for (Index k = 0; k < n; ++k) {
      z(j, k) = (rho.rho * x[j] * x[k]).trace();
    }
  }
  return z;
}

void requireSolved(const SdpSolution& sol, const char* what) {
  if (sol.status == SdpStatus::Infeasible) {
    throw SolverError(std::string(what) + ": SDP reported infeasibility");
  }
  if (sol.status != SdpStatus::Optimal && sol.gap > 1e-7) {
    throw SolverError(std::string(what) + ": SDP did not converge (gap " +
                      std::to_string(sol.gap) + ")");
  }
}

}  // namespace

std::vector<CMat> UnbiasedFamily::assemble(const RVec& yFree, Index n,
                                           Index d) const {
  const Index h = d * d;
  RVec x = x0;
  if (yFree.size() > 0) x += basis * yFree;
  std::vector<CMat> ops;
  for (Index j = 0; j < n; ++j) {
    CMat xj = CMat::Zero(d, d);
    for (Index m = 0; m < h; ++m) xj += x(j * h + m) * hermBasis[m];
    ops.push_back(std::move(xj));
  }
  return ops;
}

UnbiasedFamily unbiasedFamily(const EstimationProblem& p) {
  const Index n = p.nParams();
  const Index d = p.dim;
  const Index h = d * d;
  const Index nVars = n * h;

  UnbiasedFamily fam;
  fam.hermBasis = hermitianBasis(d);

  // Rows: Tr{rho X_j} = 0 for each j, then Tr{d_i rho X_k} = delta_ik.
  const Index nRows = n + n * n;
  RMat a = RMat::Zero(nRows, nVars);
  RVec b = RVec::Zero(nRows);
  for (Index j = 0; j < n; ++j) {
    for (Index m = 0; m < h; ++m) {
      a(j, j * h + m) = hermTrace(p.rho.rho, fam.hermBasis[m]);
    }
  }
  for (Index i = 0; i < n; ++i) {
    for (Index k = 0; k < n; ++k) {
      const Index row = n + i * n + k;
      for (Index m = 0; m < h; ++m) {
        a(row, k * h + m) = hermTrace(p.derivs[i], fam.hermBasis[m]);
      }
      b(row) = (i == k) ? 1.0 : 0.0;
    }
  }

  Eigen::ColPivHouseholderQR<RMat> qr(a);
  qr.setThreshold(1e-10);
  const Index rank = qr.rank();
  fam.x0 = qr.solve(b);
  // Dependent constraint rows make some unbiasedness requirement infeasible
  // in exact arithmetic; numerically the solver would instead fit the
  // noise-level rows with a ~1e16-norm estimator.  Reject both cases.
  if (rank < nRows || (a * fam.x0 - b).cwiseAbs().maxCoeff() > 1e-8) {
    throw ContractError(
        "unbiasedness constraints infeasible: a parameter has no "
        "independent signature in the state (linearly dependent "
        "derivatives)");
  }

  const Index nFree = nVars - rank;
  fam.basis = RMat::Zero(nVars, nFree);
  if (nFree > 0) {
    const RMat r = qr.matrixR()
                       .topLeftCorner(rank, nVars)
                       .template triangularView<Eigen::Upper>();
    const RMat r11 = r.leftCols(rank);
    const RMat r12 = r.rightCols(nFree);
    const RMat t = -r11.template triangularView<Eigen::Upper>().solve(r12);
    RVec perm(nVars);
    for (Index f = 0; f < nFree; ++f) {
      perm.setZero();
      perm.head(rank) = t.col(f);
      perm(rank + f) = 1.0;
      fam.basis.col(f) = qr.colsPermutation() * perm;
    }
  }
  return fam;
}

SldData sldData(const EstimationProblem& p) {
  const Index n = p.nParams();
  const EigenSystem es = hermitianEigen(p.rho.rho);
  const double tau = 1e-12;

  bool anyPair = false;
  SldData out;
  for (Index k = 0; k < n; ++k) {
    CMat m = es.vectors.adjoint() * p.derivs[k] * es.vectors;
    for (Index r = 0; r < m.rows(); ++r) {
      for (Index c = 0; c < m.cols(); ++c) {
        const double s = es.values(r) + es.values(c);
        if (s > tau) {
          m(r, c) *= 2.0 / s;
          anyPair = true;
        } else {
          m(r, c) = 0.0;
        }
      }
    }
    out.operators.push_back(hermitize(es.vectors * m * es.vectors.adjoint()));
  }
  if (!anyPair) {
    throw ContractError("sldData: all eigenvalue pair sums below threshold");
  }
  out.qfi = RMat(n, n);
  for (Index j = 0; j < n; ++j) {
    for (Index k = 0; k < n; ++k) {
      out.qfi(j, k) = hermTrace(p.derivs[j], out.operators[k]);
    }
  }
  out.qfi = 0.5 * (out.qfi + out.qfi.transpose()).eval();
  return out;
}

BoundResult sldBound(const EstimationProblem& p) {
  const Index n = p.nParams();
  const SldData sld = sldData(p);
  BoundResult res;
  res.kind = BoundKind::Sld;

  Eigen::FullPivLU<RMat> lu(sld.qfi);
  lu.setThreshold(1e-12);
  if (lu.rank() < n) {
    // Unbounded variance: signalled by value, not by an exception, so that
    // sweeps over degenerate grid points keep running.
    res.value = std::numeric_limits<double>::infinity();
    return res;
  }
  const RMat jinv = lu.inverse();
  res.value = (n == 1) ? 1.0 / sld.qfi(0, 0) : jinv.trace();
  for (Index j = 0; j < n; ++j) res.per_parameter.push_back(jinv(j, j));
  // X_j = sum_k (J^-1)_jk L_k is locally unbiased and attains J^-1 for
  // commuting SLDs; exported as a certificate seed.
  for (Index j = 0; j < n; ++j) {
    CMat xj = CMat::Zero(p.dim, p.dim);
    for (Index k = 0; k < n; ++k) xj += jinv(j, k) * sld.operators[k];
    res.x_ops.push_back(std::move(xj));
  }
  return res;
}

BoundResult holevoBound(const EstimationProblem& p, double tol) {
  const Index n = p.nParams();
  const Index d = p.dim;
  const UnbiasedFamily fam = unbiasedFamily(p);
  const Index nFree = fam.basis.cols();

  // Support compression: Z_jk depends on X_j only through
  // W_j = diag(sqrt(lambda)) U_r^dag X_j, an r x d matrix.
  const EigenSystem es = hermitianEigen(p.rho.rho);
  std::vector<Index> support;
  for (Index i = 0; i < d; ++i) {
    if (es.values(i) > 1e-12) support.push_back(i);
  }
  const Index r = static_cast<Index>(support.size());
  CMat proj(r, d);  // diag(sqrt(lambda)) U_r^dag
  for (Index i = 0; i < r; ++i) {
    proj.row(i) =
        std::sqrt(es.values(support[i])) * es.vectors.col(support[i]).adjoint();
  }

  const Index nc = n + r * d;  // complex block size
  auto gCol = [&](const CMat& xj) -> CVec {
    const CMat w = proj * xj;
    return CVec(Eigen::Map<const CVec>(w.data(), w.size()));
  };

  // Variables: V_ab for a<=b, then the free X coordinates.
  const Index nV = n * (n + 1) / 2;
  SdpProblem prob;
  prob.blockDims = {static_cast<int>(2 * nc)};
  prob.c = RVec::Zero(nV + nFree);
  prob.fi.resize(nV + nFree);

  {
    CMat f0 = CMat::Zero(nc, nc);
    f0.bottomRightCorner(r * d, r * d) = CMat::Identity(r * d, r * d);
    const std::vector<CMat> x0 = fam.assemble(RVec(), n, d);
    for (Index j = 0; j < n; ++j) {
      const CVec g = gCol(x0[j]);
      f0.block(n, j, r * d, 1) = g;
      f0.block(j, n, 1, r * d) = g.adjoint();
    }
    prob.f0.resize(1);
    prob.f0[0].addDense(embedHermitian(f0));
  }

  Index v = 0;
  for (Index a = 0; a < n; ++a) {
    for (Index b = a; b < n; ++b, ++v) {
      CMat delta = CMat::Zero(nc, nc);
      delta(a, b) = 1.0;
      delta(b, a) = 1.0;
      if (a == b) {
        delta(a, a) = 1.0;
        prob.c(v) = 1.0;  // objective: trace(V)
      }
      prob.fi[v].resize(1);
      prob.fi[v][0].addDense(embedHermitian(delta));
    }
  }
  // Free directions living entirely off the support of rho cannot change Z;
  // their G-couplings are rounding noise (~1e-18) that the solver would
  // otherwise amplify by huge y into spurious cancellations.  Drop them.
  const Index h = d * d;
  std::vector<Index> kept;
  for (Index f = 0; f < nFree; ++f) {
    CMat delta = CMat::Zero(nc, nc);
    for (Index j = 0; j < n; ++j) {
      CMat dx = CMat::Zero(d, d);
      for (Index m = 0; m < h; ++m) {
        const double w = fam.basis(j * h + m, f);
        if (w != 0.0) dx += w * fam.hermBasis[m];
      }
      if (dx.cwiseAbs().maxCoeff() == 0.0) continue;
      const CVec g = gCol(dx);
      delta.block(n, j, r * d, 1) += g;
      delta.block(j, n, 1, r * d) += g.adjoint();
    }
    if (delta.cwiseAbs().maxCoeff() < 1e-10) continue;
    kept.push_back(f);
    prob.fi[v].resize(1);
    prob.fi[v][0].addDense(embedHermitian(delta));
    ++v;
  }
  prob.fi.resize(v);
  prob.c.conservativeResize(v);

  SdpOptions opts;
  opts.tol = tol;
  const SdpSolution sol = solveSdp(prob, opts);
  requireSolved(sol, "holevoBound");

  RVec yFree = RVec::Zero(nFree);
  for (std::size_t i = 0; i < kept.size(); ++i) {
    yFree(kept[i]) = sol.y(nV + static_cast<Index>(i));
  }

  BoundResult res;
  res.kind = BoundKind::Holevo;
  res.value = sol.primalValue;
  res.gap = sol.gap;
  res.x_ops = fam.assemble(yFree, n, d);
  res.z_matrix = zMatrix(p.rho, res.x_ops);
  v = 0;
  for (Index a = 0; a < n; ++a) {
    for (Index b = a; b < n; ++b, ++v) {
      if (a == b) res.per_parameter.push_back(sol.y(v));
    }
  }
  return res;
}

BoundResult nhb(const EstimationProblem& p, double tol) {
  const Index n = p.nParams();
  const Index d = p.dim;
  const UnbiasedFamily fam = unbiasedFamily(p);
  const Index nFree = fam.basis.cols();
  const Index h = d * d;

  const Index nL = n * (n + 1) / 2 * h;
  if (nL + nFree > 12000) {
    throw ResourceError("nhb: SDP variable count exceeds supported size");
  }

  const Index nc = n * d + d;  // [[L, X],[X^dag, I_d]]
  SdpProblem prob;
  prob.blockDims = {static_cast<int>(2 * nc)};
  prob.c = RVec::Zero(nL + nFree);
  prob.fi.resize(nL + nFree);

  {
    CMat f0 = CMat::Zero(nc, nc);
    f0.bottomRightCorner(d, d) = CMat::Identity(d, d);
    const std::vector<CMat> x0 = fam.assemble(RVec(), n, d);
    for (Index j = 0; j < n; ++j) {
      f0.block(j * d, n * d, d, d) = x0[j];
      f0.block(n * d, j * d, d, d) = x0[j];  // X_j Hermitian
    }
    prob.f0.resize(1);
    prob.f0[0].addDense(embedHermitian(f0));
  }

  // L variables: Hermitian basis element m placed in blocks (j,k) and (k,j).
  Index v = 0;
  for (Index j = 0; j < n; ++j) {
    for (Index k = j; k < n; ++k) {
      for (Index m = 0; m < h; ++m, ++v) {
        CMat delta = CMat::Zero(nc, nc);
        delta.block(j * d, k * d, d, d) = fam.hermBasis[m];
        if (j != k) delta.block(k * d, j * d, d, d) = fam.hermBasis[m];
        if (j == k) {
          prob.c(v) = hermTrace(p.rho.rho, fam.hermBasis[m]);
        }
        prob.fi[v].resize(1);
        prob.fi[v][0].addDense(embedHermitian(delta));
      }
    }
  }
  for (Index f = 0; f < nFree; ++f, ++v) {
    CMat delta = CMat::Zero(nc, nc);
    for (Index j = 0; j < n; ++j) {
      CMat dx = CMat::Zero(d, d);
      for (Index m = 0; m < h; ++m) {
        const double w = fam.basis(j * h + m, f);
        if (w != 0.0) dx += w * fam.hermBasis[m];
      }
      delta.block(j * d, n * d, d, d) += dx;
      delta.block(n * d, j * d, d, d) += dx;
    }
    prob.fi[v].resize(1);
    prob.fi[v][0].addDense(embedHermitian(delta));
  }

  SdpOptions opts;
  opts.tol = tol;
  const SdpSolution sol = solveSdp(prob, opts);
  requireSolved(sol, "nhb");

  BoundResult res;
  res.kind = BoundKind::Nhb;
  res.value = sol.primalValue;
  res.gap = sol.gap;
  res.x_ops = fam.assemble(sol.y.tail(nFree), n, d);
  res.z_matrix = zMatrix(p.rho, res.x_ops);
  // Variance split from the classical-block diagonal Tr{rho L_jj}.
  v = 0;
  for (Index j = 0; j < n; ++j) {
    for (Index k = j; k < n; ++k) {
      if (k == j) {
        CMat ljj = CMat::Zero(d, d);
        for (Index m = 0; m < h; ++m) ljj += sol.y(v + m) * fam.hermBasis[m];
        res.per_parameter.push_back(hermTrace(p.rho.rho, ljj));
      }
      v += h;
    }
  }
  return res;
}

double evalHolevoCandidate(const EstimationProblem& p,
                           const std::vector<CMat>& xOps) {
  const Index n = p.nParams();
  if (static_cast<Index>(xOps.size()) != n) {
    throw ContractError("evalHolevoCandidate: need one X per parameter");
  }
  for (Index j = 0; j < n; ++j) {
    if (hermiticityDefect(xOps[j]) > 1e-9 || xOps[j].rows() != p.dim) {
      throw ContractError("evalHolevoCandidate: X_" + std::to_string(j) +
                          " is not Hermitian of the problem dimension");
    }
    const double mean = hermTrace(p.rho.rho, xOps[j]);
    if (std::abs(mean) > 1e-8) {
      throw ContractError("evalHolevoCandidate: Tr{rho X_" +
                          std::to_string(j) + "} = " + std::to_string(mean) +
                          " violates zero-mean constraint");
    }
    for (Index k = 0; k < n; ++k) {
      const double der = hermTrace(p.derivs[k], xOps[j]);
      const double want = (j == k) ? 1.0 : 0.0;
      if (std::abs(der - want) > 1e-8) {
        throw ContractError("evalHolevoCandidate: Tr{d_" + std::to_string(k) +
                            " rho X_" + std::to_string(j) + "} = " +
                            std::to_string(der) + ", expected " +
                            std::to_string(want));
      }
    }
  }
  const CMat z = zMatrix(p.rho, xOps);
  const CMat imPart = I_UNIT * z.imag().cast<Complex>();
  return z.trace().real() + traceAbs(imPart);
}

BoundResult copyScaledBounds(const EstimationProblem& p, int copies,
                             BoundKind kind) {
  if (kind != BoundKind::Holevo && kind != BoundKind::Nhb) {
    throw ContractError("copyScaledBounds: kind must be holevo or nhb");
  }
  const EstimationProblem lifted = multiCopy(p, copies);
  BoundResult res =
      (kind == BoundKind::Holevo) ? holevoBound(lifted) : nhb(lifted);
  res.value *= copies;
  for (double& vpp : res.per_parameter) vpp *= copies;
  return res;
}

}  // namespace qmetro
