#include "qmetro/matcore.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <iostream>

namespace qmetro {

double hermiticityDefect(const CMat& m) {
  if (m.rows() != m.cols()) {
    throw ContractError("hermiticityDefect: matrix must be square");
  }
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

CMat hermitize(const CMat& m) {
  const double defect = hermiticityDefect(m);
  if (defect > 1e-10) {
    std::cerr << "qmetro: warning: hermitize correcting defect " << defect
              << "\n";
  }
  return 0.5 * (m + m.adjoint());
}

DensityMatrix makeDensityMatrix(const CMat& m) {
  if (!m.allFinite()) {
    throw ContractError("DensityMatrix: entries must be finite");
  }
  CMat h = hermitize(m);
  const double tr = h.trace().real();
  if (std::abs(tr - 1.0) > kTraceTol) {
    throw ContractError("DensityMatrix: trace differs from 1 by " +
                        std::to_string(tr - 1.0));
  }
  Eigen::SelfAdjointEigenSolver<CMat> es(h, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -kPsdTol) {
    throw ContractError("DensityMatrix: negative eigenvalue " +
                        std::to_string(es.eigenvalues().minCoeff()));
  }
  return DensityMatrix{std::move(h)};
}

DensityMatrix pureState(const CVec& psi) {
  const double n = psi.norm();
  if (std::abs(n - 1.0) > 1e-10) {
    throw ContractError("pureState: vector norm differs from 1 by " +
                        std::to_string(n - 1.0));
  }
  return DensityMatrix{psi * psi.adjoint()};
}

CMat tensorProduct(const CMat& a, const CMat& b) {
  if (!a.allFinite() || !b.allFinite()) {
    throw ContractError("tensorProduct: inputs must be finite");
  }
  CMat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

EigenSystem hermitianEigen(const CMat& h) {
  if (hermiticityDefect(h) > 1e-9) {
    throw ContractError("hermitianEigen: input is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<CMat> es(h);
  if (es.info() != Eigen::Success) {
    throw SolverError("hermitianEigen: eigensolver failed");
  }
  return EigenSystem{es.eigenvalues(), es.eigenvectors()};
}

double traceAbs(const CMat& h) {
  if (hermiticityDefect(h) > 1e-9) {
    throw ContractError("traceAbs: input is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<CMat> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().sum();
}

bool isPsd(const CMat& h, double tol) {
  if (hermiticityDefect(h) > 1e-9) {
    throw ContractError("isPsd: input is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<CMat> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() >= -tol;
}

}  // namespace qmetro
