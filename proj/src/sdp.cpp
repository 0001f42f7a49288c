#include "qmetro/sdp.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <cstdlib>
#include <iostream>
#include <limits>

namespace qmetro {

RMat embedHermitian(const CMat& h) {
  if (hermiticityDefect(h) > 1e-9) {
    throw ContractError("embedHermitian: input is not Hermitian");
  }
  const Index d = h.rows();
  RMat out(2 * d, 2 * d);
  out.topLeftCorner(d, d) = h.real();
  out.bottomRightCorner(d, d) = h.real();
  out.topRightCorner(d, d) = -h.imag();
  out.bottomLeftCorner(d, d) = h.imag();
  return 0.5 * (out + out.transpose());
}

void SymMat::add(int r, int c, double v) {
  if (v == 0.0) return;
  rows.push_back(r);
  cols.push_back(c);
  vals.push_back(v);
  if (r != c) {
    rows.push_back(c);
    cols.push_back(r);
    vals.push_back(v);
  }
}

void SymMat::addDense(const RMat& m, int rowOffset, int colOffset) {
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) {
      const double v = m(r, c);
      if (v != 0.0) {
        rows.push_back(static_cast<int>(r) + rowOffset);
        cols.push_back(static_cast<int>(c) + colOffset);
        vals.push_back(v);
      }
    }
  }
}

RMat SymMat::dense(int d) const {
  RMat m = RMat::Zero(d, d);
  for (std::size_t k = 0; k < vals.size(); ++k) m(rows[k], cols[k]) += vals[k];
  return m;
}

double SymMat::inner(const RMat& m) const {
  double s = 0;
  for (std::size_t k = 0; k < vals.size(); ++k) s += vals[k] * m(rows[k], cols[k]);
  return s;
}

double SymMat::maxAbs() const {
  double s = 0;
  for (double v : vals) s = std::max(s, std::abs(v));
  return s;
}

namespace {

// Largest alpha in (0,1] with s + alpha*ds PSD, shrunk by 0.98.
double maxStep(const RMat& s, const RMat& ds) {
  Eigen::LLT<RMat> llt(s);
  if (llt.info() != Eigen::Success) return 0.0;
  const RMat l = llt.matrixL();
  RMat w = l.triangularView<Eigen::Lower>().solve(ds);
  w = l.triangularView<Eigen::Lower>().solve(w.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<RMat> es(0.5 * (w + w.transpose()),
                                         Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues().minCoeff();
  if (lmin >= -1e-14) return 1.0;
  return std::min(1.0, -0.98 / lmin);
}

}  // namespace

namespace {

SdpSolution solveSdpOnce(const SdpProblem& p, const SdpOptions& opts,
                         double initScale) {
  const Index m = p.numVars();
  const std::size_t nb = p.blockDims.size();
  if (p.f0.size() != nb || static_cast<Index>(p.fi.size()) != m) {
    throw ContractError("solveSdp: inconsistent problem dimensions");
  }

  double totalDim = 0;
  for (int d : p.blockDims) {
    if (d <= 0) throw ContractError("solveSdp: block dims must be positive");
    totalDim += d;
  }

  double scaleF = 1.0, scaleC = std::max(1.0, p.c.cwiseAbs().maxCoeff());
  for (const auto& b : p.f0) scaleF = std::max(scaleF, b.maxAbs());
  for (const auto& var : p.fi) {
    for (const auto& b : var) scaleF = std::max(scaleF, b.maxAbs());
  }

  // Iterates.
  RVec y = RVec::Zero(m);
  std::vector<RMat> S(nb), Z(nb);
  for (std::size_t b = 0; b < nb; ++b) {
    S[b] = initScale * scaleF * RMat::Identity(p.blockDims[b], p.blockDims[b]);
    Z[b] = initScale * scaleC * RMat::Identity(p.blockDims[b], p.blockDims[b]);
  }

  std::vector<RMat> f0d(nb);
  for (std::size_t b = 0; b < nb; ++b) f0d[b] = p.f0[b].dense(p.blockDims[b]);

  SdpSolution sol;
  std::vector<RMat> Rp(nb), Sinv(nb), Rhs(nb);
  std::vector<RMat> dSaff(nb), dZaff(nb), dS(nb), dZ(nb);
  RVec rd(m);

  // Iterates can drift once the Schur system degenerates near the optimum;
  // remember the best nearly-feasible point seen and fall back to it.
  SdpSolution best;
  best.gap = std::numeric_limits<double>::infinity();
  int stallCount = 0;

  for (int iter = 0; iter < opts.maxIter; ++iter) {
    sol.iterations = iter;

    // Residuals.
    double pinf = 0;
    for (std::size_t b = 0; b < nb; ++b) {
      Rp[b] = f0d[b] - S[b];
      for (Index i = 0; i < m; ++i) {
        if (y(i) != 0.0) {
          for (std::size_t k = 0; k < p.fi[i][b].vals.size(); ++k) {
            Rp[b](p.fi[i][b].rows[k], p.fi[i][b].cols[k]) +=
                y(i) * p.fi[i][b].vals[k];
          }
        }
      }
      pinf = std::max(pinf, Rp[b].cwiseAbs().maxCoeff());
    }
    double dinf = 0;
    for (Index i = 0; i < m; ++i) {
      double zi = 0;
      for (std::size_t b = 0; b < nb; ++b) zi += p.fi[i][b].inner(Z[b]);
      rd(i) = p.c(i) - zi;
      dinf = std::max(dinf, std::abs(rd(i)));
    }

    double gapAbs = 0;
    for (std::size_t b = 0; b < nb; ++b) {
      gapAbs += (S[b].cwiseProduct(Z[b])).sum();
    }
    const double mu = gapAbs / totalDim;

    sol.primalValue = p.c.dot(y);
    sol.dualValue = 0;
    for (std::size_t b = 0; b < nb; ++b) sol.dualValue -= (f0d[b].cwiseProduct(Z[b])).sum();
    const double relGap = std::abs(sol.primalValue - sol.dualValue) /
                          (1.0 + std::abs(sol.primalValue) + std::abs(sol.dualValue));
    sol.gap = relGap;
    sol.y = y;

    if (opts.verbose || getenv("QMETRO_SDP_VERBOSE")) {
      std::cerr << "sdp iter " << iter << " obj " << sol.primalValue
                << " dual " << sol.dualValue << " gap " << relGap << " mu " << mu << " pinf "
                << pinf / scaleF << " dinf " << dinf / scaleC << "\n";
    }

    if (pinf < opts.tol * scaleF * 10 && dinf < opts.tol * scaleC * 10 &&
        relGap < best.gap) {
      best = sol;
    }
    if (relGap < opts.tol && pinf < opts.tol * scaleF * 10 &&
        dinf < opts.tol * scaleC * 10) {
      sol.status = SdpStatus::Optimal;
      return sol;
    }
    if (std::abs(sol.dualValue) > 1e12 * scaleC * scaleF) {
      sol.status = SdpStatus::Infeasible;
      return sol;
    }

    // Factor S and invert per block.
    for (std::size_t b = 0; b < nb; ++b) {
      Eigen::LLT<RMat> llt(S[b]);
      if (llt.info() != Eigen::Success) {
        // Lost positive definiteness to round-off; nudge and retry.
        Eigen::LLT<RMat> llt2(
            S[b] + 1e-12 * scaleF * RMat::Identity(S[b].rows(), S[b].cols()));
        if (llt2.info() != Eigen::Success) {
          sol.status = SdpStatus::MaxIter;
          return sol;
        }
        Sinv[b] = llt2.solve(RMat::Identity(S[b].rows(), S[b].cols()));
      } else {
        Sinv[b] = llt.solve(RMat::Identity(S[b].rows(), S[b].cols()));
      }
    }

    // Schur complement B_ij = sum_b Tr(F_i Z F_j Sinv).
    RMat B(m, m);
    for (Index j = 0; j < m; ++j) {
      std::vector<RMat> Nj(nb);
      for (std::size_t b = 0; b < nb; ++b) {
        Nj[b] = Z[b] * p.fi[j][b].dense(p.blockDims[b]) * Sinv[b];
      }
      for (Index i = 0; i < m; ++i) {
        double s = 0;
        for (std::size_t b = 0; b < nb; ++b) s += p.fi[i][b].inner(Nj[b]);
        B(i, j) = s;
      }
    }
    B = 0.5 * (B + B.transpose()).eval();
    Eigen::LDLT<RMat> bldlt(B);

    // The Schur complement goes numerically singular as mu -> 0. Solve with
    // one refinement step; if the residual is still poor, refactor with a
    // tiny diagonal shift for stability.
    bool shifted = false;
    auto schurSolve = [&](const RVec& rhs) {
      RVec dy = bldlt.solve(rhs);
      dy += bldlt.solve(RVec(rhs - B * dy));
      const double res = (rhs - B * dy).norm();
      if (res > 1e-6 * (1.0 + rhs.norm()) && !shifted) {
        B.diagonal().array() += 1e-14 * B.diagonal().cwiseAbs().maxCoeff();
        bldlt.compute(B);
        shifted = true;
        dy = bldlt.solve(rhs);
        dy += bldlt.solve(RVec(rhs - B * dy));
      }
      return dy;
    };

    auto solveDirection = [&](double sigmaMu, const std::vector<RMat>* corr,
                              std::vector<RMat>& dSout,
                              std::vector<RMat>& dZout) {
      RVec rhs(m);
      for (std::size_t b = 0; b < nb; ++b) {
        Rhs[b] = -Z[b] - Z[b] * Rp[b] * Sinv[b];
        if (sigmaMu > 0) Rhs[b] += sigmaMu * Sinv[b];
        if (corr) Rhs[b] -= (*corr)[b] * Sinv[b];
      }
      for (Index i = 0; i < m; ++i) {
        double s = -rd(i);
        for (std::size_t b = 0; b < nb; ++b) s += p.fi[i][b].inner(Rhs[b]);
        rhs(i) = s;
      }
      RVec dy = schurSolve(rhs);
      for (std::size_t b = 0; b < nb; ++b) {
        RMat ds = Rp[b];
        for (Index i = 0; i < m; ++i) {
          if (dy(i) != 0.0) {
            for (std::size_t k = 0; k < p.fi[i][b].vals.size(); ++k) {
              ds(p.fi[i][b].rows[k], p.fi[i][b].cols[k]) +=
                  dy(i) * p.fi[i][b].vals[k];
            }
          }
        }
        ds = 0.5 * (ds + ds.transpose()).eval();
        RMat dz = -Z[b] - Z[b] * ds * Sinv[b];
        if (sigmaMu > 0) dz += sigmaMu * Sinv[b];
        if (corr) dz -= (*corr)[b] * Sinv[b];
        dSout[b] = ds;
        dZout[b] = 0.5 * (dz + dz.transpose()).eval();
      }
      return dy;
    };

    // Predictor (affine) direction.
    RVec dyAff = solveDirection(0.0, nullptr, dSaff, dZaff);
    double aAff = 1.0, bAff = 1.0;
    for (std::size_t b = 0; b < nb; ++b) {
      aAff = std::min(aAff, maxStep(S[b], dSaff[b]));
      bAff = std::min(bAff, maxStep(Z[b], dZaff[b]));
    }
    double gapAff = 0;
    for (std::size_t b = 0; b < nb; ++b) {
      gapAff += ((S[b] + aAff * dSaff[b]).cwiseProduct(Z[b] + bAff * dZaff[b])).sum();
    }
    double sigma = std::pow(std::max(gapAff, 0.0) / gapAbs, 3.0);
    sigma = std::min(1.0, std::max(sigma, 1e-8));

    // Corrector.
    std::vector<RMat> corr(nb);
    for (std::size_t b = 0; b < nb; ++b) corr[b] = dZaff[b] * dSaff[b];
    RVec dy = solveDirection(sigma * mu, &corr, dS, dZ);

    double alpha = 1.0, beta = 1.0;
    for (std::size_t b = 0; b < nb; ++b) {
      alpha = std::min(alpha, maxStep(S[b], dS[b]));
      beta = std::min(beta, maxStep(Z[b], dZ[b]));
    }
    if (getenv("QMETRO_SDP_VERBOSE")) {
      std::cerr << "  aAff " << aAff << " bAff " << bAff << " sigma " << sigma
                << " alpha " << alpha << " beta " << beta << "\n";
    }
    stallCount = (alpha < 1e-4 && beta < 1e-4) ? stallCount + 1 : 0;
    if ((alpha < 1e-10 && beta < 1e-10) || stallCount >= 10) {
      // No further progress possible; report the best point seen.
      sol.status = SdpStatus::MaxIter;
      if (best.gap < sol.gap) {
        best.status = SdpStatus::MaxIter;
        best.iterations = sol.iterations;
        return best;
      }
      return sol;
    }

    y += alpha * dy;
    for (std::size_t b = 0; b < nb; ++b) {
      S[b] += alpha * dS[b];
      Z[b] += beta * dZ[b];
      S[b] = 0.5 * (S[b] + S[b].transpose()).eval();
      Z[b] = 0.5 * (Z[b] + Z[b].transpose()).eval();
    }
    (void)dyAff;
  }

  sol.status = SdpStatus::MaxIter;
  if (best.gap < sol.gap) {
    best.status = SdpStatus::MaxIter;
    best.iterations = sol.iterations;
    return best;
  }
  return sol;
}

}  // namespace

SdpSolution solveSdp(const SdpProblem& p, const SdpOptions& opts) {
  SdpSolution sol = solveSdpOnce(p, opts, 10.0);
  if (sol.status == SdpStatus::MaxIter && sol.gap > opts.tol) {
    // Degenerate instances can stall on one trajectory yet converge from a
    // different starting point; retry once from a colder start.
    SdpSolution retry = solveSdpOnce(p, opts, 1000.0);
    if (retry.status == SdpStatus::Optimal || retry.gap < sol.gap) return retry;
  }
  return sol;
}

}  // namespace qmetro
