#include "qmetro/measurements.hpp"

#include <cmath>

#include "qmetro/rng.hpp"

namespace qmetro {

PovmDiagnostics validatePovm(const Povm& m, double tol) {
  PovmDiagnostics diag;
  if (m.elements.empty()) {
    diag.pass = false;
    return diag;
  }
  CMat sum = CMat::Zero(m.dim, m.dim);
  for (const CMat& e : m.elements) {
    if (e.rows() != m.dim || e.cols() != m.dim) {
      throw ContractError("validatePovm: element dimension mismatch");
    }
    const EigenSystem es = hermitianEigen(hermitize(e));
    diag.maxPsdViolation =
        std::max(diag.maxPsdViolation, std::max(0.0, -es.values.minCoeff()));
    sum += e;
  }
  diag.completenessResidual =
      (sum - CMat::Identity(m.dim, m.dim)).cwiseAbs().maxCoeff();
  diag.pass = diag.maxPsdViolation <= tol && diag.completenessResidual <= tol;
  return diag;
}

namespace {

void checkUnbiased(const EstimationProblem& p, const Povm& m,
                   const Estimator& e) {
  const Index n = p.nParams();
  const Index k = m.outcomes();
  if (e.coeffs.rows() != n || e.coeffs.cols() != k) {
    throw ContractError("estimator: coefficient shape mismatch");
  }
  if (m.dim != p.dim) {
    throw ContractError("estimator: POVM dimension mismatch");
  }
  for (Index j = 0; j < n; ++j) {
    double mean = 0;
    for (Index x = 0; x < k; ++x) {
      mean += e.coeffs(j, x) * (p.rho.rho * m.elements[x]).trace().real();
    }
    if (std::abs(mean) > 1e-8) {
      throw ContractError("estimator: sum_k xi_" + std::to_string(j) +
                          ",k p_k = " + std::to_string(mean) +
                          " violates zero-mean");
    }
    for (Index i = 0; i < n; ++i) {
      double s = 0;
      for (Index x = 0; x < k; ++x) {
        s += e.coeffs(j, x) * (p.derivs[i] * m.elements[x]).trace().real();
      }
      const double want = (i == j) ? 1.0 : 0.0;
      if (std::abs(s - want) > 1e-8) {
        throw ContractError("estimator: sum_k xi_" + std::to_string(j) +
                            ",k dp_k/dtheta_" + std::to_string(i) + " = " +
                            std::to_string(s) + ", expected " +
                            std::to_string(want));
      }
    }
  }
}

}  // namespace

MseReport asymptoticMse(const EstimationProblem& p, const Povm& m,
                        const Estimator& e) {
  checkUnbiased(p, m, e);
  const Index n = p.nParams();
  const Index k = m.outcomes();
  RVec prob(k);
  for (Index x = 0; x < k; ++x) {
    prob(x) = (p.rho.rho * m.elements[x]).trace().real();
  }
  MseReport rep;
  rep.v_matrix = RMat::Zero(n, n);
  for (Index x = 0; x < k; ++x) {
    rep.v_matrix += prob(x) * e.coeffs.col(x) * e.coeffs.col(x).transpose();
  }
  rep.total = rep.v_matrix.trace();
  for (Index j = 0; j < n; ++j) rep.per_parameter.push_back(rep.v_matrix(j, j));
  return rep;
}

MonteCarloReport monteCarloMse(const FiniteProblem& fp, const RVec& thetaTrue,
                               const Povm& m, const Estimator& e,
                               std::uint64_t shots, std::uint64_t seed) {
  const Index n = static_cast<Index>(fp.axes.size());
  if (thetaTrue.size() != n) {
    throw ContractError("monteCarloMse: theta size mismatch");
  }
  if (thetaTrue.cwiseAbs().maxCoeff() > 0.05) {
    throw ContractError("monteCarloMse: |theta| must be <= 0.05 rad per axis");
  }
  if (shots < 1000) {
    throw ContractError("monteCarloMse: need at least 10^3 shots");
  }

  CMat u;
  if (fp.copies == 2) {
    const CMat u1 = finiteRotation(fp.axes, thetaTrue, 2);
    u = tensorProduct(u1, u1);
  } else {
    u = finiteRotation(fp.axes, thetaTrue, fp.probe.dim());
  }
  const CMat rotated = u * fp.probe.rho * u.adjoint();
  const CMat rhoTheta = applyChannelMap(fp.channel, rotated);

  const Index k = m.outcomes();
  if (e.coeffs.rows() != n || e.coeffs.cols() != k) {
    throw ContractError("monteCarloMse: estimator shape mismatch");
  }
  RVec prob(k);
  for (Index x = 0; x < k; ++x) {
    prob(x) = std::max(0.0, (rhoTheta * m.elements[x]).trace().real());
  }
  const double norm = prob.sum();
  if (std::abs(norm - 1.0) > 1e-9) {
    throw ContractError("monteCarloMse: outcome probabilities sum to " +
                        std::to_string(norm));
  }
  RVec cdf(k);
  double acc = 0;
  for (Index x = 0; x < k; ++x) {
    acc += prob(x);
    cdf(x) = acc;
  }
  cdf(k - 1) = 1.0;

  std::mt19937_64 rng = seededEngine(seed, 0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  // Accumulate per-shot estimate moments: mean, second moment about
  // theta_true, and the fourth-order pieces needed for standard errors.
  RVec sum1 = RVec::Zero(n);
  RMat sum2 = RMat::Zero(n, n);
  RVec sum2Diag2 = RVec::Zero(n);  // sum of (xi_j - t_j)^4
  double sumTot = 0, sumTot2 = 0;
  for (std::uint64_t s = 0; s < shots; ++s) {
    const double r = unif(rng);
    Index pick = 0;
    while (pick < k - 1 && r > cdf(pick)) ++pick;
    const RVec xi = e.coeffs.col(pick);
    const RVec dev = xi - thetaTrue;
    sum1 += xi;
    sum2 += dev * dev.transpose();
    for (Index j = 0; j < n; ++j) {
      sum2Diag2(j) += dev(j) * dev(j) * dev(j) * dev(j);
    }
    const double tot = dev.squaredNorm();
    sumTot += tot;
    sumTot2 += tot * tot;
  }
  const double ns = static_cast<double>(shots);

  MonteCarloReport rep;
  rep.shots = shots;
  rep.mse.v_matrix = sum2 / ns;
  rep.mse.total = rep.mse.v_matrix.trace();
  for (Index j = 0; j < n; ++j) {
    const double m2 = sum2(j, j) / ns;
    rep.mse.per_parameter.push_back(m2);
    const double var4 = std::max(0.0, sum2Diag2(j) / ns - m2 * m2);
    rep.se.push_back(std::sqrt(var4 / ns));
    rep.mean.push_back(sum1(j) / ns);
  }
  const double mTot = sumTot / ns;
  rep.totalSe = std::sqrt(std::max(0.0, sumTot2 / ns - mTot * mTot) / ns);
  for (Index j = 0; j < n; ++j) {
    const double varJ =
        std::max(0.0, sum2(j, j) / ns - std::pow(rep.mean[j] - thetaTrue(j), 2));
    rep.meanSe.push_back(std::sqrt(varJ / ns));
  }
  return rep;
}

std::vector<TradeoffPoint> tradeoffCurve(
    double epsilon, const std::vector<std::pair<double, double>>& grid) {
  std::vector<TradeoffPoint> out;
  for (const auto& [a, b] : grid) {
    SchemeParams params;
    params.noise = epsilon;
    params.a = a;
    params.b = b;
    const Scheme sch = schemeLibrary("dc_2q_5outcome", params);
    const MseReport rep = asymptoticMse(sch.problem, sch.povm, sch.est);
    out.push_back({a, b, rep.per_parameter[0], rep.per_parameter[1]});
  }
  return out;
}

}  // namespace qmetro
