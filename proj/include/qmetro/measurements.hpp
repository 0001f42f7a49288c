#ifndef QMETRO_MEASUREMENTS_HPP
#define QMETRO_MEASUREMENTS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "qmetro/channels.hpp"

namespace qmetro {

struct Povm {
  Index dim = 0;
  std::vector<CMat> elements;
  Index outcomes() const { return static_cast<Index>(elements.size()); }
};

// Locally unbiased estimator coefficients; row j holds the per-outcome
// contribution to the estimate of parameter j (radians).
struct Estimator {
  RMat coeffs;  // n x K
};

struct PovmDiagnostics {
  double maxPsdViolation = 0;
  double completenessResidual = 0;
  bool pass = false;
};

PovmDiagnostics validatePovm(const Povm& m, double tol = 1e-10);

struct MseReport {
  RMat v_matrix;                      // n x n
  double total = 0;                   // trace
  std::vector<double> per_parameter;  // diagonal
};

// V_jk = sum_x xi_jx xi_kx p_x at theta = 0.  Checks local unbiasedness of
// the estimator against the problem within 1e-8 and throws ContractError
// naming the violated constraint otherwise.
MseReport asymptoticMse(const EstimationProblem& p, const Povm& m,
                        const Estimator& e);

// A physical configuration the Monte Carlo simulator can rotate: the
// pre-channel probe, the (already probe-dimensioned) channel, and the axes.
// copies=2 means probe/channel live on two copies of a single qubit and the
// rotation acts as U (x) U.
struct FiniteProblem {
  DensityMatrix probe;
  KrausChannel channel;
  std::vector<Axis> axes;
  int copies = 1;
};

struct MonteCarloReport {
  MseReport mse;                 // empirical (xi - theta_true) second moments x shots
  std::vector<double> se;        // standard error of each diagonal entry
  double totalSe = 0;            // standard error of the total
  std::vector<double> mean;      // empirical mean estimate per parameter
  std::vector<double> meanSe;    // its standard error
  std::uint64_t shots = 0;
};

MonteCarloReport monteCarloMse(const FiniteProblem& fp, const RVec& thetaTrue,
                               const Povm& m, const Estimator& e,
                               std::uint64_t shots, std::uint64_t seed);

// A packaged appendix scheme: POVM + estimator plus the problem they are
// unbiased for and the physical configuration for simulation.
struct Scheme {
  std::string name;
  Povm povm;
  Estimator est;
  EstimationProblem problem;
  FiniteProblem finite;
};

struct SchemeParams {
  double noise = 0;             // epsilon or p of the channel
  double a = 0.7071067811865476;
  double b = 0.7071067811865476;
  double delta = 1e-3;          // pd_2q_3param split size
  double nxFraction = -1;       // pd_split_basis; negative selects optimum
  double probeA = -1;           // pd_split_basis probe amplitude on |0>
};

// name in {dc_1q_4outcome, dc_1q_4outcome_1param, dc_2q_5outcome,
// dc_2q_3param_7outcome, dc_2copy_5outcome, ad_1q_4outcome,
// ad_1q_4outcome_1param, ad_2copy_5outcome, pd_split_basis, pd_2q_5outcome,
// pd_2q_3param}.
Scheme schemeLibrary(const std::string& name, const SchemeParams& params);

std::vector<std::string> schemeNames();

// App. D trade-off family: per-(a,b) variances (v_x, v_y).
struct TradeoffPoint {
  double a = 0, b = 0, vx = 0, vy = 0;
};
std::vector<TradeoffPoint> tradeoffCurve(
    double epsilon, const std::vector<std::pair<double, double>>& grid);

}  // namespace qmetro

#endif  // QMETRO_MEASUREMENTS_HPP
