#ifndef QMETRO_PROBES_HPP
#define QMETRO_PROBES_HPP

#include <cstdint>
#include <vector>

#include "qmetro/bounds.hpp"

namespace qmetro {

enum class ProbeKind { Bloch, Bell, Weighted, Raw };

// bloch(theta, phi): cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>
// bell(k):  |psi_0>=(|01>+|10>)/sqrt2, |psi_1>=(|01>-|10>)/sqrt2,
//           |psi_2>=(|00>+|11>)/sqrt2, |psi_3>=(|00>-|11>)/sqrt2
// weighted(a): a|01> + sqrt(1-a^2)|10>
struct ProbeSpec {
  ProbeKind kind = ProbeKind::Bloch;
  int qubits = 1;
  double theta = 0, phi = 0;  // bloch
  int bellIndex = 0;          // bell
  double weightedA = 0;       // weighted
  CVec raw;                   // raw
};

DensityMatrix buildProbe(const ProbeSpec& s);

std::vector<DensityMatrix> haarRandom(int qubits, int n, std::uint64_t seed);

struct OptimizeResult {
  CVec probe;                         // best state vector found
  BoundResult bound;                  // bound at the best probe
  std::vector<double> restartValues;  // best value per restart
  bool discontinuity = false;         // on-point vs perturbed gap > 1e-3
  double onPointValue = 0;
  double nearbyValue = 0;             // best value at delta-perturbed probes
};

// Multi-start Nelder-Mead over a hyperspherical parameterization of pure
// states (2^{q+1}-2 real angles, global phase fixed).  Best-effort: the
// returned value is an upper bound on the true optimum.
OptimizeResult optimizeProbe(const KrausChannel& ch,
                             const std::vector<Axis>& axes, BoundKind kind,
                             int qubits, int restarts = 16,
                             std::uint64_t seed = 1);

}  // namespace qmetro

#endif  // QMETRO_PROBES_HPP
