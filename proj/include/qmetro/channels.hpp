#ifndef QMETRO_CHANNELS_HPP
#define QMETRO_CHANNELS_HPP

#include <vector>

#include "qmetro/matcore.hpp"

namespace qmetro {

enum class ChannelKind { Decoherence, AmplitudeDamping, PhaseDamping, Identity };

enum class Axis { X, Y, Z };

ChannelKind channelKindFromString(const std::string& s);
std::string toString(ChannelKind k);
Axis axisFromString(char c);
char toChar(Axis a);

// Completely positive trace-preserving map in operator-sum form.
struct KrausChannel {
  Index dim = 0;
  std::vector<CMat> ops;
};

// Single-qubit noise channels with the standard Kraus sets:
//   decoherence       {sqrt(1-3e/4) I, sqrt(e/4) sx, sqrt(e/4) sy, sqrt(e/4) sz}
//   amplitude damping {[[1,0],[0,sqrt(1-p)]], [[0,sqrt(p)],[0,0]]}
//   phase damping     {sqrt(1-e/2) I, sqrt(e/2) sz}
//   identity          {I}
KrausChannel makeChannel(ChannelKind kind, double strength);

// Product channel {M_a (x) N_b} acting on a two-qubit system; the first
// factor acts on the probe qubit, the second on the ancilla.
KrausChannel liftToTwoQubits(const KrausChannel& first,
                             const KrausChannel& second);

DensityMatrix applyChannel(const KrausChannel& ch, const DensityMatrix& rho);

// Kraus map applied to an arbitrary (not necessarily positive) operator.
CMat applyChannelMap(const KrausChannel& ch, const CMat& m);

// State and derivatives at the operating point theta = 0.  The rotations
// R_j = exp(-i theta_j G_j / 2) act before the noise, with G_j the Pauli on
// the probe qubit (sigma_j (x) I for two-qubit probes), so
//   d rho / d theta_j = E( -i/2 [G_j, probe] ).
struct EstimationProblem {
  Index dim = 0;
  DensityMatrix rho;
  std::vector<CMat> derivs;  // Hermitian, traceless
  std::vector<Axis> axes;
  Index nParams() const { return static_cast<Index>(derivs.size()); }
};

EstimationProblem buildProblem(const DensityMatrix& probe,
                               const KrausChannel& ch,
                               const std::vector<Axis>& axes);

// rho^(x)M with product-rule derivatives.  Throws ResourceError when the
// lifted dimension exceeds 256.
EstimationProblem multiCopy(const EstimationProblem& p, int copies);

// Rotation generator for a given axis on a dim-2 or dim-4 system.
CMat rotationGenerator(Axis axis, Index dim);

// Finite rotation exp(-i tz G_z/2) exp(-i ty G_y/2) exp(-i tx G_x/2) for the
// Monte Carlo simulator; thetas are keyed by the problem axes.
CMat finiteRotation(const std::vector<Axis>& axes, const RVec& thetas,
                    Index dim);

}  // namespace qmetro

#endif  // QMETRO_CHANNELS_HPP
