#include "qmetro/channels.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>

namespace qmetro {

ChannelKind channelKindFromString(const std::string& s) {
  if (s == "decoherence") return ChannelKind::Decoherence;
  if (s == "amplitude_damping") return ChannelKind::AmplitudeDamping;
  if (s == "phase_damping") return ChannelKind::PhaseDamping;
  if (s == "identity") return ChannelKind::Identity;
  throw ContractError("unknown channel kind: " + s);
}

std::string toString(ChannelKind k) {
  switch (k) {
    case ChannelKind::Decoherence: return "decoherence";
    case ChannelKind::AmplitudeDamping: return "amplitude_damping";
    case ChannelKind::PhaseDamping: return "phase_damping";
    case ChannelKind::Identity: return "identity";
  }
  throw ContractError("invalid channel kind");
}

Axis axisFromString(char c) {
  switch (c) {
    case 'x': return Axis::X;
    case 'y': return Axis::Y;
    case 'z': return Axis::Z;
  }
  throw ContractError(std::string("unknown axis: ") + c);
}

char toChar(Axis a) {
  switch (a) {
    case Axis::X: return 'x';
    case Axis::Y: return 'y';
    case Axis::Z: return 'z';
  }
  throw ContractError("invalid axis");
}

namespace {

void checkCompleteness(const KrausChannel& ch) {
  CMat sum = CMat::Zero(ch.dim, ch.dim);
  for (const CMat& m : ch.ops) sum += m.adjoint() * m;
  if ((sum - CMat::Identity(ch.dim, ch.dim)).cwiseAbs().maxCoeff() > 1e-10) {
    throw ContractError("KrausChannel: completeness relation violated");
  }
}

}  // namespace

KrausChannel makeChannel(ChannelKind kind, double strength) {
  if (strength < 0.0 || strength > 1.0) {
    throw ContractError("channel strength must lie in [0,1]");
  }
  KrausChannel ch;
  ch.dim = 2;
  const CMat id = CMat::Identity(2, 2);
  switch (kind) {
    case ChannelKind::Decoherence:
      ch.ops = {std::sqrt(1.0 - 0.75 * strength) * id,
                std::sqrt(0.25 * strength) * pauliX(),
                std::sqrt(0.25 * strength) * pauliY(),
                std::sqrt(0.25 * strength) * pauliZ()};
      break;
    case ChannelKind::AmplitudeDamping: {
      CMat m0(2, 2), m1(2, 2);
      m0 << 1, 0, 0, std::sqrt(1.0 - strength);
      m1 << 0, std::sqrt(strength), 0, 0;
      ch.ops = {m0, m1};
      break;
    }
    case ChannelKind::PhaseDamping:
      ch.ops = {std::sqrt(1.0 - 0.5 * strength) * id,
                std::sqrt(0.5 * strength) * pauliZ()};
      break;
    case ChannelKind::Identity:
      ch.ops = {id};
      break;
  }
  checkCompleteness(ch);
  return ch;
}

KrausChannel liftToTwoQubits(const KrausChannel& first,
                             const KrausChannel& second) {
  if (first.dim != 2 || second.dim != 2) {
    throw ContractError("liftToTwoQubits: both channels must have dim 2");
  }
  KrausChannel ch;
  ch.dim = 4;
  for (const CMat& a : first.ops) {
    for (const CMat& b : second.ops) {
      ch.ops.push_back(tensorProduct(a, b));
    }
  }
  checkCompleteness(ch);
  return ch;
}

CMat applyChannelMap(const KrausChannel& ch, const CMat& m) {
  if (m.rows() != ch.dim || m.cols() != ch.dim) {
    throw ContractError("applyChannel: dimension mismatch");
  }
  CMat out = CMat::Zero(ch.dim, ch.dim);
  for (const CMat& k : ch.ops) out += k * m * k.adjoint();
  return out;
}

DensityMatrix applyChannel(const KrausChannel& ch, const DensityMatrix& rho) {
  return makeDensityMatrix(applyChannelMap(ch, rho.rho));
}

CMat rotationGenerator(Axis axis, Index dim) {
  CMat sigma;
  switch (axis) {
    case Axis::X: sigma = pauliX(); break;
    case Axis::Y: sigma = pauliY(); break;
    case Axis::Z: sigma = pauliZ(); break;
  }
  if (dim == 2) return sigma;
  if (dim == 4) return tensorProduct(sigma, CMat::Identity(2, 2));
  throw ContractError("rotationGenerator: dim must be 2 or 4");
}

EstimationProblem buildProblem(const DensityMatrix& probe,
                               const KrausChannel& ch,
                               const std::vector<Axis>& axes) {
  if (axes.empty()) throw ContractError("buildProblem: axes must be nonempty");
  if (probe.dim() != 2 && probe.dim() != 4) {
    throw ContractError("buildProblem: probe dim must be 2 or 4");
  }
  if (probe.dim() != ch.dim) {
    throw ContractError("buildProblem: channel dim does not match probe");
  }
  for (std::size_t i = 0; i < axes.size(); ++i) {
    for (std::size_t j = i + 1; j < axes.size(); ++j) {
      if (axes[i] == axes[j]) {
        throw ContractError("buildProblem: duplicate axis");
      }
    }
  }
  EstimationProblem p;
  p.dim = probe.dim();
  p.rho = applyChannel(ch, probe);
  p.axes = axes;
  for (Axis a : axes) {
    const CMat g = rotationGenerator(a, p.dim);
    // d/dtheta at 0 of exp(-i t g/2) rho exp(+i t g/2), pushed through the
    // (linear) channel.
    const CMat pre = -0.5 * I_UNIT * (g * probe.rho - probe.rho * g);
    p.derivs.push_back(hermitize(applyChannelMap(ch, pre)));
  }
  return p;
}

EstimationProblem multiCopy(const EstimationProblem& p, int copies) {
  if (copies < 1) throw ContractError("multiCopy: copies must be >= 1");
  if (copies == 1) return p;
  double lifted = 1.0;
  for (int i = 0; i < copies; ++i) {
    lifted *= static_cast<double>(p.dim);
    if (lifted > 256.0) {
      throw ResourceError("multiCopy: lifted dimension exceeds 256");
    }
  }
  EstimationProblem out;
  out.dim = static_cast<Index>(lifted);
  out.axes = p.axes;

  CMat rhoM = p.rho.rho;
  for (int i = 1; i < copies; ++i) rhoM = tensorProduct(rhoM, p.rho.rho);
  out.rho = makeDensityMatrix(rhoM);

  for (const CMat& d : p.derivs) {
    CMat total = CMat::Zero(out.dim, out.dim);
    for (int slot = 0; slot < copies; ++slot) {
      CMat term = (slot == 0) ? d : p.rho.rho;
      for (int i = 1; i < copies; ++i) {
        term = tensorProduct(term, (i == slot) ? d : p.rho.rho);
      }
      total += term;
    }
    out.derivs.push_back(std::move(total));
  }
  return out;
}

CMat finiteRotation(const std::vector<Axis>& axes, const RVec& thetas,
                    Index dim) {
  if (static_cast<Index>(axes.size()) != thetas.size()) {
    throw ContractError("finiteRotation: axes/thetas size mismatch");
  }
  double tx = 0, ty = 0, tz = 0;
  for (Index i = 0; i < thetas.size(); ++i) {
    switch (axes[i]) {
      case Axis::X: tx = thetas(i); break;
      case Axis::Y: ty = thetas(i); break;
      case Axis::Z: tz = thetas(i); break;
    }
  }
  // z * y * x product order; immaterial at theta = 0.
  const CMat u = (-0.5 * I_UNIT * tz * rotationGenerator(Axis::Z, dim)).exp() *
                 (-0.5 * I_UNIT * ty * rotationGenerator(Axis::Y, dim)).exp() *
                 (-0.5 * I_UNIT * tx * rotationGenerator(Axis::X, dim)).exp();
  return u;
}

}  // namespace qmetro
