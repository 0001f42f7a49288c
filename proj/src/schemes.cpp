#include <cmath>

#include "qmetro/measurements.hpp"

namespace qmetro {

namespace {

const double kInvSqrt2 = 0.7071067811865475244;

CMat proj(const CVec& v) { return v * v.adjoint(); }

CVec vec4(Complex c0, Complex c1, Complex c2, Complex c3) {
  CVec v(4);
  v << c0, c1, c2, c3;
  return v;
}

DensityMatrix bellPsi0() {
  CVec v = (basisKet(4, 1) + basisKet(4, 2)) * kInvSqrt2;
  return pureState(v);
}

// The appendix estimators assign +/-c to one outcome pair per parameter.
// The magnitude c is the printed coefficient; the orientation follows from
// the sign of the derivative, which fixes the rotation-sense convention.
void setPair(Estimator& e, const EstimationProblem& p, const Povm& m,
             Index param, Index kPos, Index kNeg, double c) {
  const double slope =
      c * ((p.derivs[param] * (m.elements[kPos] - m.elements[kNeg]))
               .trace()
               .real());
  if (std::abs(slope) < 1e-12) {
    throw ContractError("scheme estimator singular: outcome pair carries no "
                        "signal for parameter " + std::to_string(param));
  }
  const double s = slope > 0 ? 1.0 : -1.0;
  e.coeffs(param, kPos) = s * c;
  e.coeffs(param, kNeg) = -s * c;
}

// App. C / G projector quartet shared by the decoherence and amplitude
// damping single-qubit schemes.
std::vector<CMat> quartet1q() {
  const CVec k0 = basisKet(2, 0), k1 = basisKet(2, 1);
  return {proj((-I_UNIT * k0 + k1) / 2.0), proj((I_UNIT * k0 + k1) / 2.0),
          proj((k0 + k1) / 2.0), proj((-k0 + k1) / 2.0)};
}

// Five-outcome family on two qubits: four sub-normalised projectors plus the
// completion element.
Povm fiveOutcome(const CVec& f1, const CVec& f2, const CVec& f3,
                 const CVec& f4) {
  Povm m;
  m.dim = 4;
  m.elements = {proj(f1), proj(f2), proj(f3), proj(f4)};
  CMat rest = CMat::Identity(4, 4);
  for (const CMat& e : m.elements) rest -= e;
  m.elements.push_back(hermitize(rest));
  return m;
}

Scheme singleQubitQuartet(ChannelKind kind, double noise, int probeKet,
                          bool twoParam, double coeff,
                          const std::string& name) {
  Scheme sch;
  sch.name = name;
  sch.finite.probe = pureState(basisKet(2, probeKet));
  sch.finite.channel = makeChannel(kind, noise);
  sch.finite.axes = twoParam ? std::vector<Axis>{Axis::X, Axis::Y}
                             : std::vector<Axis>{Axis::X};
  sch.problem =
      buildProblem(sch.finite.probe, sch.finite.channel, sch.finite.axes);

  const std::vector<CMat> quartet = quartet1q();
  sch.povm.dim = 2;
  if (twoParam) {
    sch.povm.elements = quartet;
    sch.est.coeffs = RMat::Zero(2, 4);
    setPair(sch.est, sch.problem, sch.povm, 0, 0, 1, coeff);
    setPair(sch.est, sch.problem, sch.povm, 1, 2, 3, coeff);
  } else {
    // Keep only the x pair, doubled so it is complete on its own.
    sch.povm.elements = {2.0 * quartet[0], 2.0 * quartet[1]};
    sch.est.coeffs = RMat::Zero(1, 2);
    setPair(sch.est, sch.problem, sch.povm, 0, 0, 1, coeff / 2.0);
  }
  return sch;
}

Scheme twoCopyScheme(ChannelKind kind, double noise, int probeKet, double a,
                     double b, double coeffA, double coeffB,
                     const std::string& name) {
  if (a == 0.0 || b == 0.0) {
    throw ContractError(name + ": parameters a, b must be nonzero");
  }
  Scheme sch;
  sch.name = name;
  const KrausChannel ch = makeChannel(kind, noise);
  const DensityMatrix perCopy = pureState(basisKet(2, probeKet));
  sch.problem = multiCopy(
      buildProblem(perCopy, ch, {Axis::X, Axis::Y}), 2);
  sch.finite.probe =
      pureState(tensorProduct(basisKet(2, probeKet), basisKet(2, probeKet))
                    .col(0));
  sch.finite.channel = liftToTwoQubits(ch, ch);
  sch.finite.axes = {Axis::X, Axis::Y};
  sch.finite.copies = 2;

  // App. F projector family (also used for the amplitude damping channel).
  sch.povm = fiveOutcome(vec4(0.5, 0.5 * a * I_UNIT, 0.5 * a * I_UNIT, -0.5),
                         vec4(0.5, -0.5 * a * I_UNIT, -0.5 * a * I_UNIT, -0.5),
                         vec4(0.5, -0.5 * b, -0.5 * b, 0.5),
                         vec4(0.5, 0.5 * b, 0.5 * b, 0.5));
  sch.est.coeffs = RMat::Zero(2, 5);
  setPair(sch.est, sch.problem, sch.povm, 0, 0, 1, coeffA);
  setPair(sch.est, sch.problem, sch.povm, 1, 2, 3, coeffB);
  return sch;
}

}  // namespace

Scheme schemeLibrary(const std::string& name, const SchemeParams& params) {
  const double eps = params.noise;
  const double a = params.a;
  const double b = params.b;

  if (name == "dc_1q_4outcome") {
    return singleQubitQuartet(ChannelKind::Decoherence, eps, 0, true,
                              2.0 / (1.0 - eps), name);
  }
  if (name == "dc_1q_4outcome_1param") {
    return singleQubitQuartet(ChannelKind::Decoherence, eps, 0, false,
                              2.0 / (1.0 - eps), name);
  }
  if (name == "ad_1q_4outcome") {
    return singleQubitQuartet(ChannelKind::AmplitudeDamping, eps, 1, true,
                              2.0 / std::sqrt(1.0 - eps), name);
  }
  if (name == "ad_1q_4outcome_1param") {
    return singleQubitQuartet(ChannelKind::AmplitudeDamping, eps, 1, false,
                              2.0 / std::sqrt(1.0 - eps), name);
  }
  if (name == "dc_2copy_5outcome") {
    return twoCopyScheme(ChannelKind::Decoherence, eps, 0, a, b,
                         1.0 / ((1.0 - eps) * a), 1.0 / ((1.0 - eps) * b),
                         name);
  }
  if (name == "ad_2copy_5outcome") {
    return twoCopyScheme(ChannelKind::AmplitudeDamping, eps, 1, a, b,
                         1.0 / (a * std::sqrt(1.0 - eps)),
                         1.0 / (b * std::sqrt(1.0 - eps)), name);
  }
  if (name == "dc_2q_5outcome" || name == "pd_2q_5outcome") {
    if (a == 0.0 || b == 0.0) {
      throw ContractError(name + ": parameters a, b must be nonzero");
    }
    const bool dc = name[0] == 'd';
    Scheme sch;
    sch.name = name;
    sch.finite.probe = bellPsi0();
    sch.finite.channel = liftToTwoQubits(
        makeChannel(dc ? ChannelKind::Decoherence : ChannelKind::PhaseDamping,
                    eps),
        makeChannel(ChannelKind::Identity, 0));
    sch.finite.axes = {Axis::X, Axis::Y};
    sch.problem =
        buildProblem(sch.finite.probe, sch.finite.channel, sch.finite.axes);
    sch.povm = fiveOutcome(vec4(0.5, 0.5 * a * I_UNIT, 0.5 * a * I_UNIT, 0.5),
                           vec4(0.5, -0.5 * a * I_UNIT, -0.5 * a * I_UNIT, 0.5),
                           vec4(0.5, -0.5 * b, -0.5 * b, -0.5),
                           vec4(0.5, 0.5 * b, 0.5 * b, -0.5));
    const double cx = dc ? 1.0 / ((1.0 - eps) * a) : 2.0 / ((2.0 - eps) * a);
    const double cy = dc ? 1.0 / ((1.0 - eps) * b) : 2.0 / ((2.0 - eps) * b);
    sch.est.coeffs = RMat::Zero(2, 5);
    setPair(sch.est, sch.problem, sch.povm, 0, 0, 1, cx);
    setPair(sch.est, sch.problem, sch.povm, 1, 2, 3, cy);
    return sch;
  }
  if (name == "dc_2q_3param_7outcome") {
    // Six elements in total: the name keeps the historical outcome count of
    // the construction it derives from, but the z pair already completes the
    // identity.
    Scheme sch;
    sch.name = name;
    sch.finite.probe = bellPsi0();
    sch.finite.channel =
        liftToTwoQubits(makeChannel(ChannelKind::Decoherence, eps),
                        makeChannel(ChannelKind::Identity, 0));
    sch.finite.axes = {Axis::X, Axis::Y, Axis::Z};
    sch.problem =
        buildProblem(sch.finite.probe, sch.finite.channel, sch.finite.axes);
    const double r3 = 1.0 / std::sqrt(3.0);
    sch.povm.dim = 4;
    sch.povm.elements = {
        proj(vec4(0.5, 0.5 * r3 * I_UNIT, 0.5 * r3 * I_UNIT, 0.5)),
        proj(vec4(0.5, -0.5 * r3 * I_UNIT, -0.5 * r3 * I_UNIT, 0.5)),
        proj(vec4(0.5, 0.5 * r3, 0.5 * r3, -0.5)),
        proj(vec4(0.5, -0.5 * r3, -0.5 * r3, -0.5))};
    for (double sign : {1.0, -1.0}) {
      CMat pz = CMat::Zero(4, 4);
      pz(1, 1) = pz(2, 2) = 1.0 / 3.0;
      pz(1, 2) = -1.0 / 6.0 - sign * I_UNIT / std::sqrt(12.0);
      pz(2, 1) = std::conj(pz(1, 2));
      sch.povm.elements.push_back(pz);
    }
    const double c = std::sqrt(3.0) / (1.0 - eps);
    sch.est.coeffs = RMat::Zero(3, 6);
    setPair(sch.est, sch.problem, sch.povm, 0, 0, 1, c);
    setPair(sch.est, sch.problem, sch.povm, 1, 3, 2, c);
    setPair(sch.est, sch.problem, sch.povm, 2, 4, 5, c);
    return sch;
  }
  if (name == "pd_split_basis") {
    const double pa = params.probeA >= 0 ? params.probeA : 1.0 - 1e-10;
    if (pa <= 0.0 || pa >= 1.0) {
      throw ContractError("pd_split_basis: probe amplitude must be in (0,1)");
    }
    const double pb = std::sqrt(1.0 - pa * pa);
    const double fx =
        params.nxFraction >= 0 ? params.nxFraction : 1.0 / (2.0 - eps);
    if (fx <= 0.0 || fx >= 1.0) {
      throw ContractError("pd_split_basis: n_x fraction must be in (0,1)");
    }
    const double fy = 1.0 - fx;

    Scheme sch;
    sch.name = name;
    CVec psi(2);
    psi << pa, pb;
    sch.finite.probe = pureState(psi);
    sch.finite.channel = makeChannel(ChannelKind::PhaseDamping, eps);
    sch.finite.axes = {Axis::X, Axis::Y};
    sch.problem =
        buildProblem(sch.finite.probe, sch.finite.channel, sch.finite.axes);

    // Randomized two-arm measurement: sigma_z basis with weight f_y,
    // sigma_y basis with weight f_x.
    const CVec k0 = basisKet(2, 0), k1 = basisKet(2, 1);
    const CVec yp = (k0 + I_UNIT * k1) * kInvSqrt2;
    const CVec ym = (k0 - I_UNIT * k1) * kInvSqrt2;
    sch.povm.dim = 2;
    sch.povm.elements = {fy * proj(k0), fy * proj(k1), fx * proj(yp),
                         fx * proj(ym)};
    sch.est.coeffs = RMat::Zero(2, 4);
    setPair(sch.est, sch.problem, sch.povm, 0, 2, 3,
            1.0 / (fx * (1.0 - eps) * (pa * pa - pb * pb)));
    // The z-basis pair has asymmetric coefficients b/(a f_y), -a/(b f_y);
    // orientation again taken from the derivative sign.
    {
      const double slope =
          ((sch.problem.derivs[1] *
            (pb / pa * sch.povm.elements[0] - pa / pb * sch.povm.elements[1]))
               .trace()
               .real()) /
          fy;
      const double s = slope > 0 ? 1.0 : -1.0;
      sch.est.coeffs(1, 0) = s * pb / (pa * fy);
      sch.est.coeffs(1, 1) = -s * pa / (pb * fy);
    }
    return sch;
  }
  if (name == "pd_2q_3param") {
    const double delta = params.delta;
    if (delta <= 0.0 || delta >= 0.5) {
      throw ContractError("pd_2q_3param: delta must be in (0, 1/2)");
    }
    const double ab = std::sqrt(delta);
    Scheme sch;
    sch.name = name;
    sch.finite.probe = bellPsi0();
    sch.finite.channel =
        liftToTwoQubits(makeChannel(ChannelKind::PhaseDamping, eps),
                        makeChannel(ChannelKind::Identity, 0));
    sch.finite.axes = {Axis::X, Axis::Y, Axis::Z};
    sch.problem =
        buildProblem(sch.finite.probe, sch.finite.channel, sch.finite.axes);

    sch.povm.dim = 4;
    sch.povm.elements = {
        proj(vec4(0.5, 0.5 * ab * I_UNIT, 0.5 * ab * I_UNIT, 0.5)),
        proj(vec4(0.5, -0.5 * ab * I_UNIT, -0.5 * ab * I_UNIT, 0.5)),
        proj(vec4(0.5, -0.5 * ab, -0.5 * ab, -0.5)),
        proj(vec4(0.5, 0.5 * ab, 0.5 * ab, -0.5))};
    CMat p5 = CMat::Zero(4, 4);
    p5(1, 1) = p5(2, 2) = delta;
    p5(1, 2) = p5(2, 1) = -delta;
    sch.povm.elements.push_back(p5);
    for (double sign : {-1.0, 1.0}) {
      CMat pz = CMat::Zero(4, 4);
      pz(1, 1) = pz(2, 2) = 0.5 * (1.0 - 2.0 * delta);
      pz(1, 2) = sign * I_UNIT * 0.5 * (1.0 - 2.0 * delta);
      pz(2, 1) = std::conj(pz(1, 2));
      sch.povm.elements.push_back(pz);
    }
    sch.est.coeffs = RMat::Zero(3, 7);
    setPair(sch.est, sch.problem, sch.povm, 0, 0, 1, 2.0 / ((2.0 - eps) * ab));
    setPair(sch.est, sch.problem, sch.povm, 1, 2, 3, 2.0 / ((2.0 - eps) * ab));
    setPair(sch.est, sch.problem, sch.povm, 2, 5, 6,
            1.0 / ((1.0 - eps) * (1.0 - 2.0 * delta)));
    return sch;
  }
  throw ContractError("unknown measurement scheme: " + name);
}

std::vector<std::string> schemeNames() {
  return {"dc_1q_4outcome",     "dc_1q_4outcome_1param", "dc_2q_5outcome",
          "dc_2q_3param_7outcome", "dc_2copy_5outcome",  "ad_1q_4outcome",
          "ad_1q_4outcome_1param", "ad_2copy_5outcome",  "pd_split_basis",
          "pd_2q_5outcome",     "pd_2q_3param"};
}

}  // namespace qmetro
