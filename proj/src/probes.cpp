#include "qmetro/probes.hpp"

#include <algorithm>
#include <cmath>

#include "qmetro/rng.hpp"

namespace qmetro {

DensityMatrix buildProbe(const ProbeSpec& s) {
  const double invSqrt2 = 1.0 / std::sqrt(2.0);
  switch (s.kind) {
    case ProbeKind::Bloch: {
      CVec v(2);
      v << std::cos(s.theta / 2.0),
          std::exp(I_UNIT * s.phi) * std::sin(s.theta / 2.0);
      return pureState(v);
    }
    case ProbeKind::Bell: {
      CVec v = CVec::Zero(4);
      switch (s.bellIndex) {
        case 0: v(1) = invSqrt2; v(2) = invSqrt2; break;
        case 1: v(1) = invSqrt2; v(2) = -invSqrt2; break;
        case 2: v(0) = invSqrt2; v(3) = invSqrt2; break;
        case 3: v(0) = invSqrt2; v(3) = -invSqrt2; break;
        default:
          throw ContractError("buildProbe: bell index must be 0..3");
      }
      return pureState(v);
    }
    case ProbeKind::Weighted: {
      if (s.weightedA < 0.0 || s.weightedA > 1.0) {
        throw ContractError("buildProbe: weighted amplitude must be in [0,1]");
      }
      CVec v = CVec::Zero(4);
      v(1) = s.weightedA;
      v(2) = std::sqrt(1.0 - s.weightedA * s.weightedA);
      return pureState(v);
    }
    case ProbeKind::Raw: {
      if (std::abs(s.raw.norm() - 1.0) > 1e-10) {
        throw ContractError("buildProbe: raw state vector is not normalized");
      }
      return pureState(s.raw);
    }
  }
  throw ContractError("buildProbe: invalid kind");
}

std::vector<DensityMatrix> haarRandom(int qubits, int n, std::uint64_t seed) {
  if (qubits < 1 || qubits > 2) {
    throw ContractError("haarRandom: qubits must be 1 or 2");
  }
  if (n < 1) throw ContractError("haarRandom: need n >= 1");
  const Index d = Index(1) << qubits;
  std::vector<DensityMatrix> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    std::mt19937_64 rng = seededEngine(seed, static_cast<std::uint64_t>(i));
    std::normal_distribution<double> gauss(0.0, 1.0);
    CVec v(d);
    for (Index k = 0; k < d; ++k) {
      const double re = gauss(rng);
      const double im = gauss(rng);
      v(k) = Complex(re, im);
    }
    v /= v.norm();
    out.push_back(pureState(v));
  }
  return out;
}

namespace {

// Hyperspherical chart: 2d-2 angles -> normalized state with the first
// amplitude real non-negative (global phase fixed).
CVec stateFromAngles(const RVec& x, Index d) {
  CVec v(d);
  double sinProd = 1.0;
  for (Index k = 0; k < d; ++k) {
    double mag;
    if (k + 1 < d) {
      mag = sinProd * std::cos(x(k));
      sinProd *= std::sin(x(k));
    } else {
      mag = sinProd;
    }
    const double phase = (k == 0) ? 0.0 : x(d - 2 + k);
    v(k) = mag * std::exp(I_UNIT * phase);
  }
  const double n = v.norm();
  if (n < 1e-14) {
    v.setZero();
    v(0) = 1.0;
    return v;
  }
  return v / n;
}

struct NmResult {
  RVec x;
  double value;
};

NmResult nelderMead(const std::function<double(const RVec&)>& f, RVec x0,
                    double scale, int maxEvals) {
  const Index dim = x0.size();
  std::vector<RVec> pts(dim + 1, x0);
  std::vector<double> vals(dim + 1);
  for (Index i = 0; i < dim; ++i) pts[i + 1](i) += scale;
  for (Index i = 0; i <= dim; ++i) vals[i] = f(pts[i]);
  int evals = static_cast<int>(dim) + 1;

  auto order = [&] {
    std::vector<Index> idx(dim + 1);
    for (Index i = 0; i <= dim; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(),
              [&](Index a, Index b) { return vals[a] < vals[b]; });
    std::vector<RVec> p2(dim + 1);
    std::vector<double> v2(dim + 1);
    for (Index i = 0; i <= dim; ++i) {
      p2[i] = pts[idx[i]];
      v2[i] = vals[idx[i]];
    }
    pts.swap(p2);
    vals.swap(v2);
  };

  while (evals < maxEvals) {
    order();
    double diam = 0;
    for (Index i = 1; i <= dim; ++i) {
      diam = std::max(diam, (pts[i] - pts[0]).norm());
    }
    if (diam < 1e-7) break;

    RVec centroid = RVec::Zero(dim);
    for (Index i = 0; i < dim; ++i) centroid += pts[i];
    centroid /= static_cast<double>(dim);

    const RVec xr = centroid + (centroid - pts[dim]);  // reflection, alpha=1
    const double fr = f(xr);
    ++evals;
    if (fr < vals[0]) {
      const RVec xe = centroid + 2.0 * (centroid - pts[dim]);  // expansion
      const double fe = f(xe);
      ++evals;
      if (fe < fr) {
        pts[dim] = xe;
        vals[dim] = fe;
      } else {
        pts[dim] = xr;
        vals[dim] = fr;
      }
    } else if (fr < vals[dim - 1]) {
      pts[dim] = xr;
      vals[dim] = fr;
    } else {
      const RVec xc =
          centroid + 0.5 * (pts[dim] - centroid);  // contraction, gamma=0.5
      const double fc = f(xc);
      ++evals;
      if (fc < vals[dim]) {
        pts[dim] = xc;
        vals[dim] = fc;
      } else {
        for (Index i = 1; i <= dim; ++i) {  // shrink, sigma=0.5
          pts[i] = pts[0] + 0.5 * (pts[i] - pts[0]);
          vals[i] = f(pts[i]);
        }
        evals += static_cast<int>(dim);
      }
    }
  }
  order();
  return {pts[0], vals[0]};
}

}  // namespace

OptimizeResult optimizeProbe(const KrausChannel& ch,
                             const std::vector<Axis>& axes, BoundKind kind,
                             int qubits, int restarts, std::uint64_t seed) {
  if (qubits < 1 || qubits > 2) {
    throw ContractError("optimizeProbe: qubits must be 1 or 2");
  }
  const Index d = Index(1) << qubits;
  if (ch.dim != d) {
    throw ContractError("optimizeProbe: channel dimension mismatch");
  }
  if (kind == BoundKind::Sld && axes.size() != 1) {
    throw ContractError("optimizeProbe: sld optimization is n=1 only");
  }
  const Index nAngles = 2 * d - 2;

  auto evaluate = [&](const RVec& x) -> double {
    try {
      const DensityMatrix probe = pureState(stateFromAngles(x, d));
      const EstimationProblem p = buildProblem(probe, ch, axes);
      switch (kind) {
        case BoundKind::Sld: return sldBound(p).value;
        case BoundKind::Holevo: return holevoBound(p).value;
        case BoundKind::Nhb: return nhb(p).value;
      }
    } catch (const std::exception&) {
      // Degenerate probe (dependent derivatives, solver failure): steer away.
    }
    return 1e12;
  };

  OptimizeResult out;
  double best = 1e18;
  RVec bestX;
  for (int r = 0; r < restarts; ++r) {
    std::mt19937_64 rng = seededEngine(seed, static_cast<std::uint64_t>(r));
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    RVec x0(nAngles);
    for (Index i = 0; i < d - 1; ++i) x0(i) = unif(rng) * M_PI;
    for (Index i = d - 1; i < nAngles; ++i) x0(i) = unif(rng) * 2.0 * M_PI;
    const NmResult res = nelderMead(evaluate, x0, 0.3, 250 * (int)nAngles);
    out.restartValues.push_back(res.value);
    if (res.value < best) {
      best = res.value;
      bestX = res.x;
    }
  }
  if (bestX.size() == 0) {
    throw SolverError("optimizeProbe: all restarts failed");
  }

  out.probe = stateFromAngles(bestX, d);
  out.onPointValue = best;
  // Probe discontinuity probe: rank changes (e.g. phase damping at the
  // poles) show up as a gap between the on-point value and nearby values.
  double nearby = best;
  std::mt19937_64 rng = seededEngine(seed, 0xD15C0ULL);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int t = 0; t < 6; ++t) {
    RVec dx(nAngles);
    for (Index i = 0; i < nAngles; ++i) dx(i) = gauss(rng);
    dx *= 1e-5 / dx.norm();
    nearby = std::min(nearby, evaluate(bestX + dx));
  }
  out.nearbyValue = nearby;
  out.discontinuity = std::abs(nearby - best) > 1e-3;

  const DensityMatrix probe = pureState(out.probe);
  const EstimationProblem p = buildProblem(probe, ch, axes);
  switch (kind) {
    case BoundKind::Sld: out.bound = sldBound(p); break;
    case BoundKind::Holevo: out.bound = holevoBound(p); break;
    case BoundKind::Nhb: out.bound = nhb(p); break;
  }
  return out;
}

}  // namespace qmetro
