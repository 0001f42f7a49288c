#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "qmetro/sdp.hpp"

using namespace qmetro;

namespace {

SymMat fromDense(const RMat& m) {
  SymMat s;
  s.addDense(m);
  return s;
}

}  // namespace

TEST_CASE("hermitian embedding preserves spectrum (doubled)") {
  CMat h(2, 2);
  h << 1.0, Complex(0.5, -0.75), Complex(0.5, 0.75), -2.0;
  const RMat e = embedHermitian(h);
  Eigen::SelfAdjointEigenSolver<RMat> er(e);
  Eigen::SelfAdjointEigenSolver<CMat> ec(h);
  // Each complex eigenvalue appears twice in the embedding.
  CHECK(er.eigenvalues()(0) == doctest::Approx(ec.eigenvalues()(0)));
  CHECK(er.eigenvalues()(1) == doctest::Approx(ec.eigenvalues()(0)));
  CHECK(er.eigenvalues()(2) == doctest::Approx(ec.eigenvalues()(1)));
  CHECK(er.eigenvalues()(3) == doctest::Approx(ec.eigenvalues()(1)));
}

TEST_CASE("symmetric sparse entries") {
  SymMat s;
  s.add(0, 0, 2.0);
  s.add(0, 1, 3.0);
  const RMat d = s.dense(2);
  CHECK(d(0, 1) == 3.0);
  CHECK(d(1, 0) == 3.0);
  RMat m(2, 2);
  m << 1.0, -1.0, -1.0, 4.0;
  CHECK(s.inner(m) == doctest::Approx((d * m).trace()));
  CHECK(s.maxAbs() == 3.0);
}

TEST_CASE("scalar bound: minimize y subject to y >= 3") {
  // y - 3 >= 0 as a 1x1 LMI.
  SdpProblem p;
  p.c = RVec::Ones(1);
  p.blockDims = {1};
  p.f0.resize(1);
  p.f0[0].add(0, 0, -3.0);
  p.fi.resize(1);
  p.fi[0].resize(1);
  p.fi[0][0].add(0, 0, 1.0);
  const SdpSolution sol = solveSdp(p);
  CHECK(sol.status == SdpStatus::Optimal);
  CHECK(sol.y(0) == doctest::Approx(3.0).epsilon(1e-6));
}

TEST_CASE("largest eigenvalue via epigraph") {
  // min t s.t. t I - A >= 0 gives lambda_max(A).
  RMat a(3, 3);
  a << 2, 1, 0, 1, -1, 0.5, 0, 0.5, 0.25;
  Eigen::SelfAdjointEigenSolver<RMat> es(a);
  SdpProblem p;
  p.c = RVec::Ones(1);
  p.blockDims = {3};
  p.f0 = {fromDense(-a)};
  p.fi = {{fromDense(RMat::Identity(3, 3))}};
  const SdpSolution sol = solveSdp(p);
  CHECK(sol.status == SdpStatus::Optimal);
  CHECK(sol.primalValue ==
        doctest::Approx(es.eigenvalues().maxCoeff()).epsilon(1e-7));
  CHECK(sol.gap < 1e-7);
}

TEST_CASE("two blocks with interval constraints") {
  // min -y with y <= 2 (block 1) and y >= -1 (block 2): optimum y = 2.
  SdpProblem p;
  p.c = RVec::Constant(1, -1.0);
  p.blockDims = {1, 1};
  p.f0.resize(2);
  p.f0[0].add(0, 0, 2.0);
  p.f0[1].add(0, 0, 1.0);
  p.fi.resize(1);
  p.fi[0].resize(2);
  p.fi[0][0].add(0, 0, -1.0);
  p.fi[0][1].add(0, 0, 1.0);
  const SdpSolution sol = solveSdp(p);
  CHECK(sol.status == SdpStatus::Optimal);
  CHECK(sol.y(0) == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("matrix completion style problem") {
  // min t s.t. [[1, y],[y, 1]] + t I >= 0, minimized over (t, y):
  // optimum t = 0 at y = 0 ... but y free means best is y=0, t=0? The
  // constraint allows t = -(1-|y|); minimizing t drives |y| -> 0 giving
  // t* = -1 at y = 0.
  SdpProblem p;
  p.c = RVec::Zero(2);
  p.c(0) = 1.0;  // minimize t
  p.blockDims = {2};
  RMat base(2, 2);
  base << 1, 0, 0, 1;
  p.f0 = {fromDense(base)};
  RMat ey(2, 2);
  ey << 0, 1, 1, 0;
  p.fi = {{fromDense(RMat::Identity(2, 2))}, {fromDense(ey)}};
  const SdpSolution sol = solveSdp(p);
  CHECK(sol.status == SdpStatus::Optimal);
  CHECK(sol.primalValue == doctest::Approx(-1.0).epsilon(1e-6));
}

TEST_CASE("infeasible problem is flagged") {
  // -1 - y^2-ish: constraints y >= 1 and -y >= 1 cannot both hold; the dual
  // objective diverges.
  SdpProblem p;
  p.c = RVec::Ones(1);
  p.blockDims = {1, 1};
  p.f0.resize(2);
  p.f0[0].add(0, 0, -1.0);
  p.f0[1].add(0, 0, -1.0);
  p.fi.resize(1);
  p.fi[0].resize(2);
  p.fi[0][0].add(0, 0, 1.0);
  p.fi[0][1].add(0, 0, -1.0);
  SdpOptions opts;
  opts.maxIter = 100;
  const SdpSolution sol = solveSdp(p, opts);
  CHECK(sol.status != SdpStatus::Optimal);
}

TEST_CASE("random PSD feasibility against eigen oracle") {
  // min t s.t. A + t I >= 0 equals -lambda_min(A) for random symmetric A.
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 5; ++trial) {
    const int d = 4;
    RMat a(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) a(i, j) = g(rng);
    a = 0.5 * (a + a.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<RMat> es(a);
    SdpProblem p;
    p.c = RVec::Ones(1);
    p.blockDims = {d};
    p.f0 = {fromDense(a)};
    p.fi = {{fromDense(RMat::Identity(d, d))}};
    const SdpSolution sol = solveSdp(p);
    CHECK(sol.status == SdpStatus::Optimal);
    CHECK(sol.primalValue ==
          doctest::Approx(-es.eigenvalues().minCoeff()).epsilon(1e-6));
  }
}
