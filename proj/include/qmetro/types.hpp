#ifndef QMETRO_TYPES_HPP
#define QMETRO_TYPES_HPP

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace qmetro {

using Complex = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr Complex I_UNIT{0.0, 1.0};

// Thrown when an input violates a documented contract (bad dimensions,
// non-Hermitian matrix where one is required, parameter out of range, ...).
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Thrown when a requested computation exceeds the supported problem size.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Thrown when an iterative solver fails to converge.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline CMat pauliX() {
  CMat m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

inline CMat pauliY() {
  CMat m(2, 2);
  m << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
  return m;
}

inline CMat pauliZ() {
  CMat m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

// Computational basis ket |k> in dimension dim.  Two-qubit basis ordering is
// lexicographic with the first qubit most significant: |00>,|01>,|10>,|11>.
inline CVec basisKet(Index dim, Index k) {
  CVec v = CVec::Zero(dim);
  v(k) = 1.0;
  return v;
}

}  // namespace qmetro

#endif  // QMETRO_TYPES_HPP
