#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>

namespace aeflow {

using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

namespace tol {
// Max-norm tolerances, relative to max(1, |entries|), for dimensions <= 64.
inline constexpr double hermiticity = 1e-12;
inline constexpr double unitarity = 1e-10;
inline constexpr double trace_one = 1e-12;
inline constexpr double psd_eigenvalue = 1e-12;
inline constexpr double fixed_point = 1e-9;
inline constexpr double degeneracy = 1e-9;
inline constexpr double entropy_support = 1e-12;
}  // namespace tol

/// Error for invariant violations on construction or ill-posed inputs.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Error for numerical failures (fixed point not found, root finder stuck).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline double max_abs(const ComplexMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline bool is_square(const ComplexMatrix& m) { return m.rows() == m.cols(); }

inline double hermiticity_defect(const ComplexMatrix& m) {
  return max_abs(m - m.adjoint());
}

inline bool is_hermitian(const ComplexMatrix& m, double tolerance = tol::hermiticity) {
  if (!is_square(m)) return false;
  return hermiticity_defect(m) <= tolerance * std::max(1.0, max_abs(m));
}

inline double unitarity_defect(const ComplexMatrix& m) {
  ComplexMatrix gram = m * m.adjoint();
  gram.diagonal().array() -= 1.0;
  return max_abs(gram);
}

inline bool is_unitary(const ComplexMatrix& m, double tolerance = tol::unitarity) {
  return is_square(m) && unitarity_defect(m) <= tolerance;
}

/// Dense Hermitian operator (Hamiltonians, projectors, observables).
class HermitianOperator {
 public:
  explicit HermitianOperator(ComplexMatrix m) : m_(std::move(m)) {
    if (!is_square(m_)) throw DomainError("HermitianOperator: matrix not square");
    if (!is_hermitian(m_))
      throw DomainError("HermitianOperator: not Hermitian within tolerance");
  }

  const ComplexMatrix& matrix() const { return m_; }
  Index dim() const { return m_.rows(); }

 private:
  ComplexMatrix m_;
};

/// Quantum state: Hermitian, unit trace, positive semidefinite within tolerance.
class DensityMatrix {
 public:
  explicit DensityMatrix(ComplexMatrix m) : m_(std::move(m)) {
    if (!is_square(m_)) throw DomainError("DensityMatrix: matrix not square");
    if (!is_hermitian(m_))
      throw DomainError("DensityMatrix: not Hermitian within tolerance");
    const double tr_err = std::abs(m_.trace() - std::complex<double>(1.0, 0.0));
    if (tr_err > tol::trace_one)
      throw DomainError("DensityMatrix: trace differs from 1 by " + std::to_string(tr_err));
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m_, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -tol::psd_eigenvalue)
      throw DomainError("DensityMatrix: negative eigenvalue " +
                        std::to_string(es.eigenvalues().minCoeff()));
  }

  const ComplexMatrix& matrix() const { return m_; }
  Index dim() const { return m_.rows(); }

 private:
  ComplexMatrix m_;
};

/// Unitary operator, ||U U^dag - 1||_max <= 1e-10.
class UnitaryOperator {
 public:
  explicit UnitaryOperator(ComplexMatrix m) : m_(std::move(m)) {
    if (!is_square(m_)) throw DomainError("UnitaryOperator: matrix not square");
    if (!is_unitary(m_))
      throw DomainError("UnitaryOperator: not unitary within tolerance");
  }

  const ComplexMatrix& matrix() const { return m_; }
  Index dim() const { return m_.rows(); }

 private:
  ComplexMatrix m_;
};

}  // namespace aeflow
