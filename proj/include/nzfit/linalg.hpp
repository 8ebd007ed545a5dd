#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>

namespace nzfit {

template <class T>
using Complex = std::complex<T>;

template <class T>
using CMatrix = Eigen::Matrix<std::complex<T>, Eigen::Dynamic, Eigen::Dynamic>;

template <class T>
using CMatrix3 = Eigen::Matrix<std::complex<T>, 3, 3>;

template <class T>
using CVector = Eigen::Matrix<std::complex<T>, Eigen::Dynamic, 1>;

using cplx = std::complex<double>;
using Mat3 = CMatrix3<double>;
using Vec3c = Eigen::Matrix<cplx, 3, 1>;
using MatXc = CMatrix<double>;
using VecXc = CVector<double>;

// Thrown for violated preconditions and failed numerical checks.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

template <class Derived>
typename Derived::RealScalar hermitian_defect(const Eigen::MatrixBase<Derived>& a) {
  if (a.size() == 0) return 0;
  return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

template <class A, class B>
auto commutator(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
  return (a * b - b * a).eval();
}

// [S,[S,X]] = S^2 X + X S^2 - 2 S X S
template <class A, class B>
auto double_commutator(const Eigen::MatrixBase<A>& s, const Eigen::MatrixBase<B>& x) {
  return (s * (s * x - x * s) - (s * x - x * s) * s).eval();
}

template <class Derived>
void symmetrize(Eigen::MatrixBase<Derived>& a) {
  a = ((a + a.adjoint()) / typename Derived::RealScalar(2)).eval();
}

}  // namespace nzfit
