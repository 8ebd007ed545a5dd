#include "nzfit/dynamics.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace nzfit {

std::string to_string(Propagator p) { return p == Propagator::sme ? "sme" : "exact"; }

SxBasis sx_eigenbasis() {
  const double r2 = std::sqrt(2.0);
  SxBasis b;
  b.plus << 0.5, r2 / 2, 0.5;
  b.zero << 1 / r2, 0, -1 / r2;
  b.minus << 0.5, -r2 / 2, 0.5;
  return b;
}

Vec3c default_initial_state() {
  const SxBasis b = sx_eigenbasis();
  const cplx i(0, 1);
  return (std::sqrt(3.0) * b.minus + i * b.zero + b.plus) / std::sqrt(5.0);
}

void check_density_matrix(const Mat3& rho, double tol) {
  if (!rho.allFinite()) throw NumericalError("density matrix has non-finite entries");
  if (hermitian_defect(rho) > tol) throw NumericalError("density matrix is not Hermitian");
  if (std::abs(rho.trace() - 1.0) > tol) throw NumericalError("density matrix trace differs from 1");
}

namespace {

bool zero_kernel(const SMEKernel& k) { return k.K1_0 == 0 && k.K0_0 == 0; }

using Packed = Eigen::Matrix<cplx, 36, 1>;

SMEState unpack(const double* y) {
  Eigen::Map<const Packed> v(reinterpret_cast<const cplx*>(y));
  SMEState s;
  s.rho = Eigen::Map<const Mat3>(v.data());
  for (int k = 0; k < 3; ++k) s.Omega[k] = Eigen::Map<const Mat3>(v.data() + 9 * (k + 1));
  return s;
}

void pack(const SMEState& s, double* y) {
  cplx* v = reinterpret_cast<cplx*>(y);
  Eigen::Map<Mat3> r(v);
  r = s.rho;
  for (int k = 0; k < 3; ++k) {
    Eigen::Map<Mat3> o(v + 9 * (k + 1));
    o = s.Omega[k];
  }
}

}  // namespace

SMEState sme_rhs(const Mat3& H, const Mat3& S, double calBbar, const SMEKernel& k, const Mat3& rho0,
                 double t, const SMEState& y) {
  const Mat3 Hs = H + calBbar * S;
  const cplx i(0, 1);
  SMEState d;
  Mat3 mem = y.Omega[0] + y.Omega[1] + y.Omega[2];
  // the kernel is real, so only the Hermitian part of the sum survives
  mem = ((mem + mem.adjoint()) * 0.5).eval();
  d.rho = -i * commutator(Hs, y.rho) - i * eval_K0_sme(k, t) * commutator(S, rho0) - mem;
  // every term is traceless; pinning the last diagonal keeps roundoff from
  // drifting the trace over long runs
  d.rho(2, 2) = cplx(-(d.rho(0, 0).real() + d.rho(1, 1).real()), d.rho(2, 2).imag());
  const Mat3 L = double_commutator(S, y.rho);
  for (int j = 0; j < 3; ++j) d.Omega[j] = k.a[j] * L + k.roots[j] * y.Omega[j];
  return d;
}

Trajectory integrate_sme(const Mat3& H, const Mat3& S, double calBbar, const SMEKernel& k,
                         const Mat3& rho0, const std::vector<double>& tgrid, const Dop853Options& opt,
                         SMEDiagnostics* diag) {
  if (!zero_kernel(k)) {
    const ConstraintReport rep = validate_constraints(k);
    if (const ConstraintEntry* f = rep.first_failure())
      throw NumericalError("kernel fails constraint " + f->name + ": " + f->detail);
  }
  check_density_matrix(rho0);
  for (std::size_t j = 1; j < tgrid.size(); ++j)
    if (!(tgrid[j] > tgrid[j - 1])) throw NumericalError("time grid must be strictly increasing");
  if (!tgrid.empty() && tgrid[0] < 0) throw NumericalError("time grid starts before 0");

  SMEDiagnostics local;
  SMEDiagnostics& dg = diag ? *diag : local;
  dg = {};

  Trajectory tr;
  tr.source = Propagator::sme;
  tr.t = tgrid;
  tr.rho.reserve(tgrid.size());

  SMEState s0;
  s0.rho = rho0;
  for (auto& o : s0.Omega) o.setZero();
  Eigen::VectorXd y0(72);
  pack(s0, y0.data());

  auto rhs = [&](double t, const Eigen::VectorXd& y, Eigen::VectorXd& dy) {
    dy.resize(72);
    pack(sme_rhs(H, S, calBbar, k, rho0, t, unpack(y.data())), dy.data());
  };
  auto out = [&](double, const Eigen::VectorXd& y) {
    const SMEState s = unpack(y.data());
    const Mat3 sum = s.Omega[0] + s.Omega[1] + s.Omega[2];
    const double n = sum.norm();
    if (n > 0) dg.max_antihermitian = std::max(dg.max_antihermitian, (sum - sum.adjoint()).norm() / (2 * n));
    Mat3 r = s.rho;
    symmetrize(r);
    dg.max_trace_drift = std::max(dg.max_trace_drift, std::abs(r.trace() - 1.0));
    tr.rho.push_back(r);
  };
  dg.stats = dop853_integrate(rhs, 0.0, y0, tgrid, out, opt);
  return tr;
}

ExactPropagator::ExactPropagator(const TruncatedBath& tb, const Mat3& H, const Mat3& S,
                                 const Vec3c& psi0, double kBT)
    : nB_(tb.n_B) {
  if (std::abs(psi0.norm() - 1) > 1e-12) throw NumericalError("initial state is not normalized");
  const int n = 3 * nB_;
  MatXc Ht = MatXc::Zero(n, n);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      Ht.block(a * nB_, b * nB_, nB_, nB_) = S(a, b) * tb.B;
      for (int i = 0; i < nB_; ++i) Ht(a * nB_ + i, b * nB_ + i) += H(a, b);
    }
  for (int a = 0; a < 3; ++a)
    for (int i = 0; i < nB_; ++i) Ht(a * nB_ + i, a * nB_ + i) += tb.evals(i);
  symmetrize(Ht);
  Eigen::SelfAdjointEigenSolver<MatXc> es(Ht);
  if (es.info() != Eigen::Success) throw NumericalError("eigendecomposition of H_tot failed");
  lam_ = es.eigenvalues();
  V_ = es.eigenvectors();
  MatXc psi = MatXc::Zero(n, nB_);
  for (int i = 0; i < nB_; ++i)
    for (int a = 0; a < 3; ++a) psi(a * nB_ + i, i) = psi0(a);
  C_ = V_.adjoint() * psi;
  weight_ = thermal_state(tb, kBT);
}

Mat3 ExactPropagator::at(double t) const {
  const int n = 3 * nB_;
  VecXc phase(n);
  for (int j = 0; j < n; ++j) phase(j) = std::polar(1.0, -lam_(j) * t);
  const MatXc Psi = V_ * (phase.asDiagonal() * C_);
  Mat3 rho = Mat3::Zero();
  for (int i = 0; i < nB_; ++i) {
    // column a of M holds the bath amplitudes for system state a
    Eigen::Map<const MatXc> M(Psi.col(i).data(), nB_, 3);
    rho += weight_(i) * (M.transpose() * M.conjugate());
  }
  symmetrize(rho);
  return rho;
}

Trajectory ExactPropagator::run(const std::vector<double>& tgrid) const {
  for (std::size_t j = 1; j < tgrid.size(); ++j)
    if (!(tgrid[j] > tgrid[j - 1])) throw NumericalError("time grid must be strictly increasing");
  Trajectory tr;
  tr.source = Propagator::exact;
  tr.t = tgrid;
  tr.rho.reserve(tgrid.size());
  for (double t : tgrid) tr.rho.push_back(at(t));
  return tr;
}

Trajectory exact_propagate(const TruncatedBath& tb, const Mat3& H, const Mat3& S, const Vec3c& psi0,
                           double kBT, const std::vector<double>& tgrid) {
  return ExactPropagator(tb, H, S, psi0, kBT).run(tgrid);
}

ShiftedBasis shifted_eigenbasis(const Mat3& H, const Mat3& S, double calBbar, double rel_gap) {
  Mat3 Hs = H + calBbar * S;
  symmetrize(Hs);
  Eigen::SelfAdjointEigenSolver<Mat3> es(Hs);
  if (es.info() != Eigen::Success) throw NumericalError("eigendecomposition of H + calBbar S failed");
  ShiftedBasis b;
  b.energies = es.eigenvalues();
  b.U = es.eigenvectors();
  const double spread = std::max(b.energies(2) - b.energies(0), 1e-300);
  for (int j = 0; j < 2; ++j)
    if (b.energies(j + 1) - b.energies(j) <= rel_gap * spread)
      throw NumericalError("H + calBbar S has a degenerate spectrum; the diagonal projection is ambiguous");
  return b;
}

Mat3 project_diagonal(const ShiftedBasis& b, const Mat3& rho) {
  const Mat3 e = b.U.adjoint() * rho * b.U;
  const Mat3 d = e.diagonal().asDiagonal();
  return b.U * d * b.U.adjoint();
}

Mat3 equilibrium_state(const Mat3& H, const Mat3& S, double calBbar, double kappa, const Mat3& rho0) {
  const ShiftedBasis b = shifted_eigenbasis(H, S, calBbar);
  const Mat3 Se = b.U.adjoint() * S * b.U;
  const Mat3 r0 = b.U.adjoint() * rho0 * b.U;
  using M9 = Eigen::Matrix<cplx, 9, 9>;
  using V9 = Eigen::Matrix<cplx, 9, 1>;
  // column-major vec: vec(A X B) = (B^T kron A) vec X
  const Mat3 I = Mat3::Identity();
  const Mat3 S2 = Se * Se;
  auto kron = [](const Mat3& A, const Mat3& B) {
    M9 K;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) K.block<3, 3>(3 * i, 3 * j) = A(i, j) * B;
    return K;
  };
  const M9 L = kron(I, S2) + kron(S2.transpose(), I) - 2.0 * kron(Se.transpose(), Se);
  M9 P0 = M9::Zero();
  for (int j = 0; j < 3; ++j) P0(4 * j, 4 * j) = 1;
  const M9 A = M9::Identity() + kappa * P0 * L;
  const V9 rhs = P0 * Eigen::Map<const V9>(r0.data());
  Eigen::FullPivLU<M9> lu(A);
  if (!lu.isInvertible()) throw NumericalError("equilibrium system is singular");
  const V9 x = lu.solve(rhs);
  Mat3 xe = Eigen::Map<const Mat3>(x.data());
  symmetrize(xe);
  return b.U * xe * b.U.adjoint();
}

}  // namespace nzfit
