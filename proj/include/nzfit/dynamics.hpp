#pragma once

#include "nzfit/bath_thermo.hpp"
#include "nzfit/dop853.hpp"
#include "nzfit/linalg.hpp"
#include "nzfit/sme_kernel.hpp"

#include <string>
#include <vector>

namespace nzfit {

enum class Propagator { sme, exact };
std::string to_string(Propagator p);

struct Trajectory {
  std::vector<double> t;   // strictly increasing, ns
  std::vector<Mat3> rho;   // one snapshot per time
  Propagator source = Propagator::sme;
};

// Eigenvectors of S_X for spin 1 in the S_Z basis, with fixed phases.
struct SxBasis {
  Vec3c plus, zero, minus;  // eigenvalues +1, 0, -1
};
SxBasis sx_eigenbasis();

// (sqrt3 |-> + i |0> + |+>) / sqrt5 in the S_X eigenbasis.
Vec3c default_initial_state();

inline Mat3 pure_state(const Vec3c& psi) { return psi * psi.adjoint(); }

// Hermitian to tol, unit trace to tol.
void check_density_matrix(const Mat3& rho, double tol = 1e-12);

struct SMEDiagnostics {
  Dop853Stats stats;
  double max_antihermitian = 0;  // largest |ImPart| of sum Omega_k relative to its norm
  double max_trace_drift = 0;
};

// d rho/dt = -i[H + calBbar S, rho] - i K0(t) [S, rho0] - sum_k Omega_k
// d Omega_k/dt = a_k [S,[S,rho]] + z_k Omega_k,  Omega_k(0) = 0
// The kernel must pass validate_constraints unless it is the zero kernel.
Trajectory integrate_sme(const Mat3& H, const Mat3& S, double calBbar, const SMEKernel& k,
                         const Mat3& rho0, const std::vector<double>& tgrid,
                         const Dop853Options& opt = {}, SMEDiagnostics* diag = nullptr);

// Right-hand side of the above at time t for a given state; exposed for tests.
struct SMEState {
  Mat3 rho;
  std::array<Mat3, 3> Omega;
};
SMEState sme_rhs(const Mat3& H, const Mat3& S, double calBbar, const SMEKernel& k, const Mat3& rho0,
                 double t, const SMEState& y);

// Reduced dynamics of psi0 (x) rho_B over the truncated bath, from one
// eigendecomposition of H (x) 1 + S (x) B + 1 (x) diag(e).
class ExactPropagator {
 public:
  ExactPropagator(const TruncatedBath& tb, const Mat3& H, const Mat3& S, const Vec3c& psi0,
                  double kBT);
  Mat3 at(double t) const;
  Trajectory run(const std::vector<double>& tgrid) const;

 private:
  int nB_ = 0;
  Eigen::VectorXd lam_;     // eigenvalues of H_tot
  MatXc V_;                 // eigenvectors
  MatXc C_;                 // V^dag (psi0 (x) e_i), one column per bath state
  Eigen::VectorXd weight_;  // thermal weights
};

Trajectory exact_propagate(const TruncatedBath& tb, const Mat3& H, const Mat3& S, const Vec3c& psi0,
                           double kBT, const std::vector<double>& tgrid);

// Eigenbasis of H + calBbar S, ascending. Throws if two levels are closer
// than rel_gap times the spectral spread.
struct ShiftedBasis {
  Eigen::Vector3d energies;
  Mat3 U;  // columns are eigenvectors
};
ShiftedBasis shifted_eigenbasis(const Mat3& H, const Mat3& S, double calBbar, double rel_gap = 1e-9);

// rho(inf) = (1 + kappa P0 L)^{-1} P0 rho0 with P0 the diagonal projection in
// the eigenbasis of H + calBbar S and L = [S,[S,.]]; solved as a 9x9 system.
Mat3 equilibrium_state(const Mat3& H, const Mat3& S, double calBbar, double kappa, const Mat3& rho0);

// P0 applied in the lab frame, for checking P0 rho = rho.
Mat3 project_diagonal(const ShiftedBasis& b, const Mat3& rho);

}  // namespace nzfit
