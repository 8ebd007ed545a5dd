#pragma once

#include "nzfit/linalg.hpp"

#include <array>
#include <string>
#include <vector>

namespace nzfit {

// K1~(z) = K1_0 z (z + beta_s) / (z^3 + mu z^2 + nu z + gamma)
// K0~(z) = K0_0 z (z + alpha_s) / (same cubic)
struct SMEKernel {
  double beta_s = 0, mu = 0, nu = 0, gamma = 0;
  double K1_0 = 0;
  double K0_sign = 1;  // branch of K0_0 = +-sqrt(K1_0)

  // derived, filled by finalize()
  double lambda = 0;   // beta_s - mu
  double alpha_s = 0;  // beta_s + lambda / 4
  double K0_0 = 0;
  double V0 = 0;  // nu - mu beta_s + beta_s^2
  std::array<cplx, 3> roots{};
  std::array<cplx, 3> a{};  // K1(t) = Re sum a_k e^{z_k t}
  std::array<cplx, 3> b{};  // K0(t) = Re sum b_k e^{z_k t}

  // Computes derived quantities, roots and weights. Throws on repeated roots.
  void finalize();
};

SMEKernel make_sme_kernel(double beta_s, double mu, double nu, double gamma, double K1_0,
                          double K0_sign = 1);

// beta = X1, mu = beta + X2 + 2 sqrt(X3), nu = X3 + mu beta - beta^2, gamma = X4
SMEKernel sme_from_x(const std::array<double, 4>& X, double K1_0, double x_bound = 200);

// Roots of z^3 + mu z^2 + nu z + gamma from the companion matrix, Newton-polished.
std::array<cplx, 3> cubic_roots(double mu, double nu, double gamma);

struct ConstraintEntry {
  std::string name;
  std::string detail;
  bool satisfied;
};

struct ConstraintReport {
  std::vector<ConstraintEntry> entries;
  bool all_satisfied() const;
  const ConstraintEntry* first_failure() const;
  std::string format() const;
};

ConstraintReport validate_constraints(const SMEKernel& k);

double eval_K1_sme(const SMEKernel& k, double t);
double eval_K0_sme(const SMEKernel& k, double t);
// Imaginary residue of the exponential sums, for diagnostics.
double imag_residue_K1(const SMEKernel& k, double t);

double kappa(const SMEKernel& k);

// V(t) = (V0 - gamma/beta) e^{-beta t} + gamma/beta
double eval_V(const SMEKernel& k, double t);
// Delta(t) = -V'(t) = (beta V0 - gamma) e^{-beta t}
double eval_Delta(const SMEKernel& k, double t);
// R(t) = (alpha - beta) K0_0 / K1_0 e^{-beta t}
double eval_R(const SMEKernel& k, double t);

struct MonotonicityReport {
  bool V_nonnegative = true;
  bool Delta_nonnegative = true;
  double min_V = 0;
  double min_Delta = 0;
  std::string format() const;
};

MonotonicityReport complete_monotonicity_check(const SMEKernel& k, double t_max = 30,
                                               int n_points = 3001);

}  // namespace nzfit
