#pragma once

#include "nzfit/lanczos.hpp"
#include "nzfit/linalg.hpp"
#include "nzfit/spin_model.hpp"

#include <string>
#include <vector>

namespace nzfit {

struct TruncatedBath {
  int n_B = 0;
  Eigen::VectorXd evals;  // ascending
  MatXc B;                // coupling operator in the eigenbasis
  int requested_n_B = 0;  // before degenerate-multiplet expansion
};

struct TruncateOptions {
  // Dense diagonalization up to this dimension, Lanczos above.
  std::size_t dense_limit = 1024;
  // Relative gap below which levels count as degenerate at the cutoff.
  double degeneracy_tol = 1e-10;
  LanczosOptions lanczos;
};

TruncatedBath truncate_bath(const PauliOperator& H_B, const PauliOperator& B, int n_B,
                            const TruncateOptions& opt = {});

// Boltzmann weights over the retained levels, shifted by the ground energy.
Eigen::VectorXd thermal_state(const TruncatedBath& tb, double kBT);

// lambda_i = p_i (1 + sum_j eta_j (e_i^j - <H_B^j>)), j = 1..eta.size()
Eigen::VectorXd build_lambda(const TruncatedBath& tb, const Eigen::VectorXd& p,
                             const Eigen::VectorXd& eta);

struct BathMoments {
  double Bbar = 0;    // Tr{B rho_B}
  double B2bar = 0;   // Tr{B^2 rho_B}
  double B3bar = 0;   // Tr{B^3 rho_B}
  double calBbar = 0; // Tr{B Lambda}
  double calB2 = 0;
  double calB3 = 0;
  double calB4 = 0;
  double TrB[4] = {0, 0, 0, 0};  // unweighted Tr{B^m}, m = 0..3
  double LambdaBar = 0;          // Tr{Lambda rho_B}
  double TrLambda2 = 0;
  double TrBLambda2 = 0;
  // Tr{B H^2 B L}, Tr{H B H B L}, Tr{H^2 B^2 L}
  double Kubo3[3] = {0, 0, 0};

  double kubo_combination() const { return Kubo3[0] - 2 * Kubo3[1] + Kubo3[2]; }
};

BathMoments bath_moments(const TruncatedBath& tb, const Eigen::VectorXd& p,
                         const Eigen::VectorXd& lambda);

std::string format_bath_report(const TruncatedBath& tb, const Eigen::VectorXd& p,
                               const BathMoments& m);

}  // namespace nzfit
