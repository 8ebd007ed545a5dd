#pragma once

#include "nzfit/annealing.hpp"
#include "nzfit/bath_thermo.hpp"
#include "nzfit/meanfield_kernel.hpp"
#include "nzfit/sme_kernel.hpp"

#include <array>
#include <map>
#include <string>
#include <vector>

namespace nzfit {

struct FitProblem {
  double eta_bound = 300;
  int n_p = 10;
  double x_bound = 200;
  double t_max = 30;
  double grid_dt = 0.05;
  std::array<double, 4> x0{100, 100, 100, 100};
  AnnealOptions schedule;
};

void validate(const FitProblem& p);

// Everything the objective needs besides the fit variables.
struct FitContext {
  DoubleCommutatorMeans dc;
  TruncatedBath tb;
  Eigen::VectorXd p;  // thermal weights
  WOptions w;
};

// Mean-field K1 on the objective grid for one Lambda.
struct MFGrid {
  double K1_0 = 0;
  std::vector<double> K1;
  bool ok = false;
};

MFGrid mf_grid(const Eigen::VectorXd& eta, const FitContext& ctx, const FitProblem& p);

// Trapezoid integral of (a - b(t_i))^2 over the grid t_i = i * dt.
double squared_difference(const std::vector<double>& a, const SMEKernel& k, double dt);

// f(eta, X); +inf when the candidate is infeasible.
double objective_f(const Eigen::VectorXd& eta, const std::array<double, 4>& X, const FitContext& ctx,
                   const FitProblem& p);

struct FitResult {
  Eigen::VectorXd eta;
  std::array<double, 4> X{};
  double f = 0;
  double f_initial = 0;
  long evals = 0;
  int temperatures = 0;
  bool terminated = false;
  std::vector<double> acceptance;
  std::vector<double> best;
  SMEKernel kernel;
  MeanFieldKernel mf;
  BathMoments moments;
};

FitResult fit_kernel(const FitContext& ctx, const FitProblem& p);

// Rebuilds the mean-field side for a given eta.
MeanFieldKernel meanfield_for_eta(const Eigen::VectorXd& eta, const FitContext& ctx,
                                  BathMoments* moments = nullptr);

// Synthetic check: fit c e^{-b t} with the two-parameter single-exponential
// model through the same annealer and quadrature.
struct SyntheticFit {
  double b = 0, c = 0, f = 0;
  long evals = 0;
};
SyntheticFit fit_synthetic_exponential(double b_true, double c_true, const FitProblem& p);

std::string format_fit(const FitResult& r, const FitProblem& p);

}  // namespace nzfit
