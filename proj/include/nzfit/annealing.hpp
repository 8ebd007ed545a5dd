#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <vector>

namespace nzfit {

// Corana-style adaptive simulated annealing (the simann.f scheme): one
// coordinate perturbed at a time, per-coordinate step lengths adapted toward
// a 50% acceptance rate, geometric cooling, restart from the best point at
// each temperature.
struct AnnealOptions {
  int ns = 20;           // cycles between step-length adjustments
  int nt = 5;            // step-length adjustments per temperature
  double rt = 0.85;      // cooling ratio
  double c = 2;          // step-length adjustment gain
  int neps = 4;          // temperatures compared for termination
  double eps = 1e-7;     // relative termination tolerance
  double abs_eps = 0;    // absolute floor for the termination test
  double T0 = -1;        // <= 0: standard deviation of f over random points
  int t0_samples = 100;
  int max_temperatures = 200;
  long max_evals = 50'000'000;
  std::uint64_t seed = 1;
};

struct AnnealResult {
  Eigen::VectorXd x;
  double f = 0;
  double f_initial = 0;
  long evals = 0;
  int temperatures = 0;
  double T0 = 0;
  bool terminated = false;            // eps test met (false: hit a cap)
  std::vector<double> acceptance;     // acceptance ratio per temperature
  std::vector<double> best;           // best-so-far per temperature
};

using Objective = std::function<double(const Eigen::VectorXd&)>;

// Minimizes f over the box [lb, ub] from x0. Non-finite values count as
// infeasible. Throws NumericalError if no feasible point is found.
AnnealResult anneal(const Objective& f, const Eigen::VectorXd& lb, const Eigen::VectorXd& ub,
                    const Eigen::VectorXd& x0, const AnnealOptions& opt);

}  // namespace nzfit
