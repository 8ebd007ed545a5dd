#pragma once

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace nzfit {

// Dormand-Prince 8(5,3) with 7th-order dense output, after Hairer's DOP853.
struct Dop853Options {
  double rtol = 1e-10;
  double atol = 1e-12;
  double h_max = 0;  // 0: whole interval
  long max_steps = 200'000'000;
  double safe = 0.9;
  double fac1 = 0.333;
  double fac2 = 6.0;
  double beta = 0.0;
};

struct Dop853Stats {
  long accepted = 0;
  long rejected = 0;
  long fevals = 0;
};

using OdeRhs = std::function<void(double t, const Eigen::VectorXd& y, Eigen::VectorXd& dydt)>;
using OdeOutput = std::function<void(double t, const Eigen::VectorXd& y)>;

// Integrates y' = f(t, y) from t0 and reports y at every time in t_out
// (nondecreasing, all >= t0) through dense output. Throws NumericalError on
// step-size underflow or when max_steps is exhausted.
Dop853Stats dop853_integrate(const OdeRhs& f, double t0, const Eigen::VectorXd& y0,
                             const std::vector<double>& t_out, const OdeOutput& out,
                             const Dop853Options& opt = {});

}  // namespace nzfit
