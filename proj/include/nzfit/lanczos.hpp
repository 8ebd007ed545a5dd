#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>

namespace nzfit {

struct LanczosOptions {
  int max_basis = 96;
  double tol = 1e-12;  // residual relative to the largest Ritz value
  int max_restarts = 4000;
  std::uint64_t seed = 7;
};

struct EigenPairs {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // columns
  long matvecs = 0;
  int restarts = 0;
};

using RealOperator = std::function<void(const double*, double*)>;

// Lowest k eigenpairs of a real symmetric operator. Thick-restart Lanczos
// with full reorthogonalization; throws NumericalError if not converged.
EigenPairs lowest_eigenpairs(const RealOperator& op, Eigen::Index dim, int k,
                             const LanczosOptions& opt = {});

}  // namespace nzfit
