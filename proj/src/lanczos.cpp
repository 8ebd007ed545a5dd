#include "nzfit/lanczos.hpp"

#include "nzfit/linalg.hpp"
#include "nzfit/rng.hpp"

#include <algorithm>
#include <cmath>

namespace nzfit {

namespace {

// Orthogonalize w against the first n columns of V twice; returns the
// accumulated projection coefficients.
Eigen::VectorXd reorthogonalize(const Eigen::MatrixXd& V, Eigen::Index n, Eigen::VectorXd& w) {
  Eigen::VectorXd h = V.leftCols(n).transpose() * w;
  w.noalias() -= V.leftCols(n) * h;
  Eigen::VectorXd h2 = V.leftCols(n).transpose() * w;
  w.noalias() -= V.leftCols(n) * h2;
  return h + h2;
}

}  // namespace

EigenPairs lowest_eigenpairs(const RealOperator& op, Eigen::Index dim, int k,
                             const LanczosOptions& opt) {
  if (k < 1 || k > dim) throw NumericalError("requested eigenpair count out of range");
  const Eigen::Index m = std::min<Eigen::Index>(std::max(opt.max_basis, 2 * k + 8), dim);
  EigenPairs out;

  if (m == dim) {
    // basis would span everything, build the matrix directly
    Eigen::MatrixXd A(dim, dim);
    Eigen::VectorXd e = Eigen::VectorXd::Zero(dim), col(dim);
    for (Eigen::Index j = 0; j < dim; ++j) {
      e(j) = 1;
      op(e.data(), col.data());
      A.col(j) = col;
      e(j) = 0;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es((A + A.transpose()) / 2);
    out.values = es.eigenvalues().head(k);
    out.vectors = es.eigenvectors().leftCols(k);
    out.matvecs = dim;
    return out;
  }

  auto g = make_stream(opt.seed, "lanczos");
  auto random_unit = [&](Eigen::VectorXd& v) {
    for (Eigen::Index i = 0; i < dim; ++i) v(i) = uniform01(g) - 0.5;
    v.normalize();
  };

  Eigen::MatrixXd V(dim, m + 1);
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
  Eigen::VectorXd w(dim);
  {
    Eigen::VectorXd v0(dim);
    random_unit(v0);
    V.col(0) = v0;
  }
  const Eigen::Index keep = std::min<Eigen::Index>(k + std::max<Eigen::Index>((m - k) / 2, 1), m - 1);
  Eigen::Index p = 0;
  double beta = 0;

  for (int restart = 0;; ++restart) {
    for (Eigen::Index j = p; j < m; ++j) {
      op(V.col(j).data(), w.data());
      ++out.matvecs;
      Eigen::VectorXd h = reorthogonalize(V, j + 1, w);
      T.col(j).head(j + 1) = h;
      T.row(j).head(j + 1) = h.transpose();
      beta = w.norm();
      const double scale = std::max(T.topLeftCorner(j + 1, j + 1).cwiseAbs().maxCoeff(), 1e-300);
      if (beta <= 1e-14 * scale) {
        // invariant subspace: continue with a fresh orthogonal direction
        random_unit(w);
        reorthogonalize(V, j + 1, w);
        w.normalize();
        V.col(j + 1) = w;
        beta = 0;
      } else {
        V.col(j + 1) = w / beta;
      }
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es((T + T.transpose()) / 2);
    const Eigen::VectorXd& theta = es.eigenvalues();
    const Eigen::MatrixXd& Y = es.eigenvectors();
    const double anorm = std::max(theta.cwiseAbs().maxCoeff(), 1e-300);
    bool done = true;
    for (int i = 0; i < k; ++i)
      if (std::abs(beta * Y(m - 1, i)) > opt.tol * anorm) done = false;

    if (done || restart >= opt.max_restarts) {
      if (!done)
        throw NumericalError("Lanczos did not converge after " + std::to_string(restart) +
                             " restarts");
      out.values = theta.head(k);
      out.vectors = V.leftCols(m) * Y.leftCols(k);
      out.restarts = restart;
      return out;
    }

    // thick restart: keep the lowest Ritz vectors plus the residual direction
    Eigen::MatrixXd kept = V.leftCols(m) * Y.leftCols(keep);
    V.leftCols(keep) = kept;
    V.col(keep) = V.col(m);
    T.setZero();
    for (Eigen::Index i = 0; i < keep; ++i) {
      T(i, i) = theta(i);
      T(keep, i) = T(i, keep) = beta * Y(m - 1, i);
    }
    p = keep;
  }
}

}  // namespace nzfit
