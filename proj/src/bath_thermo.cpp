#include "nzfit/bath_thermo.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace nzfit {

namespace {

int expand_multiplet(const Eigen::VectorXd& e, int n_B, double tol) {
  const double scale = std::max(e.cwiseAbs().maxCoeff(), 1e-300);
  int n = n_B;
  while (n < e.size() && e(n) - e(n - 1) <= tol * scale) ++n;
  return n;
}

}  // namespace

TruncatedBath truncate_bath(const PauliOperator& H_B, const PauliOperator& B, int n_B,
                            const TruncateOptions& opt) {
  const std::size_t dim = H_B.dim();
  if (n_B < 1 || std::size_t(n_B) > dim)
    throw NumericalError("n_B = " + std::to_string(n_B) + " exceeds bath dimension " +
                         std::to_string(dim));
  if (!H_B.is_real()) throw NumericalError("bath Hamiltonian must be real in the Pauli basis");

  Eigen::VectorXd evals;
  Eigen::MatrixXd vecs;
  int n = n_B;
  if (dim <= opt.dense_limit) {
    Eigen::MatrixXd h = H_B.dense().real();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es((h + h.transpose()) / 2);
    if (es.info() != Eigen::Success) throw NumericalError("dense bath diagonalization failed");
    evals = es.eigenvalues();
    vecs = es.eigenvectors();
    n = expand_multiplet(evals, n_B, opt.degeneracy_tol);
  } else {
    const RealOperator op = [&H_B](const double* x, double* y) { H_B.apply(x, y); };
    int k = std::min<int>(n_B + 4, int(dim));
    for (;;) {
      auto ep = lowest_eigenpairs(op, Eigen::Index(dim), k, opt.lanczos);
      evals = ep.values;
      vecs = ep.vectors;
      n = expand_multiplet(evals, n_B, opt.degeneracy_tol);
      if (n < k || k == int(dim)) break;
      k = std::min<int>(k + 8, int(dim));
    }
  }

  TruncatedBath tb;
  tb.requested_n_B = n_B;
  tb.n_B = n;
  tb.evals = evals.head(n);
  MatXc V = vecs.leftCols(n).cast<cplx>();
  MatXc BV(dim, n);
  for (int j = 0; j < n; ++j) B.apply(V.col(j).data(), BV.col(j).data());
  tb.B = V.adjoint() * BV;
  symmetrize(tb.B);
  return tb;
}

Eigen::VectorXd thermal_state(const TruncatedBath& tb, double kBT) {
  if (!(kBT > 0)) throw NumericalError("kBT must be positive");
  Eigen::VectorXd p(tb.n_B);
  for (int i = 0; i < tb.n_B; ++i) p(i) = std::exp(-(tb.evals(i) - tb.evals(0)) / kBT);
  return p / p.sum();
}

Eigen::VectorXd build_lambda(const TruncatedBath& tb, const Eigen::VectorXd& p,
                             const Eigen::VectorXd& eta) {
  const int n = tb.n_B;
  Eigen::VectorXd factor = Eigen::VectorXd::Ones(n);
  Eigen::VectorXd power = Eigen::VectorXd::Ones(n);
  for (Eigen::Index j = 0; j < eta.size(); ++j) {
    power = power.cwiseProduct(tb.evals);
    const double mean = p.dot(power);
    factor += eta(j) * (power.array() - mean).matrix();
  }
  return p.cwiseProduct(factor);
}

BathMoments bath_moments(const TruncatedBath& tb, const Eigen::VectorXd& p,
                         const Eigen::VectorXd& lambda) {
  const int n = tb.n_B;
  const MatXc& B = tb.B;
  const MatXc B2 = B * B;
  const MatXc B3 = B2 * B;
  const MatXc B4 = B3 * B;
  auto weighted = [&](const MatXc& X, const Eigen::VectorXd& w) {
    double s = 0;
    for (int i = 0; i < n; ++i) s += w(i) * X(i, i).real();
    return s;
  };
  BathMoments m;
  m.Bbar = weighted(B, p);
  m.B2bar = weighted(B2, p);
  m.B3bar = weighted(B3, p);
  m.calBbar = weighted(B, lambda);
  m.calB2 = weighted(B2, lambda);
  m.calB3 = weighted(B3, lambda);
  m.calB4 = weighted(B4, lambda);
  m.TrB[0] = n;
  m.TrB[1] = B.trace().real();
  m.TrB[2] = B2.trace().real();
  m.TrB[3] = B3.trace().real();
  m.LambdaBar = lambda.dot(p);
  m.TrLambda2 = lambda.squaredNorm();
  const Eigen::VectorXd l2 = lambda.cwiseProduct(lambda);
  m.TrBLambda2 = weighted(B, l2);
  const Eigen::VectorXd& e = tb.evals;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double b2 = std::norm(B(i, j)) * lambda(i);
      m.Kubo3[0] += b2 * e(j) * e(j);
      m.Kubo3[1] += b2 * e(i) * e(j);
      m.Kubo3[2] += b2 * e(i) * e(i);
    }
  return m;
}

std::string format_bath_report(const TruncatedBath& tb, const Eigen::VectorXd& p,
                               const BathMoments& m) {
  std::ostringstream os;
  char buf[96];
  auto kv = [&](const char* k, double v) {
    std::snprintf(buf, sizeof buf, "%s = %.17g\n", k, v);
    os << buf;
  };
  os << "n_B = " << tb.n_B << "\n";
  os << "requested_n_B = " << tb.requested_n_B << "\n";
  for (int i = 0; i < tb.n_B; ++i) {
    std::snprintf(buf, sizeof buf, "eval_%d = %.17g\n", i, tb.evals(i));
    os << buf;
  }
  for (int i = 0; i < tb.n_B; ++i) {
    std::snprintf(buf, sizeof buf, "p_%d = %.17g\n", i, p(i));
    os << buf;
  }
  kv("Bbar", m.Bbar);
  kv("B2bar", m.B2bar);
  kv("B3bar", m.B3bar);
  kv("calBbar", m.calBbar);
  kv("calB2", m.calB2);
  kv("calB3", m.calB3);
  kv("calB4", m.calB4);
  kv("TrB1", m.TrB[1]);
  kv("TrB2", m.TrB[2]);
  kv("TrB3", m.TrB[3]);
  kv("LambdaBar", m.LambdaBar);
  kv("TrLambda2", m.TrLambda2);
  kv("TrBLambda2", m.TrBLambda2);
  kv("Kubo_BHHBL", m.Kubo3[0]);
  kv("Kubo_HBHBL", m.Kubo3[1]);
  kv("Kubo_HHBBL", m.Kubo3[2]);
  return os.str();
}

}  // namespace nzfit
