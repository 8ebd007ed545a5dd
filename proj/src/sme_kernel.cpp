#include "nzfit/sme_kernel.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace nzfit {

namespace {

cplx cubic(cplx z, double mu, double nu, double gamma) { return ((z + mu) * z + nu) * z + gamma; }
cplx cubic_d(cplx z, double mu, double nu) { return (3.0 * z + 2 * mu) * z + nu; }

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

}  // namespace

std::array<cplx, 3> cubic_roots(double mu, double nu, double gamma) {
  if (!std::isfinite(mu) || !std::isfinite(nu) || !std::isfinite(gamma))
    throw NumericalError("cubic coefficients must be finite");
  // a vanishing discriminant means a repeated root, which the companion
  // eigenvalues only resolve to about cbrt(eps)
  const double terms[5] = {18 * mu * nu * gamma, -4 * mu * mu * mu * gamma, mu * mu * nu * nu, -4 * nu * nu * nu,
                           -27 * gamma * gamma};
  double disc = 0, scale = 0;
  for (double t : terms) {
    disc += t;
    scale += std::abs(t);
  }
  if (std::abs(disc) <= 1e-12 * scale)
    throw NumericalError("cubic has (nearly) repeated roots; perturb the kernel parameters");
  Eigen::Matrix3d C;
  C << -mu, -nu, -gamma, 1, 0, 0, 0, 1, 0;
  Eigen::EigenSolver<Eigen::Matrix3d> es(C, false);
  if (es.info() != Eigen::Success) throw NumericalError("companion eigenvalues failed");
  std::array<cplx, 3> z;
  for (int i = 0; i < 3; ++i) z[i] = es.eigenvalues()(i);
  for (auto& r : z)
    for (int it = 0; it < 4; ++it) {
      const cplx d = cubic_d(r, mu, nu);
      if (d == cplx(0)) break;
      const cplx step = cubic(r, mu, nu, gamma) / d;
      if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) break;
      r -= step;
    }
  std::sort(z.begin(), z.end(), [](cplx a, cplx b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  // restore exact conjugate symmetry of complex pairs
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j)
      if (std::abs(z[i] - std::conj(z[j])) <= 1e-8 * std::max(1.0, std::abs(z[i])) &&
          std::abs(z[i].imag()) > 1e-12 * std::max(1.0, std::abs(z[i]))) {
        const cplx m = 0.5 * (z[i] + std::conj(z[j]));
        z[i] = m.imag() < 0 ? m : std::conj(m);
        z[j] = std::conj(z[i]);
      }
  for (auto& r : z)
    if (std::abs(r.imag()) <= 1e-14 * std::max(1.0, std::abs(r))) r = r.real();
  for (const auto& r : z) {
    const double res = std::abs(cubic(r, mu, nu, gamma));
    if (res > 1e-9 * std::max(1.0, std::pow(std::abs(r), 3)))
      throw NumericalError(fmt("cubic root residual %.3g exceeds tolerance", res));
  }
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j)
      if (std::abs(z[i] - z[j]) <= 1e-8 * std::max(1.0, std::abs(z[i])))
        throw NumericalError("cubic has (nearly) repeated roots; perturb the kernel parameters");
  return z;
}

void SMEKernel::finalize() {
  lambda = beta_s - mu;
  alpha_s = beta_s + lambda / 4;
  K0_0 = K0_sign * std::sqrt(std::max(K1_0, 0.0));
  V0 = nu - mu * beta_s + beta_s * beta_s;
  roots = cubic_roots(mu, nu, gamma);
  for (int k = 0; k < 3; ++k) {
    cplx den = 1;
    for (int j = 0; j < 3; ++j)
      if (j != k) den *= roots[k] - roots[j];
    a[k] = K1_0 * roots[k] * (roots[k] + beta_s) / den;
    b[k] = K0_0 * roots[k] * (roots[k] + alpha_s) / den;
  }
}

SMEKernel make_sme_kernel(double beta_s, double mu, double nu, double gamma, double K1_0,
                          double K0_sign) {
  SMEKernel k;
  k.beta_s = beta_s;
  k.mu = mu;
  k.nu = nu;
  k.gamma = gamma;
  k.K1_0 = K1_0;
  k.K0_sign = K0_sign < 0 ? -1 : 1;
  k.finalize();
  return k;
}

SMEKernel sme_from_x(const std::array<double, 4>& X, double K1_0, double x_bound) {
  for (int i = 0; i < 4; ++i) {
    if (!(X[i] >= 0)) throw NumericalError(fmt("X%.0f = %.6g is negative", i + 1, X[i]));
    if (X[i] > x_bound) throw NumericalError(fmt("X%.0f = %.6g exceeds the bound %.6g", i + 1, X[i], x_bound));
  }
  const double beta = X[0];
  const double mu = beta + X[1] + 2 * std::sqrt(X[2]);
  const double nu = X[2] + mu * beta - beta * beta;
  return make_sme_kernel(beta, mu, nu, X[3], K1_0);
}

bool ConstraintReport::all_satisfied() const { return first_failure() == nullptr; }

const ConstraintEntry* ConstraintReport::first_failure() const {
  for (const auto& e : entries)
    if (!e.satisfied) return &e;
  return nullptr;
}

std::string ConstraintReport::format() const {
  std::ostringstream os;
  for (const auto& e : entries)
    os << e.name << ": " << e.detail << ": " << (e.satisfied ? "pass" : "fail") << "\n";
  return os.str();
}

ConstraintReport validate_constraints(const SMEKernel& k) {
  ConstraintReport r;
  const double b = k.beta_s, lam = k.lambda;
  r.entries.push_back({"beta_positive", fmt("beta = %.10g", b), b > 0});
  r.entries.push_back({"gamma_positive", fmt("gamma = %.10g", k.gamma), k.gamma > 0});
  r.entries.push_back({"V0_positive", fmt("V(0) = %.10g", k.V0), k.V0 > 0});
  r.entries.push_back({"R_decreasing", fmt("3 beta - mu = %.10g", 3 * b - k.mu), 3 * b > k.mu});
  const double s = std::sqrt(std::max(k.K1_0, 0.0));
  r.entries.push_back({"K0_magnitude", fmt("|K0(0)| = %.10g, sqrt(K1(0)) = %.10g", std::abs(k.K0_0), s),
                       k.K1_0 > 0 && std::abs(std::abs(k.K0_0) - s) <= 1e-12 * s});
  r.entries.push_back({"alpha_window", fmt("beta + lambda/2 = %.10g <= alpha = %.10g <= beta = %.10g", b + lam / 2, k.alpha_s, b),
                       b >= k.alpha_s && k.alpha_s >= b + lam / 2});
  r.entries.push_back({"lambda_negative", fmt("lambda = %.10g", lam), lam < 0});
  r.entries.push_back({"lambda_V0", fmt("lambda^2/4 - V(0) = %.10g", lam * lam / 4 - k.V0),
                       lam * lam / 4 >= k.V0});
  r.entries.push_back({"R_sign_constant", "R(t) is a single exponential (structural)", true});
  return r;
}

double eval_K1_sme(const SMEKernel& k, double t) {
  cplx s = 0;
  for (int i = 0; i < 3; ++i) s += k.a[i] * std::exp(k.roots[i] * t);
  return s.real();
}

double eval_K0_sme(const SMEKernel& k, double t) {
  cplx s = 0;
  for (int i = 0; i < 3; ++i) s += k.b[i] * std::exp(k.roots[i] * t);
  return s.real();
}

double imag_residue_K1(const SMEKernel& k, double t) {
  cplx s = 0;
  for (int i = 0; i < 3; ++i) s += k.a[i] * std::exp(k.roots[i] * t);
  return s.imag();
}

double kappa(const SMEKernel& k) {
  if (k.gamma == 0) throw NumericalError("kappa undefined for gamma = 0");
  return k.K1_0 * k.beta_s / k.gamma;
}

double eval_V(const SMEKernel& k, double t) {
  if (k.beta_s == 0) return k.V0 + k.gamma * t;
  const double tail = k.gamma / k.beta_s;
  return (k.V0 - tail) * std::exp(-k.beta_s * t) + tail;
}

double eval_Delta(const SMEKernel& k, double t) {
  return (k.beta_s * k.V0 - k.gamma) * std::exp(-k.beta_s * t);
}

double eval_R(const SMEKernel& k, double t) {
  if (k.K1_0 == 0) return 0;
  return (k.alpha_s - k.beta_s) * k.K0_0 / k.K1_0 * std::exp(-k.beta_s * t);
}

std::string MonotonicityReport::format() const {
  std::ostringstream os;
  os << "V_nonnegative: " << fmt("min V = %.10g", min_V) << ": " << (V_nonnegative ? "pass" : "fail")
     << "\n";
  os << "Delta_nonnegative: " << fmt("min Delta = %.10g", min_Delta) << ": "
     << (Delta_nonnegative ? "pass" : "fail") << "\n";
  return os.str();
}

MonotonicityReport complete_monotonicity_check(const SMEKernel& k, double t_max, int n_points) {
  MonotonicityReport r;
  r.min_V = eval_V(k, 0);
  r.min_Delta = eval_Delta(k, 0);
  for (int i = 0; i < n_points; ++i) {
    const double t = n_points > 1 ? t_max * i / (n_points - 1) : 0;
    r.min_V = std::min(r.min_V, eval_V(k, t));
    r.min_Delta = std::min(r.min_Delta, eval_Delta(k, t));
  }
  r.V_nonnegative = r.min_V >= 0;
  r.Delta_nonnegative = r.min_Delta >= 0;
  return r;
}

}  // namespace nzfit
