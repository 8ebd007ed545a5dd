#include "nzfit/w_function.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace nzfit {

namespace {

constexpr dd kPi{3.141592653589793116, 1.2246467991473532072e-16};
constexpr double kUp = 0x1.0p400;
constexpr double kDown = 0x1.0p-400;

int miller_start(double x, int nmax) {
  const double m = std::max<double>(nmax, std::ceil(x));
  int n = int(m) + 60 + int(4 * std::sqrt(m));
  return n + (n & 1);
}

}  // namespace

std::vector<dd> bessel_j_integer(dd x, int nmax) {
  if (!(x.hi > 0)) throw NumericalError("bessel_j_integer needs x > 0");
  const int N = miller_start(x.hi, nmax);
  const dd inv_x = dd(1) / x;
  std::vector<dd> J(nmax + 1);
  dd jp1 = 0, j = 1;
  dd sum = 2;  // N is even
  for (int k = N; k > 0; --k) {
    const dd jm1 = (inv_x * double(2 * k)) * j - jp1;
    jp1 = j;
    j = jm1;
    const int o = k - 1;
    if (o <= nmax) J[o] = j;
    if (o > 0 && (o & 1) == 0) sum += 2 * j;
    if (std::abs(j.hi) > kUp) {
      j = j * kDown;
      jp1 = jp1 * kDown;
      sum = sum * kDown;
      for (int i = o; i <= nmax; ++i) J[i] = J[i] * kDown;
    }
  }
  sum += j;
  const dd inv = dd(1) / sum;
  for (auto& v : J) v = v * inv;
  return J;
}

std::vector<dd> bessel_j_spherical(dd x, int nmax) {
  if (!(x.hi > 0)) throw NumericalError("bessel_j_spherical needs x > 0");
  const int N = miller_start(x.hi, nmax);
  const dd inv_x = dd(1) / x;
  std::vector<dd> jv(nmax + 1);
  dd jp1 = 0, j = 1;
  dd sum = double(2 * N + 1);
  for (int k = N; k > 0; --k) {
    const dd jm1 = (inv_x * double(2 * k + 1)) * j - jp1;
    jp1 = j;
    j = jm1;
    const int o = k - 1;
    if (o <= nmax) jv[o] = j;
    sum += double(2 * o + 1) * (j * j);
    if (std::abs(j.hi) > kUp) {
      j = j * kDown;
      jp1 = jp1 * kDown;
      sum = sum * kDown * kDown;
      for (int i = o; i <= nmax; ++i) jv[i] = jv[i] * kDown;
    }
  }
  const dd inv = dd(1) / sqrt(sum);
  for (auto& v : jv) v = v * inv;
  // the normalization fixes magnitude only; take the sign from closed forms
  const double xd = to_double(x);
  const double j0 = std::sin(xd) / xd;
  const double j1 = std::sin(xd) / (xd * xd) - std::cos(xd) / xd;
  const bool flip = std::abs(j0) >= std::abs(j1) ? (j0 < 0) != (jv[0].hi < 0)
                                                  : (nmax >= 1 ? (j1 < 0) != (jv[1].hi < 0) : false);
  if (flip)
    for (auto& v : jv) v = -v;
  return jv;
}

dd bessel_h_series(dd x, double nu) {
  const dd q = -(x * x) / 4.0;
  dd term = 1, sum = 1;
  for (int k = 1; k < 200; ++k) {
    term = term * q / (double(k) * (nu + k));
    sum += term;
    if (std::abs(term.hi) <= 1e-34 * std::abs(sum.hi)) break;
  }
  return sum;
}

namespace {

// 20-point Gauss-Legendre on [-1, 1] by Golub-Welsch
const std::array<std::pair<double, double>, 20>& gauss_legendre20() {
  static const auto rule = [] {
    constexpr int n = 20;
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) J(k, k - 1) = J(k - 1, k) = k / std::sqrt(4.0 * k * k - 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    std::array<std::pair<double, double>, n> r;
    for (int i = 0; i < n; ++i) {
      const double v = es.eigenvectors()(0, i);
      r[i] = {es.eigenvalues()(i), 2 * v * v};
    }
    return r;
  }();
  return rule;
}

// Composite rule on [0, pi/2], panels sized to the phase range of the integrand.
int quadrature_panels(double alpha, double beta, double t) {
  return 2 + int(std::ceil((std::abs(alpha * t) + std::abs(beta * t)) / 5));
}

}  // namespace

double eval_W_quadrature(double alpha, double beta, double t) {
  if (t == 0) return 1;
  const double at = alpha * t, bt = beta * t;
  const int panels = quadrature_panels(alpha, beta, t);
  const double h = (M_PI / 2) / panels;
  double sum = 0;
  for (int p = 0; p < panels; ++p) {
    const double mid = (p + 0.5) * h;
    double ps = 0;
    for (const auto& [node, w] : gauss_legendre20()) {
      const double th = mid + 0.5 * h * node;
      const double s = std::sin(th);
      const double y = at * s;
      const double phi = std::abs(y) < 1e-8 ? 1 - y / 2 : -std::expm1(-y) / y;
      ps += w * s * s * phi * std::cos(bt * std::cos(th));
    }
    sum += ps * 0.5 * h;
  }
  return 4 / M_PI * sum;
}

std::vector<double> eval_W_grid(double alpha, double beta, double dt, int n) {
  if (n < 1) return {};
  if (!(beta > 0)) throw NumericalError("W requires beta > 0");
  if (!(dt > 0)) throw NumericalError("W grid needs dt > 0");
  std::vector<double> W(n);
  if (alpha < 0) {
    // growing integrand: every form cancels, so use the extended-precision path
    for (int i = 0; i < n; ++i) W[i] = eval_W(alpha, beta, dt * i);
    return W;
  }
  const double t_max = dt * (n - 1);
  const int panels = quadrature_panels(alpha, beta, t_max);
  const double h = (M_PI / 2) / panels;
  const std::size_t Q = std::size_t(panels) * 20;
  // per node: u = (1 - e^{-alpha t s}) / alpha advanced as u_i = g u_{i-1} + d
  // (no cancellation), and e^{i beta t c} by rotation; phi = u / (t s)
  std::vector<double> wq(Q), g(Q), d(Q), u(Q, 0.0), cr(Q), ci(Q), rr(Q, 1.0), ri(Q, 0.0);
  std::size_t q = 0;
  for (int p = 0; p < panels; ++p) {
    const double mid = (p + 0.5) * h;
    for (const auto& [node, w] : gauss_legendre20()) {
      const double th = mid + 0.5 * h * node;
      const double s = std::sin(th), c = std::cos(th);
      wq[q] = w * 0.5 * h * s / dt;
      g[q] = std::exp(-alpha * dt * s);
      d[q] = alpha == 0 ? dt * s : -std::expm1(-alpha * dt * s) / alpha;
      cr[q] = std::cos(beta * dt * c);
      ci[q] = std::sin(beta * dt * c);
      ++q;
    }
  }
  W[0] = 1;
  for (int i = 1; i < n; ++i) {
    double sum = 0;
    for (std::size_t k = 0; k < Q; ++k) {
      u[k] = u[k] * g[k] + d[k];
      const double re = rr[k] * cr[k] - ri[k] * ci[k];
      const double im = rr[k] * ci[k] + ri[k] * cr[k];
      rr[k] = re;
      ri[k] = im;
      sum += wq[k] * u[k] * re;
    }
    W[i] = 4 / M_PI * sum / i;
  }
  return W;
}

namespace {

WResult w_series(double alpha, double beta, double t, const WOptions& opt) {
  WResult r;
  r.used = WMethod::Series;
  const dd x = dd(beta) * t;
  const dd at = dd(alpha) * t;
  // a = alpha^2 t / (2 beta) sets the height of the largest term, ~e^a
  const dd a = (dd(alpha) * alpha) * t / (2.0 * beta);
  const double ad = to_double(a), xd = to_double(x);
  const int mmax = opt.max_terms / 2 + 1;
  const bool small_x = xd <= 2;

  std::vector<dd> Jint, Jsph;
  if (!small_x) {
    const int nu_need = std::min(mmax + 1, int(std::max(ad, xd) + 12 * std::sqrt(std::max(ad, xd)) + 40));
    Jint = bessel_j_integer(x, nu_need);
    Jsph = bessel_j_spherical(x, nu_need);
  }

  dd sum = 0;
  double max_term = 0;
  int small_run = 0;
  int n = 0;
  bool converged = false;
  // Bessel path: T_2m = E_m J_{m+1}, T_2m+1 = O_m j_{m+1}
  dd E = dd(2) / x, O = -(dd(4) * alpha) / (kPi * beta);
  // small-x path: T_n = P_n h_{n/2+1}, P_n = (-alpha t/2)^n / (Gamma(n/2+1) Gamma(n/2+2))
  dd Pe = 1, Po = -(dd(4) * at) / (3.0 * kPi);
  const dd at2 = at * at;
  for (n = 0; n < opt.max_terms; ++n) {
    const int m = n / 2;
    dd T;
    if (small_x) {
      if (n >= 2) {
        if (n & 1)
          Po = Po * at2 / (double(n) * (n + 2));
        else
          Pe = Pe * at2 / (double(n) * (n + 2));
      }
      T = (n & 1 ? Po : Pe) * bessel_h_series(x, n / 2.0 + 1);
    } else {
      if (m + 1 >= int(Jint.size())) break;
      if (n & 1) {
        if (m > 0) O = O * (2.0 * a) / double(2 * m + 1);
        T = O * Jsph[m + 1];
      } else {
        if (m > 0) E = E * a / double(m);
        T = E * Jint[m + 1];
      }
    }
    if (!std::isfinite(T.hi)) break;
    sum += T;
    const double at_ = std::abs(T.hi);
    max_term = std::max(max_term, at_);
    const bool past_peak = m > ad && m + 1 > xd;
    if (at_ <= opt.term_tol * std::abs(sum.hi))
      ++small_run;
    else
      small_run = 0;
    if (past_peak && small_run >= 3) {
      converged = true;
      ++n;
      break;
    }
  }
  r.value = to_double(sum);
  r.terms = n;
  r.max_term = max_term;
  if (!converged)
    throw WSeriesError("W series did not converge within " + std::to_string(opt.max_terms) + " terms",
                       r.value, n, max_term);
  if (max_term * 1e-30 > opt.loss_tol * std::abs(r.value))
    throw WSeriesError("W series lost precision to cancellation", r.value, n, max_term);
  return r;
}

}  // namespace

WResult eval_W_detail(double alpha, double beta, double t, const WOptions& opt) {
  if (!(beta > 0)) throw NumericalError("W requires beta > 0");
  if (!(t >= 0)) throw NumericalError("W requires t >= 0");
  if (!std::isfinite(alpha)) throw NumericalError("W requires finite alpha");
  if (t == 0) return WResult{1, 1, 1, opt.method == WMethod::Quadrature ? WMethod::Quadrature : WMethod::Series};
  if (opt.method == WMethod::Quadrature) {
    WResult r;
    r.value = eval_W_quadrature(alpha, beta, t);
    r.used = WMethod::Quadrature;
    return r;
  }
  if (opt.method == WMethod::Series) return w_series(alpha, beta, t, opt);
  // Auto: skip the series when the largest term alone would swamp 32 digits
  const double a = alpha * alpha * t / (2 * beta);
  if (a < 45) {
    try {
      return w_series(alpha, beta, t, opt);
    } catch (const WSeriesError&) {
    }
  }
  WResult r;
  r.value = eval_W_quadrature(alpha, beta, t);
  r.used = WMethod::Quadrature;
  return r;
}

}  // namespace nzfit
