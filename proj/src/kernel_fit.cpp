#include "nzfit/kernel_fit.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace nzfit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int grid_size(const FitProblem& p) { return int(std::lround(p.t_max / p.grid_dt)) + 1; }

template <class F>
double trapezoid(int n, double dt, F&& sq) {
  double s = 0;
  for (int i = 0; i < n; ++i) s += (i == 0 || i == n - 1 ? 0.5 : 1.0) * sq(i);
  return s * dt;
}

}  // namespace

void validate(const FitProblem& p) {
  if (!(p.eta_bound > 0) || !(p.x_bound > 0)) throw NumericalError("fit bounds must be positive");
  if (p.n_p < 0) throw NumericalError("n_p must be nonnegative");
  if (!(p.t_max > 0) || !(p.grid_dt > 0)) throw NumericalError("t_max and grid_dt must be positive");
  const double r = p.t_max / p.grid_dt;
  if (std::abs(r - std::round(r)) > 1e-9 * r) throw NumericalError("grid_dt must divide t_max");
  for (double x : p.x0)
    if (x < 0 || x > p.x_bound) throw NumericalError("initial X outside [0, x_bound]");
}

MeanFieldKernel meanfield_for_eta(const Eigen::VectorXd& eta, const FitContext& ctx,
                                  BathMoments* moments) {
  const Eigen::VectorXd lam = build_lambda(ctx.tb, ctx.p, eta);
  const BathMoments m = bath_moments(ctx.tb, ctx.p, lam);
  if (moments) *moments = m;
  MeanFieldKernel k = make_meanfield_kernel(ctx.dc, m);
  k.w = ctx.w;
  return k;
}

MFGrid mf_grid(const Eigen::VectorXd& eta, const FitContext& ctx, const FitProblem& p) {
  MFGrid g;
  const Eigen::VectorXd lam = build_lambda(ctx.tb, ctx.p, eta);
  const BathMoments m = bath_moments(ctx.tb, ctx.p, lam);
  g.K1_0 = m.calB2 - m.calBbar * m.calBbar;
  if (!(g.K1_0 > 0)) return g;
  try {
    const Channel c2 = channel_param(2, ctx.dc, m);
    const Channel c3 = channel_param(3, ctx.dc, m);
    const int n = grid_size(p);
    const std::vector<double> w2 = eval_W_grid(c2.mf_alpha, c2.mf_beta, p.grid_dt, n);
    const std::vector<double> w3 = eval_W_grid(c3.mf_alpha, c3.mf_beta, p.grid_dt, n);
    g.K1.resize(n);
    for (int i = 0; i < n; ++i) {
      g.K1[i] = m.calB2 * w3[i] - m.calBbar * m.calBbar * w2[i];
      if (!std::isfinite(g.K1[i])) return g;
    }
  } catch (const NumericalError&) {
    return g;
  }
  g.ok = true;
  return g;
}

double squared_difference(const std::vector<double>& a, const SMEKernel& k, double dt) {
  return trapezoid(int(a.size()), dt, [&](int i) {
    const double d = a[i] - eval_K1_sme(k, i * dt);
    return d * d;
  });
}

namespace {

double objective_from_grid(const MFGrid& g, const std::array<double, 4>& X, const FitProblem& p) {
  if (!g.ok) return kInf;
  try {
    const SMEKernel k = sme_from_x(X, g.K1_0, p.x_bound);
    if (!validate_constraints(k).all_satisfied()) return kInf;
    const double f = squared_difference(g.K1, k, p.grid_dt);
    return std::isfinite(f) ? f : kInf;
  } catch (const NumericalError&) {
    return kInf;
  }
}

}  // namespace

double objective_f(const Eigen::VectorXd& eta, const std::array<double, 4>& X, const FitContext& ctx,
                   const FitProblem& p) {
  for (Eigen::Index j = 0; j < eta.size(); ++j)
    if (std::abs(eta(j)) > p.eta_bound) return kInf;
  return objective_from_grid(mf_grid(eta, ctx, p), X, p);
}

FitResult fit_kernel(const FitContext& ctx, const FitProblem& p) {
  validate(p);
  const int np = p.n_p;
  const int n = np + 4;
  Eigen::VectorXd lb(n), ub(n), x0(n);
  for (int j = 0; j < np; ++j) {
    lb(j) = -p.eta_bound;
    ub(j) = p.eta_bound;
    x0(j) = 0;
  }
  for (int j = 0; j < 4; ++j) {
    lb(np + j) = 0;
    ub(np + j) = p.x_bound;
    x0(np + j) = p.x0[j];
  }

  // the grid depends on eta only; coordinate moves in X reuse it
  std::map<std::vector<double>, MFGrid> cache;
  auto f = [&](const Eigen::VectorXd& v) {
    std::vector<double> key(v.data(), v.data() + np);
    auto it = cache.find(key);
    if (it == cache.end()) {
      if (cache.size() > 64) cache.clear();
      it = cache.emplace(key, mf_grid(v.head(np), ctx, p)).first;
    }
    return objective_from_grid(it->second, {v(np), v(np + 1), v(np + 2), v(np + 3)}, p);
  };

  const AnnealResult a = anneal(f, lb, ub, x0, p.schedule);
  FitResult r;
  r.eta = a.x.head(np);
  for (int j = 0; j < 4; ++j) r.X[j] = a.x(np + j);
  r.f = a.f;
  r.f_initial = a.f_initial;
  r.evals = a.evals;
  r.temperatures = a.temperatures;
  r.terminated = a.terminated;
  r.acceptance = a.acceptance;
  r.best = a.best;
  r.mf = meanfield_for_eta(r.eta, ctx, &r.moments);
  r.kernel = sme_from_x(r.X, r.moments.calB2 - r.moments.calBbar * r.moments.calBbar, p.x_bound);
  return r;
}

SyntheticFit fit_synthetic_exponential(double b_true, double c_true, const FitProblem& p) {
  validate(p);
  const int n = grid_size(p);
  std::vector<double> target(n);
  double peak = 0;
  for (int i = 0; i < n; ++i) {
    target[i] = c_true * std::exp(-b_true * i * p.grid_dt);
    peak = std::max(peak, std::abs(target[i]));
  }
  if (!(peak > 0)) throw NumericalError("synthetic target is identically zero");
  Eigen::VectorXd lb(2), ub(2), x0(2);
  lb << 0, 0;
  ub << p.x_bound, 4 * peak;
  x0 << p.x_bound / 2, 2 * peak;
  auto f = [&](const Eigen::VectorXd& v) {
    return trapezoid(n, p.grid_dt, [&](int i) {
      const double d = target[i] - v(1) * std::exp(-v(0) * i * p.grid_dt);
      return d * d;
    });
  };
  const AnnealResult a = anneal(f, lb, ub, x0, p.schedule);
  return {a.x(0), a.x(1), a.f, a.evals};
}

std::string format_fit(const FitResult& r, const FitProblem& p) {
  std::ostringstream os;
  char buf[128];
  auto kv = [&](const std::string& k, double v) {
    std::snprintf(buf, sizeof buf, "%s = %.17g\n", k.c_str(), v);
    os << buf;
  };
  os << "n_p = " << p.n_p << "\n";
  for (Eigen::Index j = 0; j < r.eta.size(); ++j) kv("eta_" + std::to_string(j + 1), r.eta(j));
  for (int j = 0; j < 4; ++j) kv("X_" + std::to_string(j + 1), r.X[j]);
  kv("beta", r.kernel.beta_s);
  kv("mu", r.kernel.mu);
  kv("nu", r.kernel.nu);
  kv("gamma", r.kernel.gamma);
  kv("K1_0", r.kernel.K1_0);
  kv("K0_0", r.kernel.K0_0);
  kv("lambda", r.kernel.lambda);
  kv("alpha", r.kernel.alpha_s);
  kv("V0", r.kernel.V0);
  kv("kappa", r.kernel.gamma != 0 ? kappa(r.kernel) : 0);
  kv("f", r.f);
  kv("f_initial", r.f_initial);
  os << "evaluations = " << r.evals << "\n";
  os << "temperatures = " << r.temperatures << "\n";
  os << "terminated = " << (r.terminated ? 1 : 0) << "\n";
  kv("Bbar", r.mf.Bbar);
  kv("calBbar", r.mf.calBbar);
  kv("calB2", r.mf.calB2);
  for (int k = 0; k < 3; ++k) {
    kv("mf_alpha_" + std::to_string(k + 1), r.mf.channels.ch[k].mf_alpha);
    kv("mf_beta_" + std::to_string(k + 1), r.mf.channels.ch[k].mf_beta);
  }
  for (std::size_t i = 0; i < r.acceptance.size(); ++i) {
    std::snprintf(buf, sizeof buf, "temperature_%zu = acceptance %.6f best %.17g\n", i, r.acceptance[i],
                  r.best[i]);
    os << buf;
  }
  os << "[constraints]\n" << validate_constraints(r.kernel).format();
  return os.str();
}

}  // namespace nzfit
