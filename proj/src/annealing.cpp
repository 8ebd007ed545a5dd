#include "nzfit/annealing.hpp"

#include "nzfit/linalg.hpp"
#include "nzfit/rng.hpp"

#include <cmath>
#include <limits>

namespace nzfit {

AnnealResult anneal(const Objective& f, const Eigen::VectorXd& lb, const Eigen::VectorXd& ub,
                    const Eigen::VectorXd& x0, const AnnealOptions& opt) {
  const Eigen::Index n = x0.size();
  if (lb.size() != n || ub.size() != n) throw NumericalError("bound sizes do not match x0");
  for (Eigen::Index i = 0; i < n; ++i)
    if (!(lb(i) < ub(i)) || x0(i) < lb(i) || x0(i) > ub(i))
      throw NumericalError("starting point outside the box");
  auto g = make_stream(opt.seed, "annealer");
  AnnealResult r;

  Eigen::VectorXd x = x0;
  double fx = f(x);
  ++r.evals;
  r.f_initial = fx;

  // initial temperature from random feasible samples; they also rescue an
  // infeasible start
  double T = opt.T0;
  {
    double mean = 0, m2 = 0;
    int count = 0;
    Eigen::VectorXd best_sample;
    double best_f = std::numeric_limits<double>::infinity();
    const int samples = (opt.T0 > 0 && std::isfinite(fx)) ? 0 : opt.t0_samples;
    for (int s = 0; s < samples; ++s) {
      Eigen::VectorXd y(n);
      for (Eigen::Index i = 0; i < n; ++i) y(i) = lb(i) + (ub(i) - lb(i)) * uniform01(g);
      const double fy = f(y);
      ++r.evals;
      if (!std::isfinite(fy)) continue;
      ++count;
      const double d = fy - mean;
      mean += d / count;
      m2 += d * (fy - mean);
      if (fy < best_f) {
        best_f = fy;
        best_sample = y;
      }
    }
    if (!std::isfinite(fx)) {
      if (!std::isfinite(best_f)) throw NumericalError("annealing found no feasible point");
      x = best_sample;
      fx = best_f;
    }
    if (T <= 0) T = count > 1 ? std::sqrt(m2 / (count - 1)) : 0;
    if (!(T > 0)) T = std::max(std::abs(fx), 1e-300);
  }
  r.T0 = T;

  Eigen::VectorXd xopt = x;
  double fopt = fx;
  Eigen::VectorXd vm = (ub - lb) / 4;
  std::vector<double> fstar(opt.neps, std::numeric_limits<double>::infinity());
  Eigen::VectorXi nacp = Eigen::VectorXi::Zero(n);

  for (int temp = 0; temp < opt.max_temperatures && r.evals < opt.max_evals; ++temp) {
    long accepted = 0, tried = 0;
    for (int m = 0; m < opt.nt; ++m) {
      for (int j = 0; j < opt.ns; ++j)
        for (Eigen::Index h = 0; h < n; ++h) {
          Eigen::VectorXd xp = x;
          xp(h) = x(h) + (2 * uniform01(g) - 1) * vm(h);
          if (xp(h) < lb(h) || xp(h) > ub(h)) xp(h) = lb(h) + (ub(h) - lb(h)) * uniform01(g);
          const double fp = f(xp);
          ++r.evals;
          ++tried;
          bool take = false;
          if (fp <= fx)
            take = true;
          else if (std::isfinite(fp))
            take = uniform01(g) < std::exp((fx - fp) / T);
          if (take) {
            x = xp;
            fx = fp;
            ++accepted;
            ++nacp(h);
            if (fp < fopt) {
              xopt = xp;
              fopt = fp;
            }
          }
        }
      for (Eigen::Index i = 0; i < n; ++i) {
        const double ratio = double(nacp(i)) / opt.ns;
        if (ratio > 0.6)
          vm(i) *= 1 + opt.c * (ratio - 0.6) / 0.4;
        else if (ratio < 0.4)
          vm(i) /= 1 + opt.c * (0.4 - ratio) / 0.4;
        vm(i) = std::min(vm(i), ub(i) - lb(i));
      }
      nacp.setZero();
    }
    r.temperatures = temp + 1;
    r.acceptance.push_back(tried ? double(accepted) / tried : 0);
    r.best.push_back(fopt);

    const double tol = std::max(opt.eps * std::abs(fopt), opt.abs_eps);
    bool quit = std::abs(fx - fopt) <= tol;
    for (double fs : fstar)
      if (!(std::abs(fx - fs) <= tol)) quit = false;
    for (int k = opt.neps - 1; k > 0; --k) fstar[k] = fstar[k - 1];
    if (opt.neps > 0) fstar[0] = fx;
    if (quit) {
      r.terminated = true;
      break;
    }
    T *= opt.rt;
    x = xopt;
    fx = fopt;
  }
  r.x = xopt;
  r.f = fopt;
  return r;
}

}  // namespace nzfit
