#include "doctest.h"

#include "nzfit/kernel_fit.hpp"

using namespace nzfit;

namespace {

FitContext small_context() {
  SystemParams p;
  p.n_spins = 5;
  const auto ops = build_bath_operators(compute_couplings(sample_lattice(5, 5, 2)), p);
  FitContext c;
  c.tb = truncate_bath(ops.H_B, ops.B, 12);
  c.p = thermal_state(c.tb, p.kBT);
  c.dc = double_commutator_means<double>(MatXc(build_system_hamiltonian(p)), MatXc(build_spin1_ops().Sx));
  return c;
}

FitProblem short_problem() {
  FitProblem p;
  p.n_p = 3;
  p.schedule.ns = 5;
  p.schedule.nt = 2;
  p.schedule.max_temperatures = 3;
  p.schedule.t0_samples = 20;
  return p;
}

}  // namespace

TEST_SUITE("kernel_fit") {

TEST_CASE("annealer finds a quadratic minimum") {
  Eigen::VectorXd lb(2), ub(2), x0(2);
  lb << -5, -5;
  ub << 5, 5;
  x0 << 4, 4;
  AnnealOptions o;
  o.seed = 11;
  // the minimum value is zero, so the relative test alone cannot trigger
  o.abs_eps = 1e-12;
  const auto r = anneal([](const Eigen::VectorXd& x) { return std::pow(x(0) - 1.3, 2) + 4 * std::pow(x(1) + 0.7, 2); },
                        lb, ub, x0, o);
  CHECK(std::abs(r.x(0) - 1.3) < 1e-3);
  CHECK(std::abs(r.x(1) + 0.7) < 1e-3);
  CHECK(r.f <= r.f_initial);
  CHECK(r.terminated);
  for (std::size_t i = 1; i < r.best.size(); ++i) CHECK(r.best[i] <= r.best[i - 1]);
  CHECK(r.best.back() == r.f);
}

TEST_CASE("annealer respects the box and rejects hopeless problems") {
  Eigen::VectorXd lb(1), ub(1), x0(1);
  lb << 2;
  ub << 3;
  x0 << 2.5;
  AnnealOptions o;
  const auto r = anneal([](const Eigen::VectorXd& x) { return x(0) * x(0); }, lb, ub, x0, o);
  CHECK(r.x(0) >= 2);
  CHECK(r.x(0) == doctest::Approx(2).epsilon(1e-3));
  const auto inf = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(anneal([&](const Eigen::VectorXd&) { return inf; }, lb, ub, x0, o), NumericalError);
}

TEST_CASE("synthetic exponential target is recovered") {
  FitProblem p;
  const double b = 0.5, c = 1e-3;
  const auto s = fit_synthetic_exponential(b, c, p);
  CHECK(std::abs(s.b - b) <= 1e-2 * b);
  CHECK(std::abs(s.c - c) <= 1e-2 * c);
  CHECK(s.f <= 1e-10 * c * c * p.t_max);
}

TEST_CASE("objective basics") {
  const FitContext ctx = small_context();
  const FitProblem p = short_problem();
  Eigen::VectorXd eta = Eigen::VectorXd::Zero(3);
  const MFGrid g = mf_grid(eta, ctx, p);
  REQUIRE(g.ok);
  CHECK(g.K1.size() == 601);
  CHECK(g.K1[0] == doctest::Approx(g.K1_0).epsilon(1e-14));
  const SMEKernel k = make_sme_kernel(45.9675, 46.4375, 21.6505, 106.1616, g.K1_0);
  std::vector<double> same(g.K1.size());
  for (std::size_t i = 0; i < same.size(); ++i) same[i] = eval_K1_sme(k, double(i) * p.grid_dt);
  CHECK(squared_difference(same, k, p.grid_dt) == 0);
  const double f = objective_f(eta, {1.0, 0.5, 0.2, 0.1}, ctx, p);
  CHECK(f >= 0);
  CHECK(std::isfinite(f));
  // 3 beta = mu violates the strict inequality
  CHECK(std::isinf(objective_f(eta, {1.0, 2.0, 0.0, 0.1}, ctx, p)));
  eta(0) = 301;
  CHECK(std::isinf(objective_f(eta, {1.0, 0.5, 0.2, 0.1}, ctx, p)));
}

TEST_CASE("fit is deterministic and self-consistent") {
  const FitContext ctx = small_context();
  const FitProblem p = short_problem();
  const FitResult a = fit_kernel(ctx, p);
  const FitResult b = fit_kernel(ctx, p);
  CHECK(a.f == b.f);
  CHECK(a.evals == b.evals);
  CHECK((a.eta - b.eta).cwiseAbs().maxCoeff() == 0);
  CHECK(a.X == b.X);
  CHECK(format_fit(a, p) == format_fit(b, p));
  CHECK(a.f <= a.f_initial);
  CHECK(validate_constraints(a.kernel).all_satisfied());
  const double again = objective_f(a.eta, a.X, ctx, p);
  CHECK(std::abs(again - a.f) <= 1e-12 * a.f);
  for (double x : a.X) CHECK((x >= 0 && x <= p.x_bound));
  for (Eigen::Index j = 0; j < a.eta.size(); ++j) CHECK(std::abs(a.eta(j)) <= p.eta_bound);

  FitProblem other = p;
  other.schedule.seed = 99;
  CHECK(fit_kernel(ctx, other).evals > 0);
}

TEST_CASE("problem validation") {
  FitProblem p;
  CHECK_NOTHROW(validate(p));
  p.grid_dt = 0.07;
  CHECK_THROWS_AS(validate(p), NumericalError);
  p = {};
  p.x0[2] = 250;
  CHECK_THROWS_AS(validate(p), NumericalError);
}

}
