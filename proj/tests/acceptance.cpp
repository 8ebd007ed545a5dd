// Acceptance checks. Usage: acceptance [N ...]; runs the listed criteria (all
// when none given), prints one PASS/FAIL line each and exits nonzero if any
// failed.

#include "laplace_oracle.hpp"
#include "oracles.hpp"
#include "w_oracle.hpp"

#include "nzfit/commands.hpp"
#include "nzfit/io.hpp"

#include <boost/math/special_functions/bessel.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>

using namespace nzfit;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

class Checker {
 public:
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass_ = false;
      if (!failures_.empty()) failures_ += "; ";
      failures_ += what;
    }
  }
  void note(const std::string& s) {
    if (!notes_.empty()) notes_ += "; ";
    notes_ += s;
  }
  Outcome outcome() const {
    std::string d = notes_;
    if (!pass_) d = "failed: " + failures_ + (notes_.empty() ? "" : " | " + notes_);
    return {pass_, d};
  }

 private:
  bool pass_ = true;
  std::string failures_, notes_;
};

std::string num(double x) {
  char b[64];
  std::snprintf(b, sizeof b, "%.4g", x);
  return b;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

SMEKernel reference_kernel() { return make_sme_kernel(45.9675, 46.4375, 21.6505, 106.1616, 1.1665e-3); }
constexpr double kRefCalBbar = 9.3276e-2;
constexpr double kRefCalB2 = 9.8692e-3;

bool rel_close(double a, double ref, double tol) { return std::abs(a - ref) <= tol * std::abs(ref); }

Outcome criterion1() {
  Checker c;
  const auto t0 = std::chrono::steady_clock::now();
  const SMEKernel k = reference_kernel();
  const ConstraintReport rep = validate_constraints(k);
  const double gap = k.lambda * k.lambda / 4 - k.V0;
  c.require(rel_close(k.V0, 4.5775e-2, 1e-3), "V(0) = " + num(k.V0));
  c.require(rel_close(k.lambda, -0.4700, 1e-3), "lambda = " + num(k.lambda));
  c.require(rel_close(gap, 9.45e-3, 1e-3), "lambda^2/4 - V(0) = " + num(gap));
  c.require(rep.all_satisfied(), "validator reports a failing constraint");
  const double secs = seconds_since(t0);
  c.require(secs < 1, "runtime " + num(secs) + " s");
  c.note("V(0) " + num(k.V0) + ", lambda " + num(k.lambda) + ", gap " + num(gap) + ", all constraints satisfied");
  return c.outcome();
}

Outcome criterion2() {
  Checker c;
  const auto t0 = std::chrono::steady_clock::now();
  MeanFieldKernel mf;
  mf.calB2 = kRefCalB2;
  mf.calBbar = kRefCalBbar;
  // W(., ., 0) = 1 for any channel, so K1(0) is the moment difference
  for (auto& ch : mf.channels.ch) ch = {1, 0, 1, 1.4, 1.5};
  const double K1_0 = eval_K1_mf(mf, 0);
  c.require(std::abs(K1_0 - 1.169e-3) < 0.5e-6, "calB2 - calBbar^2 = " + num(K1_0) + ", expected 1.169e-3");
  c.require(rel_close(K1_0, 1.1665e-3, 5e-3), "K1(0) " + num(K1_0) + " vs 1.1665e-3");
  c.require(seconds_since(t0) < 1, "runtime");
  c.note("K1(0) = " + num(K1_0) + ", " + num(100 * std::abs(K1_0 / 1.1665e-3 - 1)) + "% from the fitted value");
  return c.outcome();
}

Outcome criterion3() {
  Checker c;
  const auto t0 = std::chrono::steady_clock::now();
  using oracle::mp_complex;
  const SMEKernel k = reference_kernel();
  const mp_complex b(k.beta_s), a(k.alpha_s), mu(k.mu), nu(k.nu), g(k.gamma);
  auto cubic = [&](const mp_complex& z) { return ((z + mu) * z + nu) * z + g; };
  auto K1 = [&](const mp_complex& z) { return mp_complex(k.K1_0) * z * (z + b) / cubic(z); };
  auto K0 = [&](const mp_complex& z) { return mp_complex(k.K0_0) * z * (z + a) / cubic(z); };
  double worst1 = 0, worst0 = 0;
  // t = 0 from the initial-value theorem
  worst1 = std::abs(eval_K1_sme(k, 0) - k.K1_0) / k.K1_0;
  worst0 = std::abs(eval_K0_sme(k, 0) - k.K0_0) / std::abs(k.K0_0);
  for (int i = 1; i <= 120; ++i) {
    const double t = 0.25 * i;
    const double r1 = oracle::euler_inversion(K1, t), r0 = oracle::euler_inversion(K0, t);
    worst1 = std::max(worst1, std::abs(eval_K1_sme(k, t) - r1) / std::max(std::abs(r1), 1e-6 * k.K1_0));
    worst0 = std::max(worst0, std::abs(eval_K0_sme(k, t) - r0) / std::max(std::abs(r0), 1e-6 * std::abs(k.K0_0)));
  }
  const double secs = seconds_since(t0);
  c.require(worst1 <= 1e-8, "K1 relative error " + num(worst1));
  c.require(worst0 <= 1e-8, "K0 relative error " + num(worst0));
  c.require(secs < 10, "runtime " + num(secs) + " s");
  c.note("max relative error K1 " + num(worst1) + ", K0 " + num(worst0) + " on 121 points, " + num(secs) + " s");
  return c.outcome();
}

Outcome criterion4() {
  Checker c;
  const auto t0 = std::chrono::steady_clock::now();
  double w0 = 0;
  for (double a = 0; a <= 3.0001; a += 0.25)
    for (double b = 0.25; b <= 3.0001; b += 0.25) w0 = std::max(w0, std::abs(eval_W(a, b, 0) - 1));
  double bessel = 0;
  for (double b = 0.25; b <= 3.0001; b += 0.25)
    for (double t = 0.5; t <= 30; t += 0.5) {
      const double x = b * t;
      bessel = std::max(bessel, std::abs(eval_W(0, b, t) - 2 / x * boost::math::cyl_bessel_j(1, x)));
    }
  double series = 0;
  for (double a : {0.5, 1.0, 1.5, 2.0})
    for (double b : {0.5, 1.0, 1.5, 2.0})
      for (double t = 0; t <= 30; t += 2.5) {
        const double ref = oracle::W_series_mp(a, b, t);
        series = std::max(series, std::abs(eval_W(a, b, t) - ref) / std::abs(ref));
      }
  const double secs = seconds_since(t0);
  c.require(w0 <= 1e-10, "W(a,b,0) off by " + num(w0));
  c.require(bessel <= 1e-10, "alpha = 0 closed form off by " + num(bessel));
  c.require(series <= 1e-8, "series oracle relative error " + num(series));
  c.require(secs < 30, "runtime " + num(secs) + " s");
  c.note("W(0) " + num(w0) + ", J1 form " + num(bessel) + ", 50-digit series " + num(series) + ", " + num(secs) + " s");
  return c.outcome();
}

Outcome criterion5() {
  Checker c;
  const auto t0 = std::chrono::steady_clock::now();
  SystemParams p;
  const auto dc = double_commutator_means<double>(MatXc(build_system_hamiltonian(p)), MatXc(build_spin1_ops().Sx));
  const double hh = std::pow(p.D + p.E, 2) / 3 + 4 * p.h_x * p.h_x / 3 + std::pow(p.D - 3 * p.E, 2) / 9;
  const double closed = std::max({std::abs(dc.SS - 4.0 / 3), std::abs(dc.SH - 4 * p.h_x / 3),
                                  std::abs(dc.HS - 4 * p.h_x / 3), std::abs(dc.HH - hh)});
  double brute = 0;
  for (int i = 0; i < 20; ++i) {
    const int n = 2 + i % 5;
    const MatXc X = oracle::random_hermitian(n, 1000 + 2 * i), Y = oracle::random_hermitian(n, 1001 + 2 * i);
    brute = std::max(brute, std::abs(double_commutator_mean<double>(X, Y) - oracle::brute_force_dc_mean(X, Y)));
  }
  const double secs = seconds_since(t0);
  c.require(closed <= 1e-12, "closed forms off by " + num(closed));
  c.require(brute <= 1e-10, "operator-basis oracle off by " + num(brute));
  c.require(secs < 5, "runtime");
  c.note("closed forms " + num(closed) + ", 20 random pairs " + num(brute));
  return c.outcome();
}

Outcome criterion6() {
  Checker c;
  const auto t0 = std::chrono::steady_clock::now();
  SystemParams p;
  p.n_spins = 4;
  const auto ops = build_bath_operators(compute_couplings(sample_lattice(p.lattice_radius, 4, 1)), p);
  const auto tb = truncate_bath(ops.H_B, ops.B, 16);
  c.require(tb.n_B == 16, "truncation kept " + std::to_string(tb.n_B) + " levels");
  const MatXc H = ops.H_B.dense(), B = ops.B.dense();
  const double nB = Eigen::SelfAdjointEigenSolver<MatXc>(B).eigenvalues().cwiseAbs().maxCoeff();
  const double nH = Eigen::SelfAdjointEigenSolver<MatXc>(H).eigenvalues().cwiseAbs().maxCoeff();
  double worst = 0;
  for (const auto& [kBT, eta] : std::vector<std::pair<double, Eigen::VectorXd>>{
           {p.kBT, Eigen::VectorXd()}, {1e-3, (Eigen::VectorXd(3) << 250, -4e4, 2e6).finished()}}) {
    const auto w = thermal_state(tb, kBT);
    const auto m = bath_moments(tb, w, build_lambda(tb, w, eta));
    const auto r = oracle::product_basis_moments(H, B, kBT, eta);
    // each entry against its natural magnitude (operator norms, Lambda of order one)
    const double L = 1 + eta.cwiseAbs().sum();
    const std::vector<std::tuple<double, double, double>> rows = {
        {m.Bbar, r.Bbar, nB}, {m.B2bar, r.B2bar, nB * nB}, {m.B3bar, r.B3bar, nB * nB * nB},
        {m.calBbar, r.calBbar, L * nB}, {m.calB2, r.calB2, L * nB * nB}, {m.calB3, r.calB3, L * std::pow(nB, 3)},
        {m.calB4, r.calB4, L * std::pow(nB, 4)}, {m.TrB[0], r.TrB[0], 16}, {m.TrB[1], r.TrB[1], 16 * nB},
        {m.TrB[2], r.TrB[2], 16 * nB * nB}, {m.TrB[3], r.TrB[3], 16 * std::pow(nB, 3)},
        {m.LambdaBar, r.LambdaBar, L}, {m.TrLambda2, r.TrLambda2, L * L}, {m.TrBLambda2, r.TrBLambda2, L * L * nB},
        {m.Kubo3[0], r.Kubo3[0], L * nB * nB * nH * nH}, {m.Kubo3[1], r.Kubo3[1], L * nB * nB * nH * nH},
        {m.Kubo3[2], r.Kubo3[2], L * nB * nB * nH * nH}};
    for (const auto& [got, ref, scale] : rows) worst = std::max(worst, std::abs(got - ref) / std::max(std::abs(ref), scale));
  }
  const double secs = seconds_since(t0);
  c.require(worst <= 1e-10, "largest scaled moment difference " + num(worst));
  c.require(secs < 10, "runtime");
  c.note("17 moments at two temperatures, largest scaled difference " + num(worst));
  return c.outcome();
}

Outcome criterion7() {
  Checker c;
  const auto t0 = std::chrono::steady_clock::now();
  SystemParams p;
  p.A_XX = p.A_XY = p.A_XZ = 0;
  p.n_spins = 6;
  const auto ops = build_bath_operators(compute_couplings(sample_lattice(p.lattice_radius, 6, 1)), p);
  const auto tb = truncate_bath(ops.H_B, ops.B, 20);
  const auto w = thermal_state(tb, p.kBT);
  const auto m = bath_moments(tb, w, w);
  const double K1_0 = m.calB2 - m.calBbar * m.calBbar;
  c.require(K1_0 == 0 && m.calBbar == 0, "uncoupled bath has nonzero moments");
  const SMEKernel k = make_sme_kernel(45.9675, 46.4375, 21.6505, 106.1616, K1_0);
  const Mat3 H = build_system_hamiltonian(p);
  const Mat3 S = build_spin1_ops().Sx;
  const Vec3c psi = default_initial_state();
  const Mat3 rho0 = pure_state(psi);
  std::vector<double> tg;
  for (int i = 0; i <= 1000; ++i) tg.push_back(0.1 * i);
  Dop853Options tight;
  tight.rtol = 1e-13;
  tight.atol = 1e-15;
  const auto sme = integrate_sme(H, S, m.calBbar, k, rho0, tg, tight);
  const auto ex = exact_propagate(tb, H, S, psi, p.kBT, tg);
  Eigen::SelfAdjointEigenSolver<Mat3> es(H);
  double ws = 0, we = 0;
  for (std::size_t i = 0; i < tg.size(); ++i) {
    Vec3c ph;
    for (int j = 0; j < 3; ++j) ph(j) = std::polar(1.0, -es.eigenvalues()(j) * tg[i]);
    const Mat3 U = es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
    const Mat3 ref = U * rho0 * U.adjoint();
    ws = std::max(ws, (sme.rho[i] - ref).cwiseAbs().maxCoeff());
    we = std::max(we, (ex.rho[i] - ref).cwiseAbs().maxCoeff());
  }
  const double secs = seconds_since(t0);
  c.require(ws <= 1e-10, "master equation deviates by " + num(ws));
  c.require(we <= 1e-10, "exact propagator deviates by " + num(we));
  c.require(secs < 30, "runtime");
  c.note("max deviation from unitary evolution over [0,100] ns: master equation " + num(ws) + ", exact " + num(we));
  return c.outcome();
}

Outcome criterion8() {
  Checker c;
  const auto t0 = std::chrono::steady_clock::now();
  SystemParams p;
  const Mat3 H = build_system_hamiltonian(p);
  const Mat3 S = build_spin1_ops().Sx;
  const Mat3 rho0 = pure_state(default_initial_state());
  const SMEKernel k = reference_kernel();
  const double kap = kappa(k);
  const Mat3 eq = equilibrium_state(H, S, kRefCalBbar, kap, rho0);
  const ShiftedBasis b = shifted_eigenbasis(H, S, kRefCalBbar);
  const double proj = (project_diagonal(b, eq) - eq).cwiseAbs().maxCoeff();
  Mat3 e = b.U.adjoint() * rho0 * b.U;
  e(0, 1) += cplx(0.04, 0.01);
  e(1, 0) = std::conj(e(0, 1));
  e(0, 2) -= 0.03;
  e(2, 0) = std::conj(e(0, 2));
  const Mat3 eq2 = equilibrium_state(H, S, kRefCalBbar, kap, b.U * e * b.U.adjoint());
  const double invariance = (eq2 - eq).cwiseAbs().maxCoeff();

  SMEDiagnostics dg;
  const auto tr = integrate_sme(H, S, kRefCalBbar, k, rho0, {0.0, 1e4, 1e5}, {}, &dg);
  const double diff = (tr.rho.back() - eq).cwiseAbs().maxCoeff();
  const Mat3 se = b.U.adjoint() * tr.rho.back() * b.U, ee = b.U.adjoint() * eq * b.U;
  double pop = 0, coh = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) (i == j ? pop : coh) = std::max(i == j ? pop : coh, std::abs(se(i, j) - ee(i, j)));
  const double secs = seconds_since(t0);
  c.require(proj <= 1e-12, "P0 rho(inf) differs from rho(inf) by " + num(proj));
  c.require(invariance <= 1e-12, "off-diagonal perturbation moves rho(inf) by " + num(invariance));
  c.require(diff <= 2e-2, "rho(1e5 ns) differs from rho(inf) by " + num(diff) + " (eigenbasis: populations " + num(pop) +
                              ", coherences " + num(coh) + ")");
  c.require(secs < 900, "runtime " + num(secs) + " s");
  c.note("kappa " + num(kap) + ", " + std::to_string(dg.stats.accepted) + " steps, " + num(secs) + " s");
  return c.outcome();
}

// Full-size pipeline through the command layer.
Outcome criterion9() {
  Checker c;
  const fs::path dir = fs::absolute("acceptance_run9");
  fs::remove_all(dir);
  const std::string text =
      "[model]\nh_x = 0.194\nD = 2.88\nE = 0.1\nA_XX = 0.2\nA_XY = 0.02\nA_XZ = 0.02\nh_x0 = 1.08e-3\n"
      "beta_dd = 4.52e-5\nkBT = 3e-4\nn_spins = 18\nlattice_radius = 5\nzfs_axis = z\n"
      "[bath]\nn_B = 20\n"
      "[fit]\nn_p = 10\neta_bound = 300\nx_bound = 200\nt_max = 30\ngrid_dt = 0.05\n"
      "[sim]\nt_end = 100000\noutput_dt = 1\n"
      "[io]\nout_dir = " + dir.string() + "\nseed = 1\n";
  RunContext ctx;
  ctx.config = parse_config(text);
  validate(ctx.config);
  ctx.config_hash = sha256_hex(text);
  std::ostringstream log;
  ctx.log = &log;
  const auto t0 = std::chrono::steady_clock::now();
  c.require(cmd_build_model(ctx) == kOk, "build-model failed");
  const int fit_rc = cmd_fit(ctx);
  c.require(fit_rc == kOk, "fitted kernel fails a constraint");
  if (fit_rc != kOk) return c.outcome();
  c.require(cmd_simulate(ctx, Which::both) == kOk, "simulate failed");
  const double secs = seconds_since(t0);
  std::cout << log.str();

  const auto fit = parse_key_values(read_file((dir / "fit.txt").string()));
  const double f_rel = std::stod(fit.at("f_relative"));
  const double K1_0 = std::stod(fit.at("K1_0"));
  // (a) fit quality and decay of the mean-field kernel by 20 ns
  double tail = 0;
  {
    std::istringstream is(read_file((dir / "kernels.csv").string()));
    std::string line;
    std::getline(is, line);
    while (std::getline(is, line)) {
      double t, k1;
      if (std::sscanf(line.c_str(), "%lf,%lf", &t, &k1) == 2 && t >= 20) tail = std::max(tail, std::abs(k1));
    }
  }
  c.require(f_rel <= 1e-2, "(a) f*/int K1_MF^2 = " + num(f_rel));
  c.require(tail <= 0.05 * K1_0, "(a) |K1_MF| on [20,30] reaches " + num(tail / K1_0) + " K1(0)");

  const auto ex = parse_observables_csv(read_file((dir / "observables_exact.csv").string()));
  const auto sm = parse_observables_csv(read_file((dir / "observables_sme.csv").string()));
  const ComparisonReport rep = compare(ex, sm);
  // (b) long-time purity
  const double pe = rep.at("purity").long_mean_a, ps = rep.at("purity").long_mean_b;
  c.require(std::abs(pe - 0.8) <= 0.1, "(b) exact long-time purity " + num(pe));
  c.require(ps <= pe - 0.05, "(b) master-equation purity " + num(ps) + " not below exact " + num(pe));
  // (c) highest level
  const double r33 = rep.at("rho33").long_rel;
  c.require(r33 <= 0.10, "(c) rho33 long-time relative error " + num(r33));
  // (d) middle level
  double drift_e = 0, drift_s = 0;
  for (std::size_t i = 0; i < ex.size(); ++i) {
    drift_e = std::max(drift_e, std::abs(ex.rho_diag[i][1] - ex.rho_diag[0][1]));
    drift_s = std::max(drift_s, std::abs(sm.rho_diag[i][1] - sm.rho_diag[0][1]));
  }
  c.require(drift_e < 1e-6 && drift_s < 1e-6, "(d) rho22 drift exact " + num(drift_e) + ", sme " + num(drift_s));
  // (e) eigenvalue diagnostic
  double min_eig = 0;
  for (double v : sm.min_eig) min_eig = std::min(min_eig, v);
  c.require(min_eig >= -1e-6, "(e) minimum eigenvalue " + num(min_eig));
  c.require(sm.min_eig.back() >= -1e-10, "(e) final minimum eigenvalue " + num(sm.min_eig.back()));
  c.require(secs < 7200, "runtime " + num(secs) + " s");
  c.note("f_rel " + num(f_rel) + ", K1 tail " + num(tail / K1_0) + ", purity exact " + num(pe) + " sme " + num(ps) +
         ", rho33 err " + num(r33) + ", rho22 drift " + num(std::max(drift_e, drift_s)) + ", min eig " + num(min_eig) +
         ", " + num(secs) + " s");
  return c.outcome();
}

Outcome criterion10() {
  Checker c;
  auto run = [&](const std::string& name, int seed) {
    const fs::path dir = fs::absolute(name);
    fs::remove_all(dir);
    const std::string text = "[model]\nn_spins = 6\n[bath]\nn_B = 10\n"
                             "[fit]\nn_p = 4\nns = 4\nnt = 2\nmax_temperatures = 4\n"
                             "[sim]\nt_end = 50\noutput_dt = 0.5\n"
                             "[io]\nout_dir = " + dir.string() + "\nseed = " + std::to_string(seed) + "\n";
    RunContext ctx;
    ctx.config = parse_config(text);
    ctx.config_hash = sha256_hex(text);
    std::ostringstream log;
    ctx.log = &log;
    c.require(cmd_build_model(ctx) == kOk, name + " build-model");
    c.require(cmd_fit(ctx) == kOk, name + " fit");
    c.require(cmd_simulate(ctx, Which::both) == kOk, name + " simulate");
    c.require(cmd_equilibrium(ctx) == kOk, name + " equilibrium");
    return dir;
  };
  const fs::path a = run("acceptance_run10a", 5), b = run("acceptance_run10b", 5), other = run("acceptance_run10c", 6);
  int compared = 0;
  for (const auto& entry : fs::directory_iterator(a)) {
    const std::string name = entry.path().filename().string();
    const std::string ext = entry.path().extension().string();
    if (ext != ".csv" && ext != ".txt") continue;
    // manifests embed the out_dir-specific config hash
    if (name == "manifest.txt") continue;
    ++compared;
    c.require(fs::exists(b / name) && read_file(entry.path().string()) == read_file((b / name).string()),
              name + " differs between identical runs");
  }
  c.require(compared >= 12, "only " + std::to_string(compared) + " artifacts compared");
  c.require(read_file((a / "positions.csv").string()) != read_file((other / "positions.csv").string()),
            "a different seed gave the same lattice");
  c.note(std::to_string(compared) + " artifacts byte-identical across two runs");
  return c.outcome();
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::function<Outcome()>> all = {criterion1, criterion2, criterion3, criterion4, criterion5,
                                                     criterion6, criterion7, criterion8, criterion9, criterion10};
  std::vector<int> which;
  for (int i = 1; i < argc; ++i) which.push_back(std::atoi(argv[i]));
  if (which.empty())
    for (int i = 1; i <= 10; ++i) which.push_back(i);
  bool ok = true;
  for (int n : which) {
    if (n < 1 || n > 10) {
      std::cerr << "no criterion " << n << "\n";
      return 2;
    }
    Outcome o;
    try {
      o = all[n - 1]();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::cout << "criterion " << n << ": " << (o.pass ? "PASS" : "FAIL") << " - " << o.detail << std::endl;
    ok = ok && o.pass;
  }
  return ok ? 0 : 1;
}
