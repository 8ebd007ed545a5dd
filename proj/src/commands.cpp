#include "nzfit/commands.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <sstream>

namespace nzfit {

namespace fs = std::filesystem;

namespace {

std::ostream& out(const RunContext& ctx) { return ctx.log ? *ctx.log : std::cout; }

std::string path_in(const RunConfig& c, const std::string& name) {
  return (fs::path(c.out_dir) / name).string();
}

void ensure_dir(const RunConfig& c) {
  std::error_code ec;
  fs::create_directories(c.out_dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + c.out_dir + ": " + ec.message());
}

void put(std::ostringstream& os, const std::string& k, double v) { os << k << " = " << fmt_double(v) << '\n'; }

Mat3 system_hamiltonian(const RunConfig& c) { return build_system_hamiltonian(c.model); }
Mat3 coupling_operator() { return build_spin1_ops().Sx; }

void check_model_artifact(const RunConfig& c) {
  const std::string p = path_in(c, "model.txt");
  if (!fs::exists(p)) throw std::runtime_error("no model artifact in " + c.out_dir + "; run build-model first");
  const std::string text = read_file(p);
  const std::string sig = model_signature(c);
  if (text.compare(0, sig.size(), sig) != 0)
    throw std::runtime_error("model artifact in " + c.out_dir + " was built from different model settings");
}

TruncatedBath load_bath(const RunConfig& c) {
  check_model_artifact(c);
  return parse_truncated_bath(read_file(path_in(c, "bath_evals.csv")), read_file(path_in(c, "bath_B.csv")));
}

LoadedKernel load_kernel(const RunConfig& c) {
  if (c.kernel.source == "explicit") return kernel_from_config(c.kernel);
  const std::string p = path_in(c, "fit.txt");
  if (!fs::exists(p)) throw std::runtime_error("no fit artifact in " + c.out_dir + "; run fit first or set kernel.source = explicit");
  return kernel_from_fit_text(read_file(p));
}

}  // namespace

Which parse_which(const std::string& s) {
  if (s == "sme") return Which::sme;
  if (s == "exact") return Which::exact;
  if (s == "both") return Which::both;
  throw ConfigError("--which must be sme, exact or both");
}

std::vector<double> time_grid(double t_end, double dt) {
  if (!(dt > 0) || !(t_end >= 0)) throw ConfigError("time grid needs t_end >= 0 and dt > 0");
  const long n = long(std::floor(t_end / dt + 1e-9));
  std::vector<double> t(std::size_t(n) + 1);
  for (long i = 0; i <= n; ++i) t[std::size_t(i)] = double(i) * dt;
  return t;
}

std::string model_signature(const RunConfig& c) {
  const SystemParams& p = c.model;
  std::ostringstream os;
  os << "[model]\n";
  put(os, "h_x", p.h_x);
  put(os, "D", p.D);
  put(os, "E", p.E);
  put(os, "A_XX", p.A_XX);
  put(os, "A_XY", p.A_XY);
  put(os, "A_XZ", p.A_XZ);
  put(os, "h_x0", p.h_x0);
  put(os, "beta_dd", p.beta_dd);
  put(os, "kBT", p.kBT);
  os << "n_spins = " << p.n_spins << "\nlattice_radius = " << p.lattice_radius << "\nzfs_axis = "
     << (p.zfs_axis == ZfsAxis::z ? "z" : "x") << "\nseed = " << p.seed << "\nn_B = " << c.n_B << '\n';
  return os.str();
}

int cmd_build_model(const RunContext& ctx) {
  const RunConfig& c = ctx.config;
  ensure_dir(c);
  const auto t0 = std::chrono::steady_clock::now();
  const auto pos = sample_lattice(c.model.lattice_radius, c.model.n_spins, c.model.seed);
  const BathGeometry g = compute_couplings(pos);
  const BathOperators ops = build_bath_operators(g, c.model);
  const TruncatedBath tb = truncate_bath(ops.H_B, ops.B, c.n_B, c.truncate);
  const Eigen::VectorXd p = thermal_state(tb, c.model.kBT);
  const BathMoments m = bath_moments(tb, p, p);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  std::ostringstream model;
  model << model_signature(c) << "[bath]\n" << format_bath_report(tb, p, m);
  write_file(path_in(c, "model.txt"), model.str());
  write_file(path_in(c, "positions.csv"), positions_csv(pos));
  write_file(path_in(c, "couplings.csv"), couplings_csv(g));
  write_file(path_in(c, "bath_evals.csv"), bath_evals_csv(tb));
  write_file(path_in(c, "bath_B.csv"), bath_matrix_csv(tb));
  std::ostringstream th;
  th << "i,p\n";
  for (int i = 0; i < tb.n_B; ++i) th << i << ',' << fmt_double(p(i)) << '\n';
  write_file(path_in(c, "thermal.csv"), th.str());
  update_manifest(c.out_dir, ctx.config_hash, c.seed,
                  {"model.txt", "positions.csv", "couplings.csv", "bath_evals.csv", "bath_B.csv", "thermal.csv"});
  out(ctx) << "build-model: " << pos.size() << " spins, " << tb.n_B << " bath levels";
  if (tb.n_B != tb.requested_n_B) out(ctx) << " (requested " << tb.requested_n_B << ", cutoff multiplet kept whole)";
  out(ctx) << ", " << std::fixed << secs << std::defaultfloat << " s\n";
  return kOk;
}

int cmd_fit(const RunContext& ctx) {
  const RunConfig& c = ctx.config;
  ensure_dir(c);
  if (c.fit_mode == "synthetic") {
    const SyntheticFit s = fit_synthetic_exponential(c.synthetic_b, c.synthetic_c, c.fit);
    std::ostringstream os;
    put(os, "b_true", c.synthetic_b);
    put(os, "c_true", c.synthetic_c);
    put(os, "b", s.b);
    put(os, "c", s.c);
    put(os, "f", s.f);
    os << "evaluations = " << s.evals << '\n';
    const double eb = std::abs(s.b - c.synthetic_b) / std::abs(c.synthetic_b);
    const double ec = std::abs(s.c - c.synthetic_c) / std::abs(c.synthetic_c);
    put(os, "rel_error_b", eb);
    put(os, "rel_error_c", ec);
    const bool ok = eb <= 1e-3 && ec <= 1e-3;
    os << "recovered = " << (ok ? 1 : 0) << '\n';
    write_file(path_in(c, "fit_synthetic.txt"), os.str());
    update_manifest(c.out_dir, ctx.config_hash, c.seed, {"fit_synthetic.txt"});
    out(ctx) << "fit (synthetic): b = " << s.b << " c = " << s.c << (ok ? " recovered\n" : " NOT recovered\n");
    return ok ? kOk : kValidationFailure;
  }

  FitContext fc;
  fc.tb = load_bath(c);
  fc.p = thermal_state(fc.tb, c.model.kBT);
  fc.dc = double_commutator_means<double>(MatXc(system_hamiltonian(c)), MatXc(coupling_operator()));
  const auto t0 = std::chrono::steady_clock::now();
  const FitResult r = fit_kernel(fc, c.fit);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  // scale of the target for judging f*
  const MFGrid g = mf_grid(r.eta, fc, c.fit);
  double k2 = 0;
  for (std::size_t i = 0; i < g.K1.size(); ++i)
    k2 += (i == 0 || i + 1 == g.K1.size() ? 0.5 : 1.0) * g.K1[i] * g.K1[i];
  k2 *= c.fit.grid_dt;

  std::string text = format_fit(r, c.fit);
  const auto cpos = text.find("[constraints]");
  std::ostringstream extra;
  put(extra, "K1_mf_square_integral", k2);
  put(extra, "f_relative", k2 > 0 ? r.f / k2 : 0);
  text.insert(cpos, extra.str());
  text += "[monotonicity]\n" + complete_monotonicity_check(r.kernel, c.fit.t_max).format();
  write_file(path_in(c, "fit.txt"), text);
  write_file(path_in(c, "kernels.csv"), kernel_table_csv(r.mf, r.kernel, c.fit.t_max, c.fit.grid_dt));
  update_manifest(c.out_dir, ctx.config_hash, c.seed, {"fit.txt", "kernels.csv"});

  const ConstraintReport rep = validate_constraints(r.kernel);
  out(ctx) << "fit: f* = " << r.f << " (" << (k2 > 0 ? r.f / k2 : 0) << " of the K1 square integral), "
           << r.evals << " evaluations, " << r.temperatures << " temperatures, " << std::fixed << secs
           << std::defaultfloat << " s\n"
           << rep.format();
  return rep.all_satisfied() ? kOk : kValidationFailure;
}

int cmd_simulate(const RunContext& ctx, Which which) {
  const RunConfig& c = ctx.config;
  ensure_dir(c);
  const Mat3 H = system_hamiltonian(c);
  const Mat3 S = coupling_operator();
  const Vec3c psi0 = default_initial_state();
  const std::vector<double> tg = time_grid(c.sim.t_end, c.sim.output_dt);
  std::vector<std::string> written;

  // the observables need calBbar for the shifted eigenbasis; an exact-only
  // run without a kernel falls back to the model's value at eta = 0
  LoadedKernel lk;
  if (which == Which::exact && c.kernel.source == "fit" && !fs::exists(path_in(c, "fit.txt"))) {
    check_model_artifact(c);
    const auto kv = parse_key_values(read_file(path_in(c, "model.txt")));
    lk.calBbar = std::stod(kv.at("calBbar"));
  } else {
    lk = load_kernel(c);
  }
  ObservableSeries obs_sme, obs_exact;

  if (which != Which::exact) {
    const ConstraintReport rep = validate_constraints(lk.kernel);
    if (const ConstraintEntry* f = rep.first_failure()) {
      out(ctx) << "simulate: refusing to run the master equation, constraint " << f->name << " fails: " << f->detail
               << '\n';
      return kValidationFailure;
    }
    Dop853Options o;
    o.rtol = c.sim.rtol;
    o.atol = c.sim.atol;
    SMEDiagnostics dg;
    const Trajectory tr = integrate_sme(H, S, lk.calBbar, lk.kernel, pure_state(psi0), tg, o, &dg);
    obs_sme = compute_observables(tr, H, S, lk.calBbar);
    write_file(path_in(c, "trajectory_sme.csv"), trajectory_csv(tr));
    write_file(path_in(c, "observables_sme.csv"), observables_csv(obs_sme));
    written.insert(written.end(), {"trajectory_sme.csv", "observables_sme.csv"});
    double min_eig = 0;
    for (double v : obs_sme.min_eig) min_eig = std::min(min_eig, v);
    out(ctx) << "simulate sme: " << dg.stats.accepted << " steps, " << dg.stats.rejected << " rejected, trace drift "
             << dg.max_trace_drift << ", min eigenvalue " << min_eig << '\n';
  }
  if (which != Which::sme) {
    const TruncatedBath tb = load_bath(c);
    const Trajectory tr = exact_propagate(tb, H, S, psi0, c.model.kBT, tg);
    obs_exact = compute_observables(tr, H, S, lk.calBbar);
    write_file(path_in(c, "trajectory_exact.csv"), trajectory_csv(tr));
    write_file(path_in(c, "observables_exact.csv"), observables_csv(obs_exact));
    written.insert(written.end(), {"trajectory_exact.csv", "observables_exact.csv"});
    out(ctx) << "simulate exact: " << tg.size() << " snapshots over " << tb.n_B << " bath levels\n";
  }
  if (which == Which::both) {
    const ComparisonReport rep = compare(obs_exact, obs_sme);
    write_file(path_in(c, "comparison.csv"), rep.format());
    written.push_back("comparison.csv");
    out(ctx) << "comparison (exact reference): long-time purity " << rep.at("purity").long_mean_a << " exact, "
             << rep.at("purity").long_mean_b << " sme; rho33 long-time relative error " << rep.at("rho33").long_rel
             << '\n';
  }
  update_manifest(c.out_dir, ctx.config_hash, c.seed, written);
  return kOk;
}

int cmd_compare(const RunContext& ctx) {
  const RunConfig& c = ctx.config;
  const ObservableSeries a = parse_observables_csv(read_file(path_in(c, "observables_exact.csv")));
  const ObservableSeries b = parse_observables_csv(read_file(path_in(c, "observables_sme.csv")));
  const ComparisonReport rep = compare(a, b);
  write_file(path_in(c, "comparison.csv"), rep.format());
  update_manifest(c.out_dir, ctx.config_hash, c.seed, {"comparison.csv"});
  out(ctx) << rep.format();
  return kOk;
}

int cmd_equilibrium(const RunContext& ctx) {
  const RunConfig& c = ctx.config;
  ensure_dir(c);
  const LoadedKernel lk = load_kernel(c);
  const Mat3 H = system_hamiltonian(c);
  const Mat3 S = coupling_operator();
  const Mat3 rho0 = pure_state(default_initial_state());
  const double kap = kappa(lk.kernel);
  const Mat3 r = equilibrium_state(H, S, lk.calBbar, kap, rho0);
  const ShiftedBasis b = shifted_eigenbasis(H, S, lk.calBbar);
  const double defect = (project_diagonal(b, r) - r).cwiseAbs().maxCoeff();
  std::ostringstream os;
  put(os, "kappa", kap);
  put(os, "calBbar", lk.calBbar);
  put(os, "projection_defect", defect);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const std::string ij = std::to_string(i + 1) + std::to_string(j + 1);
      put(os, "rho_re_" + ij, r(i, j).real());
      put(os, "rho_im_" + ij, r(i, j).imag());
    }
  const Mat3 e = b.U.adjoint() * r * b.U;
  for (int i = 0; i < 3; ++i) put(os, "population_" + std::to_string(i + 1), e(i, i).real());
  write_file(path_in(c, "equilibrium.txt"), os.str());
  update_manifest(c.out_dir, ctx.config_hash, c.seed, {"equilibrium.txt"});
  out(ctx) << os.str();
  return defect <= 1e-12 ? kOk : kValidationFailure;
}

int cmd_validate_kernel(const RunContext& ctx) {
  const RunConfig& c = ctx.config;
  const LoadedKernel lk = load_kernel(c);
  const ConstraintReport rep = validate_constraints(lk.kernel);
  const MonotonicityReport mono = complete_monotonicity_check(lk.kernel, c.fit.t_max);
  out(ctx) << "[constraints]\n" << rep.format() << "[monotonicity, informational]\n" << mono.format();
  return rep.all_satisfied() ? kOk : kValidationFailure;
}

}  // namespace nzfit
