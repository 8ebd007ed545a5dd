#pragma once

#include "nzfit/bath_thermo.hpp"
#include "nzfit/dynamics.hpp"
#include "nzfit/kernel_fit.hpp"
#include "nzfit/observables.hpp"
#include "nzfit/sme_kernel.hpp"
#include "nzfit/spin_model.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace nzfit {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SimConfig {
  double t_end = 1000;    // ns
  double output_dt = 1;   // ns
  double rtol = 1e-10;
  double atol = 1e-12;
};

// Kernel used by simulate, equilibrium and validate-kernel: either the fit
// artifact or explicit values.
struct KernelConfig {
  std::string source = "fit";  // fit | explicit
  double beta = 0, mu = 0, nu = 0, gamma = 0, K1_0 = 0;
  double calBbar = 0;
  double K0_sign = 1;
};

struct RunConfig {
  SystemParams model;
  int n_B = 20;
  TruncateOptions truncate;
  FitProblem fit;
  std::string fit_mode = "kernel";  // kernel | synthetic
  double synthetic_b = 0.5;
  double synthetic_c = 1e-3;
  SimConfig sim;
  KernelConfig kernel;
  std::string out_dir = "run";
  std::uint64_t seed = 1;

  // Propagates the run seed into the model and the annealer.
  void apply_seed(std::uint64_t s);
};

// INI text with sections model, bath, fit, sim, kernel, io. Unknown sections
// or keys and unparsable values throw ConfigError naming the key.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
void validate(const RunConfig& c);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

std::string sha256_hex(const std::string& bytes);

// %.17g, which round-trips every double.
std::string fmt_double(double x);

std::string positions_csv(const std::vector<Site>& pos);
std::string couplings_csv(const BathGeometry& g);
std::string bath_matrix_csv(const TruncatedBath& tb);
std::string trajectory_csv(const Trajectory& tr);
std::string observables_csv(const ObservableSeries& o);
ObservableSeries parse_observables_csv(const std::string& text);
// t, K1_mf, K1_sme, K0_mf, K0_sme on the fit grid
std::string kernel_table_csv(const MeanFieldKernel& mf, const SMEKernel& k, double t_max, double dt);

// Parses the CSV written by bath_matrix_csv together with the eigenvalues.
TruncatedBath parse_truncated_bath(const std::string& evals_csv, const std::string& matrix_csv);
std::string bath_evals_csv(const TruncatedBath& tb);

// key = value lines; '[' lines and blanks skipped.
std::map<std::string, std::string> parse_key_values(const std::string& text);

struct LoadedKernel {
  SMEKernel kernel;
  double calBbar = 0;
};
LoadedKernel kernel_from_fit_text(const std::string& fit_txt);
LoadedKernel kernel_from_config(const KernelConfig& k);

// Adds or replaces artifact hashes in <dir>/manifest.txt, keeping entries
// sorted so the file is deterministic.
void update_manifest(const std::string& dir, const std::string& config_hash, std::uint64_t seed,
                     const std::vector<std::string>& files);

}  // namespace nzfit
