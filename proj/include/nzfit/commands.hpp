#pragma once

#include "nzfit/io.hpp"

#include <iosfwd>
#include <string>

namespace nzfit {

// Exit codes shared by the CLI.
enum ExitCode : int { kOk = 0, kValidationFailure = 1, kError = 2 };

enum class Which { sme, exact, both };
Which parse_which(const std::string& s);

// Everything a command needs: the parsed config plus the hash of its text.
struct RunContext {
  RunConfig config;
  std::string config_hash;
  std::ostream* log = nullptr;
};

std::vector<double> time_grid(double t_end, double dt);

// Canonical text of the model-defining settings; artifacts carry it so later
// commands can refuse a mismatched config.
std::string model_signature(const RunConfig& c);

int cmd_build_model(const RunContext& ctx);
int cmd_fit(const RunContext& ctx);
int cmd_simulate(const RunContext& ctx, Which which);
int cmd_compare(const RunContext& ctx);
int cmd_equilibrium(const RunContext& ctx);
int cmd_validate_kernel(const RunContext& ctx);

}  // namespace nzfit
