#include "nzfit/commands.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Synthetic master equation pipeline for a central spin in a nuclear spin bath"};
  app.require_subcommand(1);

  std::string config_path, out_dir, which = "both";
  std::uint64_t seed = 0;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "run configuration (INI)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory (overrides io.out_dir)");
    sub->add_option("--seed", seed, "run seed (overrides io.seed)");
  };
  auto* build = app.add_subcommand("build-model", "sample the lattice and truncate the bath");
  auto* fit = app.add_subcommand("fit", "fit the kernel model to the mean-field kernel");
  auto* sim = app.add_subcommand("simulate", "propagate the master equation and/or the exact reference");
  auto* cmp = app.add_subcommand("compare", "compare saved observables");
  auto* eq = app.add_subcommand("equilibrium", "long-time limit of the master equation");
  auto* val = app.add_subcommand("validate-kernel", "check the kernel constraints");
  for (auto* s : {build, fit, sim, cmp, eq, val}) common(s);
  sim->add_option("--which", which, "sme, exact or both")->check(CLI::IsMember({"sme", "exact", "both"}));

  CLI11_PARSE(app, argc, argv);

  try {
    nzfit::RunContext ctx;
    const std::string text = nzfit::read_file(config_path);
    ctx.config = nzfit::parse_config(text);
    ctx.config_hash = nzfit::sha256_hex(text);
    for (auto* s : {build, fit, sim, cmp, eq, val})
      if (s->parsed()) {
        if (s->count("--seed")) ctx.config.apply_seed(seed);
        if (s->count("--out")) ctx.config.out_dir = out_dir;
      }
    if (build->parsed()) return nzfit::cmd_build_model(ctx);
    if (fit->parsed()) return nzfit::cmd_fit(ctx);
    if (sim->parsed()) return nzfit::cmd_simulate(ctx, nzfit::parse_which(which));
    if (cmp->parsed()) return nzfit::cmd_compare(ctx);
    if (eq->parsed()) return nzfit::cmd_equilibrium(ctx);
    if (val->parsed()) return nzfit::cmd_validate_kernel(ctx);
  } catch (const nzfit::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return nzfit::kValidationFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return nzfit::kError;
  }
  return nzfit::kError;
}
