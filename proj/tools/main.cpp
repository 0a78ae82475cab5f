#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "spherimax/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"spherical maximizer toolkit: level curves, multiplier maps, "
               "verification reports, and multiplicity certificates"};
  app.require_subcommand(1);

  struct SubArgs {
    std::string config;
    std::uint64_t seed = 0;
    std::string out;
    CLI::App* sub = nullptr;
    CLI::Option* seed_opt = nullptr;
    CLI::Option* out_opt = nullptr;
  };

  SubArgs args[4];
  const char* names[4] = {"eta", "verify", "phi", "multiplicity"};
  const char* blurbs[4] = {
      "tabulate the level curve eta(r) and write eta_curve.csv + eta_plot.svg",
      "run the maximizer-chain and monotonicity checks and write report.json",
      "build the multiplier map phi(lambda) and write phi_map.csv + phi_plot.svg",
      "search for a multiplicity certificate at psi level rho_tilde and write "
      "multiplicity.json"};
  for (int i = 0; i < 4; ++i) {
    args[i].sub = app.add_subcommand(names[i], blurbs[i]);
    args[i].sub->add_option("--config", args[i].config, "problem config file")
        ->required();
    args[i].seed_opt =
        args[i].sub->add_option("--seed", args[i].seed, "override the config seed");
    args[i].out_opt =
        args[i].sub->add_option("--out", args[i].out, "override the output directory");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? spherimax::kExitSuccess : spherimax::kExitError;
  }

  int which = -1;
  for (int i = 0; i < 4; ++i) {
    if (args[i].sub->parsed()) which = i;
  }
  if (which < 0) {
    std::cerr << "error: no subcommand given\n";
    return spherimax::kExitError;
  }

  spherimax::RunConfig cfg;
  try {
    cfg = spherimax::load_config(args[which].config);
  } catch (const spherimax::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return spherimax::kExitError;
  }
  if (args[which].seed_opt->count() > 0) cfg.seed = args[which].seed;
  if (args[which].out_opt->count() > 0) cfg.output_dir = args[which].out;

  switch (which) {
    case 0: return spherimax::cmd_eta(cfg);
    case 1: return spherimax::cmd_verify(cfg);
    case 2: return spherimax::cmd_phi(cfg);
    default: return spherimax::cmd_multiplicity(cfg);
  }
}
