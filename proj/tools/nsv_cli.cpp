#include <CLI11.hpp>
#include <iostream>

#include "nsv/cli.hpp"

int main(int argc, char** argv) {
  using namespace nsv::app;
  CLI::App app{"Navier-Stokes Volterra solver and estimate verification"};
  app.require_subcommand(1);

  std::string config;
  Overrides ov;
  std::uint64_t seed = 0;
  double mu = 0;
  std::string sign, out;
  bool quiet = false;

  auto add_common = [&](CLI::App* sub, bool config_required) {
    auto* c = sub->add_option("--config", config, "scenario file (INI)");
    if (config_required) c->required();
    sub->add_option("--out", out, "output directory");
    sub->add_option("--seed", seed, "random seed");
    sub->add_option("--mu", mu, "fractional order override");
    sub->add_option("--sign", sign, "convection sign convention")
        ->check(CLI::IsMember({"standard", "paper"}));
    sub->add_flag("--quiet", quiet, "suppress progress output");
  };
  auto* solve = app.add_subcommand("solve", "solve the scenario and write artifacts");
  auto* verify = app.add_subcommand("verify", "run the configured verification set");
  auto* converge = app.add_subcommand("converge", "manufactured-solution refinement study");
  auto* selftest = app.add_subcommand("selftest", "print operator identity residuals as JSON");
  add_common(solve, true);
  add_common(verify, true);
  add_common(converge, true);
  add_common(selftest, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  return guarded(
      [&] {
        CLI::App* sub = app.get_subcommands().front();
        Scenario s;
        if (!config.empty()) s = load_scenario(config);
        if (sub->count("--seed")) ov.seed = seed;
        if (sub->count("--mu")) ov.mu = mu;
        if (sub->count("--sign")) ov.sign = sign;
        if (sub->count("--out")) ov.out_dir = out;
        apply_overrides(s, ov);
        if (sub == solve) return run_solve(s, quiet, std::cerr);
        if (sub == verify) return run_verify(s, quiet, std::cerr);
        if (sub == converge) return run_convergence(s, quiet, std::cerr);
        return run_selftest(s, sub->count("--out") > 0, quiet, std::cout, std::cerr);
      },
      std::cerr);
}
