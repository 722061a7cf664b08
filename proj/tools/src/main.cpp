#include <iostream>

#if __has_include(<CLI/CLI.hpp>)
#include <CLI/CLI.hpp>
#else
#include "CLI11.hpp"
#endif
#include "greenp2cli/commands.hpp"

using greenp2cli::Command;
using greenp2cli::RunConfig;

namespace {

CLI::App* subcommand(CLI::App& app, RunConfig& cfg, Command cmd, const std::string& name,
                     const std::string& about) {
  CLI::App* sub = app.add_subcommand(name, about);
  sub->callback([&cfg, cmd] { cfg.command = cmd; });
  sub->add_option("--out", cfg.out_path, "Write the JSON report here instead of stdout");
  sub->add_option("--seed", cfg.seed, "Random seed (default: GREENP2_DEFAULT_SEED or 24301)");
  if (cmd == Command::Gen) return sub;
  sub->add_option("--map", cfg.map_path, "Map file (default: read from stdin)");
  sub->add_option("--threads", cfg.threads, "Worker cap for sampling loops")->capture_default_str();
  return sub;
}

void add_n(CLI::App* sub, RunConfig& cfg, const std::string& about) { sub->add_option("--n", cfg.n, about); }

void add_points(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--point", cfg.points, "Point as z:w:t, repeatable (e.g. 1:0:0.5i)");
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;
  cfg.seed = greenp2cli::default_seed();
  CLI::App app{"Experiments with holomorphic self-maps of the complex projective plane"};
  app.require_subcommand(1);

  auto* green = subcommand(app, cfg, Command::Green, "green", "Green function at points or random samples");
  add_points(green, cfg);
  green->add_option("--samples", cfg.samples, "Random points when no --point is given (default 10)");
  green->add_option("--tol", cfg.tol, "Tail tolerance (default 1e-8)");
  green->add_option("--csv", cfg.csv_path, "Mean partial sums d^-n a_n per n");

  auto* mult = subcommand(app, cfg, Command::Mult, "mult", "Multiplicity series mu, e, c along orbits");
  add_points(mult, cfg);
  add_n(mult, cfg, "Horizon (default 3)");

  auto* inv = subcommand(app, cfg, Command::Invariants, "invariants",
                         "Exceptional lines and points, transition matrix");
  add_n(inv, cfg, "Horizon for the contraction test (default 2)");

  auto* cls = subcommand(app, cfg, Command::Classify, "classify", "Configuration row of the exceptional set");
  add_n(cls, cfg, "Horizon for the contraction test (default 2)");

  auto* eq = subcommand(app, cfg, Command::Equidist, "equidist", "L1 distance of pulled-back curve potentials");
  eq->add_option("--curve", cfg.curve, "Curve expression in z, w, t (default z+w+2t)");
  add_n(eq, cfg, "Largest pullback order (default 8)");
  eq->add_option("--samples", cfg.samples, "Fubini-Study samples, at least 1000 (default 10000)");
  eq->add_option("--csv", cfg.csv_path, "Distance series");

  auto* lel = subcommand(app, cfg, Command::Lelong, "lelong", "Lelong numbers of a pulled-back curve");
  add_points(lel, cfg);
  lel->add_option("--curve", cfg.curve, "Curve expression (default: Jacobian of the lift)");
  add_n(lel, cfg, "Pullback order (default 0)");

  auto* kis = subcommand(app, cfg, Command::Kiselman, "kiselman", "Kiselman numbers with weights (alpha, 1)");
  add_points(kis, cfg);
  kis->add_option("--curve", cfg.curve, "Curve expression (default: Jacobian of the lift)");
  add_n(kis, cfg, "Pullback order (default 0)");
  kis->add_option("--alpha", cfg.alphas, "Weights alpha, repeatable (default 0.1, 0.2, ..., 1)");

  auto* vol = subcommand(app, cfg, Command::Volume, "volume", "Volume decay of a ball under iteration");
  add_points(vol, cfg);
  add_n(vol, cfg, "Largest iterate (default 4)");
  vol->add_option("--samples", cfg.samples, "Samples per iterate (default 10000)");
  vol->add_option("--radius", cfg.radius, "Chart radius of the ball (default 0.1)");
  vol->add_option("--csv", cfg.csv_path, "Log Jacobian bound series");

  auto* gen = subcommand(app, cfg, Command::Gen, "gen", "Write a generated map file");
  gen->add_option("kind", cfg.generator, "table1 or lattes-ueda")->required();
  gen->add_option("--d", cfg.d, "Degree (default 2)");
  gen->add_option("--row", cfg.row, "Table row such as 2-1 or generic");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << greenp2cli::Json{{"error", {{"code", "UsageError"}, {"message", e.what()}}}}.dump() << '\n';
    return 1;
  }
  return greenp2cli::run(cfg, std::cin, std::cout, std::cerr);
}
