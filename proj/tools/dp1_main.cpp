#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "dp1/commands.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  std::string u_csv;
  std::string z_csv;
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* sub, CommonArgs& args, bool needs_fields) {
  sub->add_option("--config", args.config_path, "path to the run configuration")->required();
  sub->add_option("--out", args.out_dir, "output directory (overrides [output] dir)");
  sub->add_option("--seed", args.seed, "seed for randomized probes (overrides [output] seed)");
  if (needs_fields) {
    sub->add_option("--u", args.u_csv, "nodal field CSV with the candidate u")->required();
    sub->add_option("--z", args.z_csv, "cell field CSV with the candidate z")->required();
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Solver suite for the double-phase Dirichlet problem driven by the 1-Laplacian:\n"
      "minimizes the (p,q) energy along p -> 1, minimizes the limit energy directly,\n"
      "and verifies the weak-solution certificate (u, z)."};
  app.require_subcommand(1);

  CommonArgs args;
  CLI::App* solve_pq = app.add_subcommand("solve-pq", "minimize the (p,q) double-phase energy");
  CLI::App* cont = app.add_subcommand("continue", "drive p -> 1 along a geometric schedule");
  CLI::App* solve_limit = app.add_subcommand("solve-limit", "minimize the limit energy directly");
  CLI::App* verify = app.add_subcommand("verify", "check the certificate for fields from CSV");
  CLI::App* oracle = app.add_subcommand("oracle", "semi-analytic 1D reference solution");
  CLI::App* compare = app.add_subcommand("compare", "run both pipelines and cross-check");

  add_common(solve_pq, args, false);
  add_common(cont, args, false);
  add_common(solve_limit, args, false);
  add_common(verify, args, true);
  add_common(oracle, args, false);
  add_common(compare, args, false);

  CLI11_PARSE(app, argc, argv);

  dp1::RunConfig cfg;
  try {
    cfg = dp1::parse_config_file(args.config_path);
  } catch (const dp1::ConfigError& e) {
    std::cerr << "config error: " << args.config_path << ": " << e.what() << '\n';
    return dp1::kExitConfig;
  }
  if (args.seed) cfg.seed = *args.seed;
  const std::string out = !args.out_dir.empty() ? args.out_dir : cfg.out_dir;

  if (solve_pq->parsed()) return dp1::cmd_solve_pq(cfg, out);
  if (cont->parsed()) return dp1::cmd_continue(cfg, out);
  if (solve_limit->parsed()) return dp1::cmd_solve_limit(cfg, out);
  if (verify->parsed()) return dp1::cmd_verify(cfg, out, args.u_csv, args.z_csv);
  if (oracle->parsed()) return dp1::cmd_oracle(cfg, out);
  if (compare->parsed()) return dp1::cmd_compare(cfg, out);
  return 1;
}
