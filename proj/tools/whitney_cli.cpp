#include <iostream>

#include "CLI11.hpp"
#include "whitney/app.hpp"

using whitney::app::Command;
using whitney::app::JobConfig;

int main(int argc, char** argv) {
  CLI::App cli{"Minimal Lipschitz-gradient interpolation of scattered data"};
  cli.require_subcommand(1);
  JobConfig config;
  std::string mode = "exact";
  std::string pairs = "full";

  auto common = [&](CLI::App* sub) {
    sub->add_option("-i,--input", config.input_path, "input JSON (dim, sites, values, optional gradients)");
    sub->add_option("-o,--output", config.output_path, "output file (default: stdout)");
    sub->add_option("--epsilon", config.epsilon, "barrier accuracy for fit");
    sub->add_option("--eps-sep", config.eps_sep, "pair separation in (0,1)");
    sub->add_option("--mode", mode, "M for jet data: exact or approx")->check(CLI::IsMember({"exact", "approx"}));
    sub->add_option("--pairs", pairs, "constraint pairs for fit: full or wspd")->check(CLI::IsMember({"full", "wspd"}));
    sub->add_option("--M", config.M_override, "use this M (checked against the Wells condition)");
    sub->add_option("--seed", config.seed, "seed for sampling and generated data");
    sub->add_flag("--tree", config.tree, "use the hyperplane locator tree");
    sub->add_flag("--jitter", config.jitter, "perturb sites by 1e-9 of the diameter (seeded) to break degeneracies");
    sub->add_flag("--sparse", config.sparse, "sparse Cholesky in the barrier solver");
  };

  struct Entry {
    const char* name;
    const char* help;
    Command command;
  };
  const Entry entries[] = {
      {"gamma1", "report gamma1 of a 1-field", Command::Gamma1},
      {"fit", "fit gradients to function-only data", Command::Fit},
      {"build", "build the piecewise-quadratic model", Command::Build},
      {"query", "evaluate a model at query points", Command::Query},
      {"check", "run the invariant suites on an instance or model", Command::Check},
      {"bench", "timing sweep on generated data (CSV)", Command::Bench},
  };
  for (const Entry& e : entries) {
    CLI::App* sub = cli.add_subcommand(e.name, e.help);
    common(sub);
    Command c = e.command;
    sub->callback([&config, c] { config.command = c; });
    if (c == Command::Query || c == Command::Check) {
      sub->add_option("--model", config.model_path, "model JSON written by build");
    }
    if (c == Command::Query) sub->add_option("--queries", config.queries_path, "query points, one per line");
    if (c == Command::Bench) {
      sub->add_option("--dims", config.dims, "dimensions to sweep");
      sub->add_option("--sizes", config.sizes, "numbers of sites to sweep");
      sub->add_option("--queries-per-size", config.num_queries, "query points per size");
    }
  }

  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = cli.exit(e);
    return code == 0 ? 0 : 2;
  }
  config.approx = mode == "approx";
  config.pairs = pairs == "wspd" ? whitney::PairMode::Wspd : whitney::PairMode::Full;
  return whitney::app::run_job(config, std::cout, std::cerr);
}
