// widomlab norms|limits|shabat|preimage --config <file.json> [--out prefix] [--seed N] [--tol X]
//
// Exit codes: 0 success, 1 partial (some degrees failed), 2 bad config.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "widomlab/experiment.hpp"

namespace {

bool write_file(const std::string& path, const std::string& body) {
  std::ofstream f(path, std::ios::binary);
  f << body;
  return static_cast<bool>(f);
}

} // namespace

int main(int argc, char** argv) {
  using namespace widomlab;
  CLI::App app{"Chebyshev polynomials and Widom factors of polynomial preimages"};
  app.require_subcommand(1);
  std::string config_path, out;
  std::uint64_t seed = 0;
  double tol = 0.0;
  for (const char* name : {"norms", "limits", "shabat", "preimage"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "experiment config (JSON)")->required();
    sub->add_option("--out", out, "output path prefix (overrides config)");
    sub->add_option("--seed", seed, "root-solver seed (overrides config)");
    sub->add_option("--tol", tol, "solver tolerance (overrides config)");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  const std::string cmd = app.get_subcommands().front()->get_name();
  const auto* sub = app.get_subcommands().front();

  CommandResult res;
  std::string prefix;
  bool emit_csv = true, emit_svg = false;
  try {
    std::ifstream f(config_path, std::ios::binary);
    if (!f) throw ConfigError("cannot read config file '" + config_path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    ExperimentConfig cfg = parse_config_text(ss.str());
    if (sub->count("--seed")) cfg.seed = seed;
    if (sub->count("--tol")) {
      check_tol_range(tol);
      cfg.tol = tol;
    }
    prefix = sub->count("--out") ? out : cfg.output;
    emit_csv = cfg.emit_csv;
    emit_svg = cfg.emit_svg;
    if (cmd == "norms") res = cmd_norms(cfg);
    else if (cmd == "limits") res = cmd_limits(cfg);
    else if (cmd == "shabat") res = cmd_shabat(cfg);
    else res = cmd_preimage(cfg);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  std::cerr << res.log;
  if (prefix.empty()) {
    if (emit_csv) std::cout << res.csv;
    if (emit_svg && !emit_csv) std::cout << res.svg;
  } else {
    if (emit_csv && !write_file(prefix + ".csv", res.csv)) {
      std::cerr << "error: cannot write " << prefix << ".csv\n";
      return 1;
    }
    if (emit_svg && !res.svg.empty() && !write_file(prefix + ".svg", res.svg)) {
      std::cerr << "error: cannot write " << prefix << ".svg\n";
      return 1;
    }
  }
  return res.exit_code;
}
