// hlw: manifest-driven front end for the inequality toolkit.
//
//   hlw <experiment> [--n N] [--res R] [--seed S] [--jobs J] [--deterministic]
//       [--out DIR] [--param key=value ...]
//   hlw run manifest.json
//   hlw acceptance --level quick|full

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "hlw/manifest.hpp"
#include "hlw/parallel.hpp"

namespace {

int parse_params(const std::vector<std::string>& kvs, nlohmann::json& params) {
  for (const std::string& kv : kvs) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) {
      std::cerr << "bad --param (expected key=value): " << kv << "\n";
      return hlw::kExitInvalidParams;
    }
    params[kv.substr(0, eq)] = kv.substr(eq + 1);
  }
  return hlw::kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hlw - numerical toolkit for Loomis-Whitney inequalities in Heisenberg groups"};
  app.set_version_flag("--version", std::string("hlw ") + hlw::kToolVersion);

  std::string experiment;
  std::string manifest_path;
  hlw::Manifest man;
  std::vector<std::string> raw_params;
  std::string level;
  int n = 0;

  app.add_option("experiment", experiment,
                 "experiment name, or 'run' followed by a manifest file")
      ->required();
  app.add_option("manifest", manifest_path, "manifest.json (only with 'run')");
  app.add_option("--n", n, "Heisenberg index n");
  app.add_option("--res", man.resolution, "grid resolution (cells per axis)");
  app.add_option("--seed", man.seed, "random seed");
  app.add_option("--jobs,-j", man.jobs, "worker threads (default HLW_JOBS or hardware)");
  app.add_flag("--deterministic", man.deterministic, "fixed-order reductions (always on; flag echoed)");
  app.add_option("--out", man.output, "output directory");
  app.add_option("--param", raw_params, "extra key=value experiment parameters")
      ->take_all();
  app.add_option("--level", level, "acceptance level: quick|full");

  CLI11_PARSE(app, argc, argv);

  if (experiment == "run") {
    if (manifest_path.empty()) {
      std::cerr << "run: missing manifest path\n";
      return hlw::kExitInvalidParams;
    }
    std::ifstream in(manifest_path);
    if (!in) {
      std::cerr << "run: cannot open " << manifest_path << "\n";
      return hlw::kExitError;
    }
    nlohmann::json doc;
    try {
      in >> doc;
    } catch (const std::exception& ex) {
      std::cerr << "run: bad manifest json: " << ex.what() << "\n";
      return hlw::kExitInvalidParams;
    }
    return hlw::run_manifest(hlw::manifest_from_json(doc));
  }

  man.experiment = experiment;
  if (int rc = parse_params(raw_params, man.params); rc != hlw::kExitOk) return rc;
  if (n > 0) man.params["n"] = n;
  if (!level.empty()) man.params["level"] = level;
  if (!hlw::is_known_experiment(man.experiment)) {
    std::cerr << "unknown experiment: " << man.experiment << "\n";
    return hlw::kExitUnknownExperiment;
  }
  return hlw::run_manifest(man);
}
