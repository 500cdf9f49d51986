// Command-line front end: scenario files and presets in, CSV/binary out.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "hhg/errors.hpp"
#include "hhg/runner.hpp"
#include "hhg/scenario.hpp"

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw hhg::NotFoundError("cannot open config " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"High-harmonic generation simulator"};
  app.require_subcommand(1);

  std::string config, out_dir, only_case;
  int threads = 0;
  unsigned long long seed = 0;
  bool quiet = false;
  std::size_t workers = 1;
  std::vector<std::string> overrides;
  app.add_option("--config", config, "scenario file");
  app.add_option("--out-dir", out_dir, std::string("output root (default $") + hhg::kOutDirEnv + " or ./hhg_out)");
  app.add_option("--threads", threads, "OpenMP threads (0: runtime default)")->check(CLI::NonNegativeNumber);
  app.add_option("--seed", seed, "accepted for interface stability; every stage is deterministic");
  app.add_option("--workers", workers, "cases run concurrently")->check(CLI::PositiveNumber);
  app.add_option("--set", overrides, "override key=value (repeatable)");
  app.add_option("--case", only_case, "run a single case");
  app.add_flag("-q,--quiet", quiet, "no progress output");

  const std::vector<std::pair<std::string, std::string>> stage_commands{
      {"table", "build (or load) the dipole table and its phase-slope summary"},
      {"scan", "conversion efficiency over jet positions and intensities"},
      {"propagate", "exit field, far field and virtual focus"},
      {"coherence", "degree of spatial coherence at the exit"},
      {"spectrum", "spectral profile of the exit pulse"},
      {"compress", "quadratic spectral-phase compression"},
      {"nonadiabatic", "short-pulse single-atom comparison"},
  };
  std::map<std::string, CLI::App*> stage_apps;
  for (const auto& [name, help] : stage_commands) stage_apps[name] = app.add_subcommand(name, help);

  auto* preset_cmd = app.add_subcommand("preset", "run a built-in scenario");
  std::string preset_id;
  bool print_only = false;
  preset_cmd->add_option("id", preset_id, "preset id (see list-presets)")->required();
  preset_cmd->add_flag("--print", print_only, "print the scenario document instead of running it");
  auto* list_cmd = app.add_subcommand("list-presets", "list built-in scenarios");
  auto* keys_cmd = app.add_subcommand("keys", "list accepted configuration keys with defaults");

  CLI11_PARSE(app, argc, argv);

  try {
    if (list_cmd->parsed()) {
      for (const auto& p : hhg::presets()) std::cout << p.id << "  " << p.title << '\n';
      return 0;
    }
    if (keys_cmd->parsed()) {
      for (const auto& k : hhg::documented_keys())
        std::cout << k.path << " = " << k.default_value << (k.required ? "  (required)" : "") << "  # "
                  << k.help << '\n';
      return 0;
    }
#ifdef _OPENMP
    if (threads > 0) omp_set_num_threads(threads);
#endif
    (void)seed;

    hhg::Scenario scenario;
    hhg::RunOptions opt;
    if (preset_cmd->parsed()) {
      const auto& p = hhg::find_preset(preset_id);
      if (print_only) {
        std::cout << p.text;
        return 0;
      }
      scenario = hhg::parse_config(p.text);
    } else {
      std::string stage;
      for (const auto& [name, sub] : stage_apps)
        if (sub->parsed()) stage = name;
      scenario = config.empty() ? hhg::parse_config("[run]\nid = " + stage + "\n")
                                : hhg::parse_config(slurp(config));
      opt.stages = {stage};
    }
    for (const auto& kv : overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw hhg::ConfigError("--set expects key=value, got '" + kv + "'");
      hhg::set_value(scenario, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (!out_dir.empty()) opt.out_dir = out_dir;
    opt.only_case = only_case;
    opt.workers = workers;
    if (!quiet) opt.log = [](const std::string& line) { std::cerr << line << std::endl; };

    const auto manifest = hhg::run_scenario(scenario, opt);
    std::cout << manifest.scenario_id << ": " << manifest.files.size() << " files, "
              << manifest.wall_time_s << " s";
    for (const auto& [key, hit] : manifest.cache) std::cout << (hit ? ", table cache hit" : ", table built");
    std::cout << '\n';
    for (const auto& [where, msg] : manifest.errors) std::cerr << "error in " << where << ": " << msg << '\n';
    return manifest.ok() ? 0 : 2;
  } catch (const hhg::Error& e) {
    std::cerr << "hhgsim: " << e.what() << '\n';
    return 1;
  }
}
