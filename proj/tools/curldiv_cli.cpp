#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "curldiv/scenario.hpp"

using namespace curldiv;

namespace {

const char* error_kind(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return "ConfigError";
  if (dynamic_cast<const IncompatibleData*>(&e)) return "IncompatibleData";
  if (dynamic_cast<const NonSolenoidalSource*>(&e)) return "NonSolenoidalSource";
  if (dynamic_cast<const InvalidArgument*>(&e)) return "InvalidArgument";
  if (dynamic_cast<const DegenerateFit*>(&e)) return "DegenerateFit";
  if (dynamic_cast<const NonConvergence*>(&e)) return "NonConvergence";
  if (dynamic_cast<const MaxIterExceeded*>(&e)) return "MaxIterExceeded";
  if (dynamic_cast<const ContractViolation*>(&e)) return "ContractViolation";
  return "error";
}

int run(const std::string& target, const std::string& out, int threads) {
  nlohmann::json config;
  std::string name = target;
  if (std::filesystem::exists(target)) {
    config = load_config(target);
    name = std::filesystem::path(target).stem().string();
  } else if (const auto* p = find_preset(target)) {
    config = p->config;
  } else {
    throw ConfigError("'" + target + "' is neither a config file nor a preset (see list-presets)");
  }
  RunOptions opts;
  opts.threads = threads;
  opts.out_dir = out;
  if (opts.out_dir.empty() && !(config.is_object() && config.contains("output") && config["output"].contains("dir")))
    opts.out_dir = "out/" + name;
  const auto s = run_scenario(config, opts);
  std::cout << s.to_json().dump(2) << '\n';
  if (!s.pass) std::cerr << "verification failed: " << s.task << '\n';
  return s.pass ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"curl/div elliptic and parabolic verification runs"};
  app.require_subcommand(1);
  int threads = 1;
  std::string out;
  app.add_option("--threads", threads, "worker threads for independent solves")->check(CLI::PositiveNumber);
  app.add_option("--out", out, "output directory (overrides output.dir)");

  auto* run_cmd = app.add_subcommand("run", "run a scenario config or a named preset");
  std::string target;
  run_cmd->add_option("config", target, "config.json or preset name")->required();
  run_cmd->fallthrough();

  auto* list_cmd = app.add_subcommand("list-presets", "list built-in scenario presets");
  bool as_json = false;
  list_cmd->add_flag("--json", as_json, "print a JSON array with the full configs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return 1;
  }

  if (*list_cmd) {
    if (as_json) {
      auto arr = nlohmann::json::array();
      for (const auto& p : presets()) arr.push_back({{"name", p.name}, {"description", p.description}, {"config", p.config}});
      std::cout << arr.dump(2) << '\n';
    } else {
      for (const auto& p : presets()) std::cout << p.name << "\t" << p.description << '\n';
    }
    return 0;
  }

  try {
    return run(target, out, threads);
  } catch (const std::exception& e) {
    std::cerr << error_kind(e) << ": " << e.what() << '\n';
    return 1;
  }
}
