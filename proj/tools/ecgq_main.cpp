// Command-line driver: synth | ingest | prepare | train | test | report.
// Every config key is reachable four ways with fixed precedence:
// built-in default < --config file < ECGQ_* environment < command-line flag.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "ecgq/config.hpp"
#include "ecgq/pipeline.hpp"

int main(int argc, char** argv) {
  CLI::App app{"ECG beat classification pipeline: two-lead ingestion, denoising, "
               "QRS detection, grid-state encoding, and tabular Q-learning"};
  app.set_version_flag("--version", std::string(ecgq::kVersion));
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path, "run configuration file (key = value lines)");

  // One flag per config key, hyphen-spelled; only flags actually given
  // override the lower layers.
  std::map<std::string, std::string> values;
  std::vector<std::pair<std::string, CLI::Option*>> options;
  for (const ecgq::ConfigKey& k : ecgq::config_schema()) {
    std::string flag = "--";
    for (const char* p = k.key; *p; ++p) flag += *p == '_' ? '-' : *p;
    options.emplace_back(k.key, app.add_option(flag, values[k.key], k.help));
  }

  for (const char* name : {"synth", "ingest", "prepare", "train", "test", "report"}) {
    const char* help =
        name == std::string("synth")     ? "generate a fixture cohort into input_dir"
        : name == std::string("ingest")  ? "scan input_dir and build the cohort manifest"
        : name == std::string("prepare") ? "denoise, score, detect, and segment every record"
        : name == std::string("train")   ? "train the Q agent on the train split"
        : name == std::string("test")    ? "run greedy test episodes against the test split"
                                         : "rebuild metrics, episode CSVs, and SVG charts";
    app.add_subcommand(name, help)->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ecgq::kExitOk : ecgq::kExitConfig;
  }

  try {
    ecgq::KeyValues kv;
    if (!config_path.empty()) {
      if (!std::filesystem::exists(config_path))
        throw ecgq::ConfigError("config file does not exist: " + config_path);
      ecgq::merge_config(kv, ecgq::parse_config_text(ecgq::read_text_file(config_path)));
    }
    ecgq::merge_config(kv, ecgq::env_overrides([](const char* name) -> const char* {
                         return std::getenv(name);
                       }));
    for (const auto& [key, opt] : options) {
      if (opt->count() > 0) kv[key] = values[key];
    }
    const ecgq::RunConfig cfg = ecgq::build_run_config(kv);
    return ecgq::run_command(app.get_subcommands().front()->get_name(), cfg, std::cout,
                             std::cerr);
  } catch (const ecgq::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return ecgq::kExitConfig;
  } catch (const ecgq::InvalidSpec& e) {
    std::cerr << "error: " << e.what() << "\n";
    return ecgq::kExitConfig;
  }
}
