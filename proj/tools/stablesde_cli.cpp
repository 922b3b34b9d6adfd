#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "stablesde/errors.hpp"
#include "stablesde/experiment_config.hpp"
#include "stablesde/experiments.hpp"
#include "stablesde/version.hpp"

namespace {

constexpr int kExitSuccess = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitIo = 4;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw stablesde::IoError("cannot read config file", path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void print_failure_record(const std::string& kind, const std::string& what) {
  nlohmann::json record;
  record["error"] = kind;
  record["what"] = what;
  std::cerr << record.dump() << "\n";
}

int run_and_report(const stablesde::ExperimentConfig& config) {
  const stablesde::RunManifest manifest = stablesde::run_experiment(config);
  std::cout << "experiment: " << stablesde::experiment_name(config.experiment) << "\n";
  for (const std::string& file : manifest.result_files) std::cout << "wrote: " << file << "\n";
  std::cout << "wrote: " << manifest.manifest_file << "\n";
  std::cout << "wall time: " << manifest.wall_time_seconds << " s\n";
  if (manifest.passed()) {
    std::cout << "self-checks: pass\n";
    return kExitSuccess;
  }
  nlohmann::json record;
  record["error"] = "numerical-acceptance";
  record["experiment"] = stablesde::experiment_name(config.experiment);
  record["failures"] = manifest.failures;
  record["manifest"] = manifest.manifest_file;
  std::cerr << record.dump() << "\n";
  return kExitNumerical;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Experiment runner for the stable-noise SDE library"};
  app.set_version_flag("--version", std::string(stablesde::kLibraryVersion));

  bool list_flag = false;
  bool smoke_flag = false;
  unsigned workers = 0;
  std::string output_dir;
  std::string config_path;

  app.add_flag("--list-experiments", list_flag, "print the experiment names and exit");
  app.add_flag("--smoke", smoke_flag, "run the built-in tiny weak-rate preset");
  app.add_option("--workers", workers, "override the worker count");
  app.add_option("--output-dir", output_dir, "override the output directory");
  CLI::App* run_cmd = app.add_subcommand("run", "run the experiment described by a config file");
  run_cmd->add_option("config", config_path, "path to a key = value config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return kExitSuccess;
  } catch (const CLI::CallForVersion&) {
    std::cout << stablesde::kLibraryVersion << "\n";
    return kExitSuccess;
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return kExitConfig;
  }

  if (list_flag) {
    for (const std::string& name : stablesde::list_experiments()) std::cout << name << "\n";
    return kExitSuccess;
  }

  try {
    stablesde::ExperimentConfig config;
    if (smoke_flag && run_cmd->parsed()) {
      std::cerr << "choose either --smoke or run <config-path>, not both\n";
      return kExitConfig;
    }
    if (smoke_flag) {
      config = stablesde::smoke_config();
    } else if (run_cmd->parsed()) {
      config = stablesde::validate_config(read_file(config_path));
    } else {
      std::cerr << app.help();
      return kExitConfig;
    }

    // The only environment override; explicit flags still win.
    if (const char* env = std::getenv("OUTPUT_DIR"); env != nullptr && *env != '\0')
      config.output_dir = env;
    if (!output_dir.empty()) config.output_dir = output_dir;
    if (app.count("--workers") > 0) {
      if (workers < 1) {
        std::cerr << "workers: must be at least 1\n";
        return kExitConfig;
      }
      config.workers = workers;
    }
    return run_and_report(config);
  } catch (const stablesde::ConfigError& e) {
    if (e.line() > 0)
      std::cerr << "config error (line " << e.line() << "): " << e.what() << "\n";
    else
      std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const stablesde::ParameterDomainError& e) {
    std::cerr << "config error (" << e.field() << "): " << e.what() << "\n";
    return kExitConfig;
  } catch (const stablesde::IoError& e) {
    std::cerr << "io error (" << e.path() << "): " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    print_failure_record("numerical", e.what());
    return kExitNumerical;
  }
}
