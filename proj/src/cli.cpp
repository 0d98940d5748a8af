#include "gcs/cli.hpp"

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gcs/errors.hpp"
#include "gcs/experiment.hpp"
#include "gcs/suites.hpp"

namespace gcs {
namespace {

struct SuiteSpec {
  const char* name;
  std::int64_t default_trials;
  std::vector<StatReport> (*run)(std::int64_t, std::uint64_t);
};

constexpr std::int64_t kMillion = 1000000;

const SuiteSpec kSuites[] = {
    {"theorem1", kMillion, coupled_match_suite},
    {"theorem2", kMillion, marginal_preservation_suite},
    {"lemma_b2", kMillion, product_intersection_suite},
    {"ensemble", 1000, ensemble_suite},
    {"estimator", 100000, estimator_suite},
};

int write_text(const std::string& path, const std::string& text,
               const char* what) {
  if (path == "-") {
    std::cout << text;
    return 0;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) {
    std::cerr << "error: cannot open " << what << " file \"" << path << "\"\n";
    return 1;
  }
  file << text;
  return 0;
}

int run_verify(const std::string& suite, std::int64_t trials, std::uint64_t seed,
               const std::string& out) {
  const SuiteSpec* spec = nullptr;
  for (const auto& candidate : kSuites) {
    if (suite == candidate.name) {
      spec = &candidate;
      break;
    }
  }
  if (spec == nullptr) {
    std::cerr << "error: unknown suite \"" << suite
              << "\" (expected theorem1, theorem2, lemma_b2, ensemble, or "
                 "estimator)\n";
    return 2;
  }
  if (trials <= 0) trials = spec->default_trials;

  std::vector<StatReport> checks;
  try {
    checks = spec->run(trials, seed);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  bool all_pass = true;
  nlohmann::ordered_json check_list = nlohmann::ordered_json::array();
  for (const auto& c : checks) {
    all_pass = all_pass && c.pass;
    nlohmann::ordered_json item;
    item["name"] = c.name;
    item["estimate"] = c.estimate;
    item["reference"] = c.reference;
    item["std_error"] = c.std_error;
    item["z_score"] = c.z_score;
    item["trials"] = c.trials;
    item["threshold"] = c.threshold;
    item["pass"] = c.pass;
    check_list.push_back(std::move(item));
  }
  nlohmann::ordered_json report;
  report["suite"] = suite;
  report["seed"] = seed;
  report["trials"] = trials;
  report["pass"] = all_pass;
  report["checks"] = std::move(check_list);

  const int write_status = write_text(out, report.dump(2) + "\n", "report");
  if (write_status != 0) return write_status;
  return all_pass ? 0 : 1;
}

int run_experiment_command(const std::string& config_path, bool seed_set,
                           std::uint64_t seed, const std::string& out_override,
                           const std::string& format_override) {
  ExperimentConfig config;
  try {
    if (!config_path.empty()) {
      std::ifstream file(config_path, std::ios::binary);
      if (!file) {
        std::cerr << "error: cannot open config file \"" << config_path << "\"\n";
        return 2;
      }
      std::ostringstream text;
      text << file.rdbuf();
      config = parse_experiment_config(text.str());
    }
    if (seed_set) config.seed = seed;
    if (!out_override.empty()) config.out = out_override;
    if (!format_override.empty()) {
      config.format = parse_report_format(format_override);
    }
    validate_experiment_config(config);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  std::vector<ExperimentRow> rows;
  try {
    rows = run_experiment(config);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  std::ostringstream body;
  write_rows(rows, config.format, body);
  return write_text(config.out, body.str(), "output");
}

}  // namespace

int cli_run(int argc, const char* const* argv) {
  CLI::App app{"Correlated sampling toolkit: verification suites and "
               "consistency experiments"};
  app.require_subcommand(1);

  auto* verify = app.add_subcommand(
      "verify", "Run a statistical verification suite and emit a JSON report");
  std::string suite;
  verify->add_option("suite", suite,
                     "Suite: theorem1, theorem2, lemma_b2, ensemble, estimator")
      ->required();
  std::int64_t trials = 0;
  std::uint64_t verify_seed = 2026;
  std::string verify_out = "-";
  verify->add_option("--trials", trials, "Override the suite's trial count");
  verify->add_option("--seed", verify_seed, "Master seed for the suite");
  verify->add_option("--out", verify_out, "Report path (default: stdout)");

  auto* experiment = app.add_subcommand(
      "experiment", "Run the consistency experiment grid and emit rows");
  std::string config_path;
  std::uint64_t experiment_seed = 0;
  std::string experiment_out;
  std::string experiment_format;
  experiment->add_option("--config", config_path,
                         "JSON config file (default: built-in defaults)");
  auto* seed_option = experiment->add_option("--seed", experiment_seed,
                                             "Override the config seed");
  experiment->add_option("--out", experiment_out,
                         "Override the output path (\"-\" for stdout)");
  experiment->add_option("--format", experiment_format,
                         "Override the output format: csv or jsonl")
      ->check(CLI::IsMember({"csv", "jsonl"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (verify->parsed()) {
    return run_verify(suite, trials, verify_seed, verify_out);
  }
  return run_experiment_command(config_path, seed_option->count() > 0,
                                experiment_seed, experiment_out,
                                experiment_format);
}

}  // namespace gcs
