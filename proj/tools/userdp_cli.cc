// Copyright 2026 The userdp Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Experiment runner.
//
//   userdp run --config cfg.json [--jobs N] [--seed-override U64]
//              [--output DIR]
//   userdp validate --config cfg.json
//   userdp report --output DIR [--metric NAME]
//
// Exit codes: 0 success, 1 runtime failure, 2 config error, 3 acceptance
// failure.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "userdp/userdp.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;
constexpr int kExitAcceptance = 3;

int ExitFor(userdp_status status) {
  return status == USERDP_ERR_CONFIG ? kExitConfig : kExitRuntime;
}

int Complain(userdp_status status) {
  std::cerr << "userdp: " << userdp_status_name(status)
            << " error: " << userdp_last_error() << "\n";
  return ExitFor(status);
}

std::optional<std::string> Slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"User-level differentially private estimation experiments"};
  app.set_version_flag("--version", std::string(userdp_version()));
  app.require_subcommand(1);

  std::string config_path;
  std::size_t jobs = 1;
  std::uint64_t seed_override = 0;
  std::string output_dir;
  std::string metric;

  CLI::App* run = app.add_subcommand("run", "Execute an experiment config");
  run->add_option("--config", config_path, "Path to the JSON config")
      ->required();
  run->add_option("--jobs", jobs, "Worker threads")
      ->check(CLI::Range(std::size_t{1}, std::size_t{256}));
  CLI::Option* seed_flag =
      run->add_option("--seed-override", seed_override, "Replace the seed");
  run->add_option("--output", output_dir, "Output directory");

  CLI::App* validate =
      app.add_subcommand("validate", "Lint a config without running it");
  validate->add_option("--config", config_path, "Path to the JSON config")
      ->required();

  CLI::App* report = app.add_subcommand(
      "report", "Re-fit scaling slopes from an existing results.csv");
  report->add_option("--output", output_dir, "Run directory")->required();
  report->add_option("--metric", metric, "Metric to fit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // --help and --version surface as parse "errors" with exit code 0.
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  if (*report) {
    char* text = nullptr;
    const userdp_status s = userdp_experiment_report(
        output_dir.c_str(), metric.empty() ? nullptr : metric.c_str(), &text);
    if (s != USERDP_OK) return Complain(s);
    std::cout << text;
    userdp_string_free(text);
    return kExitOk;
  }

  const std::optional<std::string> config = Slurp(config_path);
  if (!config) {
    std::cerr << "userdp: config error: cannot read " << config_path << "\n";
    return kExitConfig;
  }

  if (*validate) {
    const userdp_status s = userdp_experiment_validate(config->c_str());
    if (s != USERDP_OK) return Complain(s);
    std::cout << "config ok\n";
    return kExitOk;
  }

  int acceptance_ok = 0;
  char* summary = nullptr;
  const userdp_status s = userdp_experiment_run(
      config->c_str(), jobs, seed_flag->count() > 0 ? 1 : 0, seed_override,
      output_dir.c_str(), &acceptance_ok, &summary);
  if (s != USERDP_OK) return Complain(s);
  const auto j = nlohmann::json::parse(summary);
  userdp_string_free(summary);
  std::cout << j.at("experiment").get<std::string>() << ": "
            << j.at("rows").get<std::size_t>() << " rows written to "
            << j.at("output_dir").get<std::string>() << "\n";
  for (const auto& line : j.at("messages")) {
    std::cout << "  " << line.get<std::string>() << "\n";
  }
  if (acceptance_ok == 0) {
    std::cerr << "userdp: acceptance check failed\n";
    return kExitAcceptance;
  }
  return kExitOk;
}
