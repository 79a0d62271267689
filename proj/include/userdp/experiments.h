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

// Batch experiment runner behind the command-line tool.
//
// A config is a JSON object {experiment, seed, params, output_dir} with
// experiment one of mean, erm, sco, select, audit, scaling. A run writes
//   <output_dir>/results.csv    experiment,n,m,eps,delta,d,trial,
//                               metric_name,metric_value
//   <output_dir>/manifest.json  config hash, seed, version, wall time
// and, for audit and scaling runs, audit.json or slopes.json.
//
// Trial t of grid cell c draws from RandomSource(seed ^ t, c), so results do
// not depend on the number of worker threads.

#ifndef USERDP_EXPERIMENTS_H_
#define USERDP_EXPERIMENTS_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace userdp {

struct RunOptions {
  std::size_t jobs = 1;
  std::optional<std::uint64_t> seed_override;
  // Replaces the config's output_dir when non-empty.
  std::string output_dir;
};

struct RunSummary {
  std::string experiment;
  std::string output_dir;
  std::size_t rows = 0;
  // False when an experiment's built-in expectation (audit verdicts, slope
  // bands) was not met.
  bool acceptance_ok = true;
  std::vector<std::string> messages;
};

// Parses and checks a config without running it. Config problems are
// reported with ErrorKind::kConfig.
absl::Status ValidateConfig(std::string_view config_json);

absl::StatusOr<RunSummary> RunExperiment(std::string_view config_json,
                                         const RunOptions& options);

// Re-fits log-log slopes from <output_dir>/results.csv for the named metric
// (the first metric in the file when empty), writes slopes.json next to it
// and returns its contents.
absl::StatusOr<std::string> ReportScaling(const std::string& output_dir,
                                          const std::string& metric);

// Lower-case hex SHA-256 of the given bytes.
std::string Sha256Hex(std::string_view bytes);

// Shortest decimal that round-trips to the same double.
std::string FormatDouble(double value);

}  // namespace userdp

#endif  // USERDP_EXPERIMENTS_H_
