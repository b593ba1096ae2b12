#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "finsler/manifold/model.hpp"
#include "finsler/metrics/metric.hpp"

namespace finsler::cli {

using nlohmann::json;

enum ExitCode : int { kPass = 0, kVerificationFailure = 1, kConfigError = 2, kEvaluationError = 3 };

/// Everything a command needs.  Defaults, then the --config file, then flags.
struct RunConfig {
  json model;                   // registry name or inline polynomial model; null picks per command
  json metric = "cross02";      // generator name, "riemannian", "quartic-test", or an object
  int points = 5;
  std::vector<std::vector<double>> point_list;  // overrides `points` when non-empty
  double radius = 0.1;
  int directions = 16;
  int nodes = 0;
  std::optional<double> tol;
  std::string format = "json";
  std::string out;
  std::vector<std::string> quantities = {"g", "C", "I", "G"};
  std::string xi;
  double r0 = 1.0;

  json to_json() const;
};

/// Applies the recognised keys of `j`; unknown keys or bad types raise
/// ConfigError naming the field.
void merge_config(RunConfig& config, const json& j);

/// Parses a config file; syntax errors report line and column.
json read_config_file(const std::string& path);

manifold::ManifoldModel make_model(const json& model);
metrics::MetricSpec make_metric(const json& metric, const manifold::ManifoldModel& model);

/// Shortest representation that parses back to the same double.
std::string format_double(double v);

/// Structural check of an emitted JSON report.  Returns an empty string when
/// valid, else the first problem.
std::string check_report(const json& report);

/// Runs one command line (without the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace finsler::cli
