#pragma once

// Run configuration: a YAML document whose "chart" table mirrors the family
// parameters (or gives a custom metric), plus command parameters and output
// paths. Command-line flags are folded into the same structure, so both
// sources go through one validator. Unknown keys are errors.
//
//   chart:
//     family: mbeta          # warped3d | mbeta | dunn | fiedler | lorentz_mf
//     beta: 1.5
//   # or a custom chart:
//   #   coordinates: [r, s]
//   #   signature: {p: 0, q: 2}
//   #   metric: [["1", "0"], ["0", "exp(2*r)"]]
//   #   guards: ["r > 0"]
//   point: [0, 0, 1, 1]
//   velocity: [0, 0, -1, 0]
//   horizon: 10
//   seed: 42
//   directions: 64
//   tolerance: 1e-10
//   max_order: 6
//   monitor: scalar_curvature   # none | scalar_curvature | ricci_vv
//   threshold: 1e6
//   integrator: {rel_tol: 1e-10, abs_tol: 1e-12, max_step: 0.1}
//   velocity_box: {lower: [...], upper: [...], cells: [...]}
//   target_box: {lower: [...], upper: [...], cells: [...]}
//   model_file: model.json
//   threads: 4
//   output: {report: out.json, csv: traj.csv}

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "skt/catalog.hpp"
#include "skt/error.hpp"
#include "skt/geodesic.hpp"
#include "skt/serialize.hpp"

namespace skt::cli {

/// A configuration problem; `key` is the dotted path of the offending entry.
class ConfigError : public Error {
 public:
  ConfigError(std::string key, const std::string& msg)
      : Error(key.empty() ? msg : key + ": " + msg), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

struct CustomChart {
  std::vector<std::vector<std::string>> metric;
  Signature signature;
  std::vector<std::string> guards;
  std::vector<std::string> coordinates;
};

struct BoxConfig {
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<int> cells;
};

struct RunConfig {
  std::optional<FamilySpec> family;
  std::optional<CustomChart> custom;

  std::optional<std::vector<double>> point;
  std::optional<std::vector<double>> velocity;
  std::optional<double> horizon;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> directions;
  std::optional<double> tolerance;
  std::optional<int> max_order;
  std::optional<Monitor> monitor;
  std::optional<double> threshold;
  std::optional<double> rel_tol;
  std::optional<double> abs_tol;
  std::optional<double> max_step;
  std::optional<BoxConfig> velocity_box;
  std::optional<BoxConfig> target_box;
  std::optional<std::string> model_file;
  std::optional<unsigned> threads;
  std::optional<std::string> report_path;
  std::optional<std::string> csv_path;

  bool has_chart() const { return family.has_value() || custom.has_value(); }
};

/// Parses a whole document. Throws ConfigError.
RunConfig parse_config(const YAML::Node& doc);
RunConfig load_config_file(const std::string& path);

/// Values set in `overlay` replace those in `base`.
void merge_into(RunConfig& base, const RunConfig& overlay);

/// Parses only a chart table (the value of "chart").
void parse_chart(const YAML::Node& node, RunConfig& cfg, const std::string& key = "chart");

Monitor parse_monitor(const std::string& text, const std::string& key);

/// Builds the chart, translating library errors into ConfigError on "chart".
Chart make_chart(const RunConfig& cfg);

/// Checks the point against the chart (dimension, domain, metric).
std::vector<double> require_point(const RunConfig& cfg, const Chart& chart);

IntegrateOptions integrate_options(const RunConfig& cfg, IntegrateOptions base = {});

/// The effective configuration, embedded in reports.
Json config_to_json(const RunConfig& cfg);

/// "1,2.5,-3" -> {1, 2.5, -3}.
std::vector<double> parse_list(const std::string& text, const std::string& key);

}  // namespace skt::cli
