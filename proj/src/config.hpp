#pragma once

#include <string>
#include <vector>

#include "iteration.hpp"
#include "types.hpp"

namespace dsm {

// Experiment description parsed from a "key = value" text file. Parsing and
// validation errors carry the line and field name.
struct ExperimentConfig {
  // problem
  std::string catalog = "linear_fredholm";
  int dim = 100;
  double c = 0.0;
  std::string y_profile = "sin";  // ones | sin | mixed | list:v1,v2,...
  double y_scale = 1.0;
  double delta = 0.0;
  std::uint64_t seed = 1;
  // schedule
  bool d0_auto = true;
  double d0 = 0.0;
  double d = 1.0;
  double b = 1.0;
  double C1 = 2.0;
  double gamma = 0.9;
  bool y_norm_est_auto = true;
  double y_norm_est = 0.0;
  bool bounds_R_auto = true;
  double bounds_R = 0.0;
  int bounds_samples = 160;
  // run
  StopKind rule = StopKind::discrepancy;
  Index n_cap = 1000000;
  bool diagnostics = false;
  // output
  std::string out_dir = "out";
  bool write_csv = true;
  bool write_json = true;
  // study
  std::vector<double> study_deltas;
  // verify
  Index conditions_n = 10000;
};

ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config(const std::string& path);
std::string serialize_config(const ExperimentConfig& cfg);

/// Known solution profiles on the midpoint grid x_i = (i-1/2)/d:
///   ones  - constant y_i = scale
///   sin   - scale * sin(pi x_i)
///   mixed - scale * (1.25 * s1 + 0.7 * s2) with s1, s2 the normalized
///           samplings of sin(pi x) and sin(5.5 pi x); a smooth component
///           plus an oscillatory one so studies expose both regimes
///   list:v1,v2,... - explicit coordinates times scale
Vector make_y_profile(const std::string& profile, int dim, double scale);

}  // namespace dsm
