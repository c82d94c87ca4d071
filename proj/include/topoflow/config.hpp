#pragma once

#include "topoflow/objective.hpp"
#include "topoflow/optimizer.hpp"
#include "topoflow/physics.hpp"
#include "topoflow/topderiv.hpp"

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace topoflow {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Every scalar knob of a run. Defaults are the reference device setup.
struct RunConfig {
  int mesh_n = 70;
  double alpha_L = 2.5 / (100.0 * 100.0);
  double alpha_U = 2.5 / (0.0025 * 0.0025);
  double u_t = 0.1;
  double dt = 1e-3;
  double V_L = 0.5;
  double V_U = 0.7;
  double gamma = 0.4;
  double delta = 50.0;
  double eps_theta = 0.035;
  int max_iterations = 500;
  int deflation_rounds = 2;
  std::string penalty_td_variant = "paper";
  std::string output_dir = "out";
  double r_min = 1e-3;
  double exp_clamp_min = -745.0;
  double exp_clamp_max = 500.0;
  double kappa_initial = 1.0;
  double kappa_min = 1.0 / 1024.0;

  ModelParams model() const;
  OptimizerSettings optimizer() const;
  PenaltyParams penalty() const;
  PenaltyTdVariant variant() const;
};

using ConfigOverrides = std::vector<std::pair<std::string, std::string>>;

// `key = value` lines, '#' starts a comment. Unknown keys, unparsable values
// and violated invariants raise ConfigError naming the key and line. Missing
// keys keep their defaults; overrides (command line) are applied last.
RunConfig parse_config(const std::string& text, const ConfigOverrides& overrides = {});
RunConfig parse_config_file(const std::string& path, const ConfigOverrides& overrides = {});

void validate(const RunConfig& config);

// canonical `key = value` echo of a resolved configuration
std::string serialize_config(const RunConfig& config);

const std::vector<std::string>& config_keys();

}  // namespace topoflow
