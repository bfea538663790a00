#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <json.hpp>
#include <optional>
#include <string>

#include "shiftcal/baseline.hpp"
#include "shiftcal/kabc.hpp"
#include "shiftcal/sim.hpp"
#include "shiftcal/weights.hpp"

namespace shiftcal {

enum class WeightMode { shift, ordinary };
enum class TestDensity { automatic, q0, q1 };

WeightMode parse_weight_mode(const std::string& s);
std::string to_string(WeightMode mode);

/// Regression function R: the cubic benchmark, or a simulator run at one
/// parameter below a breakpoint and another at or above it.
struct TruthSpec {
  std::string kind = "cubic";  // "cubic" | "piecewise"
  Eigen::VectorXd theta_lo;
  Eigen::VectorXd theta_hi;
  double breakpoint = 0.0;
};

struct ScheduleSpec {
  double constant = 1.0;
  double decay = 2.0;
};

struct ExperimentConfig {
  std::string name = "experiment";
  std::string simulator = "linear";
  TruthSpec truth;

  DensitySpec q0 = DensitySpec::normal(0.0, 1.0);
  DensitySpec q1 = DensitySpec::normal(0.0, 1.0);
  NoiseSpec noise{1.0};
  PriorSpec prior = PriorSpec::diagonal_normal(Eigen::VectorXd::Zero(2), Eigen::VectorXd::Ones(2));

  std::size_t n = 100;
  std::size_t m = 100;
  std::size_t herd_steps = 0;  // 0 means T = m
  std::size_t extra_pool = 0;  // fresh prior draws appended to the herding pool
  std::size_t test_size = 0;   // 0 means n
  TestDensity test_density = TestDensity::automatic;

  double epsilon = 1.0;
  std::optional<ScheduleSpec> schedule;
  bool median_bandwidth = true;
  double output_bandwidth_sq = 1.0;
  double param_bandwidth_sq = 1.0;
  WeightMode weight_mode = WeightMode::shift;

  MHConfig mh;
  std::uint64_t seed = 0;
  std::filesystem::path output_dir = "out";

  std::size_t resolved_herd_steps() const noexcept { return herd_steps ? herd_steps : m; }
  std::size_t resolved_test_size() const noexcept { return test_size ? test_size : n; }
  double resolved_epsilon() const;
  /// Test inputs follow q1 under covariate shift and q0 otherwise, unless pinned.
  const DensitySpec& resolved_test_density() const noexcept;

  void validate() const;
};

ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& cfg);
ExperimentConfig load_config(const std::filesystem::path& path);

/// 16 hex digits of FNV-1a over the canonical JSON (output directory excluded).
std::string config_hash(const ExperimentConfig& cfg);

/// Built-in settings: "linear-shift" (cubic truth, linear model) and
/// "assembly-shift" (piecewise assembly line).
ExperimentConfig preset(const std::string& name);

RegressionFunction make_truth(const ExperimentConfig& cfg, const SimulatorPtr& sim);
std::string describe_truth(const ExperimentConfig& cfg);

}  // namespace shiftcal
