#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <json.hpp>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "shiftcal/baseline.hpp"
#include "shiftcal/config.hpp"
#include "shiftcal/herd.hpp"
#include "shiftcal/kabc.hpp"
#include "shiftcal/predict.hpp"

namespace shiftcal {

/// Per-purpose seeds split from one master seed.
struct RunSeeds {
  std::uint64_t master = 0;
  std::uint64_t data = 0;
  std::uint64_t prior = 0;
  std::uint64_t pseudo = 0;
  std::uint64_t pool = 0;
  std::uint64_t test = 0;
  std::uint64_t predict = 0;
  std::uint64_t mh = 0;

  static RunSeeds from_master(std::uint64_t master);
  nlohmann::json to_json() const;
};

struct StageTiming {
  std::string stage;
  double seconds = 0.0;
};

struct RunReport {
  double rmse = 0.0;
  std::string config_hash;
  RunSeeds seeds;
  WeightMode weight_mode = WeightMode::shift;
  double output_bandwidth_sq = 0.0;
  double param_bandwidth_sq = 0.0;
  double epsilon = 0.0;
  double weight_sum = 0.0;
  std::vector<StageTiming> timings;  // wall clock; printed, never written to artifacts
  std::vector<std::string> artifacts;

  /// Deterministic summary (timings excluded).
  nlohmann::json to_json() const;
};

struct CalibrationInputs {
  std::optional<Dataset> dataset;          // replaces the generated training data
  std::optional<ImportanceWeights> weights; // precomputed beta, overrides the weight mode
};

struct CalibrationResult {
  Dataset data;
  ImportanceWeights beta{Eigen::VectorXd::Ones(1)};
  Eigen::MatrixXd draws;
  Eigen::MatrixXd pseudo;
  PosteriorEmbedding embedding;
  HerdedSamples herded;
  Eigen::VectorXd test_inputs;
  std::vector<double> truth_values;
  std::vector<PredictiveSample> predictions;
  RunReport report;
};

/// Data -> weights -> prior draws -> pseudo-outputs -> bandwidths ->
/// embedding -> herding -> prediction -> RMSE. Failures are rethrown as
/// StageError carrying the stage name.
CalibrationResult run_calibration(const ExperimentConfig& cfg, const CalibrationInputs& inputs = {});

/// Writes dataset.csv/.json, weights.csv, embedding.json, herded.csv,
/// predictive.csv and report.json into `dir`. Returns the file names.
std::vector<std::string> write_calibration_artifacts(CalibrationResult& result,
                                                     const ExperimentConfig& cfg,
                                                     const std::filesystem::path& dir);

struct LoadedDataset {
  Dataset data;
  std::optional<ImportanceWeights> beta;  // from an optional `beta` column
};

LoadedDataset load_dataset(const std::filesystem::path& csv);
void write_dataset(const std::filesystem::path& dir, const Dataset& data, const ExperimentConfig& cfg);

Eigen::MatrixXd load_parameter_rows(const std::filesystem::path& csv);

/// Importance weights for the configured mode (ones for ordinary).
ImportanceWeights weights_for(const ExperimentConfig& cfg, const Eigen::VectorXd& xs);

/// Bandwidths by median heuristic or the fixed config values. Falls back to
/// 1.0 (with a warning) when fewer than two distinct draws exist.
std::pair<double, double> resolve_bandwidths(const ExperimentConfig& cfg, const Eigen::MatrixXd& draws,
                                             const Eigen::MatrixXd& pseudo, const ImportanceWeights& beta);

struct MHResult {
  Dataset data;
  ImportanceWeights beta{Eigen::VectorXd::Ones(1)};
  MHTrace trace;
  Eigen::VectorXd test_inputs;
  std::vector<double> truth_values;
  std::vector<PredictiveSample> predictions;
  double rmse = 0.0;
  RunSeeds seeds;
  std::string config_hash;
};

/// MH on the importance-weighted likelihood times the prior, started at the
/// prior center, predicting with the post-burn-in states.
MHResult run_mh_baseline(const ExperimentConfig& cfg);
std::vector<std::string> write_mh_artifacts(const MHResult& result, const ExperimentConfig& cfg,
                                            const std::filesystem::path& dir);

struct CurveRow {
  std::size_t m = 0;
  std::string method;       // "kabc" or "mh"
  double proposal_std = 0.0;
  double mean_rmse = 0.0;
  double std_rmse = 0.0;    // sample standard deviation; 0 for one trial
  double mean_acceptance = 0.0;
  std::vector<double> trial_rmse;
};

/// RMSE against the simulation budget m, over independent trials. For MH the
/// budget is the total step count. Trial t uses master seed derive(seed, "trial", t).
std::vector<CurveRow> rmse_curve(const ExperimentConfig& cfg, const std::vector<std::size_t>& m_values,
                                 std::size_t trials, const std::vector<double>& mh_proposal_stds = {});
std::uint64_t trial_seed(std::uint64_t master, std::size_t trial);

struct GridOptimum {
  Eigen::VectorXd theta;
  double loss = 0.0;
  Eigen::VectorXd spacing;  // final grid spacing per axis (empty for random search)
  bool on_boundary = false;
};

/// Minimizes sum_i beta_i (Y_i - r(X_i, theta))^2 over the prior's search box:
/// a dense grid refined around the best cell for dimension <= 2, otherwise the
/// best of resolution^2 prior draws.
GridOptimum brute_force_optimum(const Simulator& sim, const Dataset& data, const ImportanceWeights& beta,
                                const PriorSpec& prior, std::size_t resolution, std::size_t refinements,
                                std::uint64_t seed);

/// Closed-form (X^T B X)^{-1} X^T B Y for the intercept-slope model.
Eigen::Vector2d weighted_least_squares(const Eigen::VectorXd& xs, const Eigen::VectorXd& ys,
                                       const Eigen::VectorXd& beta);

struct Theorem1Options {
  std::size_t grid_resolution = 201;
  std::size_t refinements = 2;  // a third level falls below double-precision loss resolution
  std::vector<std::size_t> m_values{100, 800};
  std::size_t seeds = 5;
};

struct Theorem1Seed {
  std::uint64_t seed = 0;
  GridOptimum optimum;
  std::optional<Eigen::Vector2d> wls;  // linear simulator only
};

struct Theorem1Entry {
  std::size_t seed_index = 0;
  std::size_t m = 0;
  double epsilon = 0.0;
  double distance = 0.0;
};

struct Theorem1Report {
  std::vector<Theorem1Seed> seeds;
  std::vector<Theorem1Entry> entries;
  std::map<std::size_t, double> mean_distance;  // keyed by m
  std::string config_hash;

  nlohmann::json to_json() const;
};

/// RKHS distance between the embedding built from the observed Y and the one
/// built from r* = r^n(theta*), theta* found by brute force.
Theorem1Report theorem1_check(const ExperimentConfig& cfg, const Theorem1Options& options);

/// Figure data: training points, predictive means for both weight modes on an
/// input grid, and herded parameters per mode.
std::vector<std::string> emit_plot_data(const ExperimentConfig& cfg, const std::filesystem::path& dir,
                                        std::size_t grid_points = 200);

}  // namespace shiftcal
