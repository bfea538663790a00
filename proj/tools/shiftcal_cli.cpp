// Command-line front end for covariate-shift-aware simulator calibration.

#include <CLI11.hpp>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <json.hpp>

#include "shiftcal/csv.hpp"
#include "shiftcal/error.hpp"
#include "shiftcal/pipeline.hpp"

namespace fs = std::filesystem;
using namespace shiftcal;

namespace {

struct CommonOptions {
  std::string config_path;
  std::string preset_name;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string weight_mode;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config_path, "Experiment config file (JSON)")->check(CLI::ExistingFile);
  cmd->add_option("--preset", o.preset_name,
                  "Built-in config: linear-shift, linear-ordinary, assembly-shift, assembly-ordinary");
  cmd->add_option("--seed", o.seed, "Master seed (overrides the config)");
  cmd->add_option("--out", o.out, "Output directory (overrides the config)");
  cmd->add_option("--weight-mode", o.weight_mode, "shift or ordinary")
      ->check(CLI::IsMember({"shift", "ordinary"}));
}

ExperimentConfig resolve(const CommonOptions& o) {
  if (!o.config_path.empty() && !o.preset_name.empty())
    throw InvalidInput("pass either --config or --preset, not both");
  ExperimentConfig cfg = !o.config_path.empty() ? load_config(o.config_path)
                                                : preset(o.preset_name.empty() ? "linear-shift" : o.preset_name);
  if (o.seed) cfg.seed = *o.seed;
  if (!o.out.empty()) cfg.output_dir = o.out;
  if (!o.weight_mode.empty()) cfg.weight_mode = parse_weight_mode(o.weight_mode);
  cfg.validate();
  return cfg;
}

void print_timings(const RunReport& rep) {
  for (const auto& t : rep.timings)
    std::cerr << "  " << std::left << std::setw(26) << t.stage << std::fixed << std::setprecision(3) << t.seconds
              << " s\n";
}

void write_json_file(const fs::path& path, const nlohmann::json& j) { write_text(path, j.dump(2)); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kernel ABC calibration of black-box simulators under covariate shift"};
  app.require_subcommand(1);

  CommonOptions calib_opts;
  std::string dataset_path;
  std::optional<std::size_t> calib_m;
  auto* calibrate = app.add_subcommand("calibrate", "Run the full calibration pipeline once");
  add_common(calibrate, calib_opts);
  calibrate->add_option("--dataset", dataset_path, "Reuse a training CSV (x,y[,beta]) instead of generating one")
      ->check(CLI::ExistingFile);
  calibrate->add_option("--m", calib_m, "Number of prior draws (overrides the config)");

  CommonOptions curve_opts;
  std::vector<std::size_t> curve_m{50, 100, 200, 400};
  std::size_t curve_trials = 10;
  std::vector<double> curve_mh;
  auto* curve = app.add_subcommand("rmse-curve", "RMSE against the number of simulations");
  add_common(curve, curve_opts);
  curve->add_option("--m-values", curve_m, "Simulation budgets")->delimiter(',');
  curve->add_option("--trials", curve_trials, "Independent trials per budget");
  curve->add_option("--mh-proposal-std", curve_mh, "Also run MH with these proposal stddevs")->delimiter(',');

  CommonOptions mh_opts;
  std::optional<double> mh_std;
  std::optional<std::size_t> mh_steps;
  auto* mh = app.add_subcommand("mh-baseline", "Metropolis-Hastings baseline on the weighted likelihood");
  add_common(mh, mh_opts);
  mh->add_option("--proposal-std", mh_std, "Proposal standard deviation");
  mh->add_option("--steps", mh_steps, "Total MH steps");

  CommonOptions sweep_opts;
  std::vector<double> sweep_stds{0.08, 0.06, 0.03};
  auto* sweep = app.add_subcommand("mh-sweep", "Acceptance ratio for each proposal stddev");
  add_common(sweep, sweep_opts);
  sweep->add_option("--proposal-std", sweep_stds, "Proposal stddevs")->delimiter(',');

  CommonOptions t1_opts;
  Theorem1Options t1;
  auto* theorem = app.add_subcommand("theorem1-check", "Embedding distance between Y^n and the brute-force r*");
  add_common(theorem, t1_opts);
  theorem->add_option("--grid", t1.grid_resolution, "Grid points per parameter axis");
  theorem->add_option("--refinements", t1.refinements, "Grid zoom-in rounds");
  theorem->add_option("--m-values", t1.m_values, "Prior draw counts")->delimiter(',');
  theorem->add_option("--seeds", t1.seeds, "Independent datasets");

  CommonOptions plot_opts;
  std::size_t grid_points = 200;
  auto* plot = app.add_subcommand("emit-plot-data", "CSV data for predictive curves and herded parameters");
  add_common(plot, plot_opts);
  plot->add_option("--grid-points", grid_points, "Input grid size for predictive curves");

  CommonOptions herd_opts;
  std::string embedding_path;
  std::size_t herd_steps = 0;
  auto* herd_cmd = app.add_subcommand("herd", "Herd samples from a saved embedding.json");
  add_common(herd_cmd, herd_opts);
  herd_cmd->add_option("--embedding", embedding_path, "embedding.json from calibrate")->required()->check(CLI::ExistingFile);
  herd_cmd->add_option("--steps", herd_steps, "Number of samples (default: embedding size)");

  CommonOptions pred_opts;
  std::string samples_path;
  auto* pred_cmd = app.add_subcommand("predict", "Predict at test inputs from a saved herded.csv");
  add_common(pred_cmd, pred_opts);
  pred_cmd->add_option("--samples", samples_path, "herded.csv from calibrate or herd")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (calibrate->parsed()) {
      auto cfg = resolve(calib_opts);
      if (calib_m) cfg.m = *calib_m;
      CalibrationInputs inputs;
      if (!dataset_path.empty()) {
        auto loaded = load_dataset(dataset_path);
        loaded.data.seed = RunSeeds::from_master(cfg.seed).data;
        inputs.dataset = loaded.data;
        inputs.weights = loaded.beta;
      }
      auto result = run_calibration(cfg, inputs);
      write_calibration_artifacts(result, cfg, cfg.output_dir);
      std::cout << "rmse " << format_real(result.report.rmse) << "\n";
      print_timings(result.report);
    } else if (curve->parsed()) {
      const auto cfg = resolve(curve_opts);
      const auto rows = rmse_curve(cfg, curve_m, curve_trials, curve_mh);
      fs::create_directories(cfg.output_dir);
      const auto hash = config_hash(cfg);
      Eigen::MatrixXd table(static_cast<Eigen::Index>(rows.size()), 6);
      nlohmann::json rows_json = nlohmann::json::array();
      for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto& row = rows[r];
        table.row(static_cast<Eigen::Index>(r)) << static_cast<double>(row.m), row.method == "kabc" ? 0.0 : 1.0,
            row.proposal_std, row.mean_rmse, row.std_rmse, row.mean_acceptance;
        rows_json.push_back({{"m", row.m},
                             {"method", row.method},
                             {"proposal_std", row.proposal_std},
                             {"mean_rmse", row.mean_rmse},
                             {"std_rmse", row.std_rmse},
                             {"mean_acceptance", row.mean_acceptance},
                             {"trial_rmse", row.trial_rmse}});
        std::cout << row.method << " m=" << row.m;
        if (row.method == "mh") std::cout << " sd=" << row.proposal_std << " acc=" << row.mean_acceptance;
        std::cout << " rmse " << row.mean_rmse << " +/- " << row.std_rmse << "\n";
      }
      write_csv(cfg.output_dir / "rmse_curve.csv",
                {"m", "is_mh", "proposal_std", "mean_rmse", "std_rmse", "mean_acceptance"}, table, hash);
      write_json_file(cfg.output_dir / "rmse_curve.json",
                      {{"config_hash", hash}, {"trials", curve_trials}, {"rows", rows_json}});
    } else if (mh->parsed()) {
      auto cfg = resolve(mh_opts);
      if (mh_std) cfg.mh.proposal_std = *mh_std;
      if (mh_steps) cfg.mh.steps = *mh_steps;
      const auto result = run_mh_baseline(cfg);
      write_mh_artifacts(result, cfg, cfg.output_dir);
      std::cout << "rmse " << format_real(result.rmse) << " acceptance " << result.trace.acceptance_ratio()
                << " budget " << simulation_budget(result.trace) << "\n";
    } else if (sweep->parsed()) {
      const auto base = resolve(sweep_opts);
      fs::create_directories(base.output_dir);
      Eigen::MatrixXd table(static_cast<Eigen::Index>(sweep_stds.size()), 3);
      for (std::size_t k = 0; k < sweep_stds.size(); ++k) {
        auto cfg = base;
        cfg.mh.proposal_std = sweep_stds[k];
        const auto result = run_mh_baseline(cfg);
        table.row(static_cast<Eigen::Index>(k)) << sweep_stds[k], result.trace.acceptance_ratio(), result.rmse;
        std::cout << "proposal_std " << sweep_stds[k] << " acceptance " << result.trace.acceptance_ratio() << "\n";
      }
      write_csv(base.output_dir / "mh_sweep.csv", {"proposal_std", "acceptance_ratio", "rmse"}, table,
                config_hash(base));
    } else if (theorem->parsed()) {
      const auto cfg = resolve(t1_opts);
      const auto report = theorem1_check(cfg, t1);
      fs::create_directories(cfg.output_dir);
      Eigen::MatrixXd table(static_cast<Eigen::Index>(report.entries.size()), 4);
      for (std::size_t k = 0; k < report.entries.size(); ++k) {
        const auto& e = report.entries[k];
        table.row(static_cast<Eigen::Index>(k)) << static_cast<double>(e.seed_index), static_cast<double>(e.m),
            e.epsilon, e.distance;
      }
      write_csv(cfg.output_dir / "theorem1.csv", {"seed_index", "m", "epsilon", "distance"}, table,
                report.config_hash);
      write_json_file(cfg.output_dir / "theorem1.json", report.to_json());
      for (const auto& [m, d] : report.mean_distance) std::cout << "m=" << m << " mean distance " << d << "\n";
      for (const auto& s : report.seeds)
        if (s.optimum.on_boundary) std::cout << "warning: grid too coarse (optimum on the search-box boundary)\n";
    } else if (plot->parsed()) {
      const auto cfg = resolve(plot_opts);
      for (const auto& f : emit_plot_data(cfg, cfg.output_dir, grid_points)) std::cout << f << "\n";
    } else if (herd_cmd->parsed()) {
      const auto cfg = resolve(herd_opts);
      std::ifstream in(embedding_path);
      const auto j = nlohmann::json::parse(in);
      const auto emb = embedding_from_json(j);
      Eigen::MatrixXd extra;
      if (cfg.extra_pool > 0) extra = sample_prior(cfg.prior, cfg.extra_pool, RunSeeds::from_master(cfg.seed).pool);
      const auto samples = herd(emb, default_pool(emb, extra), herd_steps ? herd_steps : emb.size());
      fs::create_directories(cfg.output_dir);
      std::vector<std::string> header;
      for (std::size_t k = 0; k < emb.dim(); ++k) header.push_back("theta_" + std::to_string(k));
      write_csv(cfg.output_dir / "herded.csv", header, samples.samples, j.value("config_hash", std::string()));
      std::cout << "herded " << samples.size() << " samples\n";
    } else if (pred_cmd->parsed()) {
      const auto cfg = resolve(pred_opts);
      const auto samples = load_parameter_rows(samples_path);
      const auto sim = make_simulator(cfg.simulator);
      const auto seeds = RunSeeds::from_master(cfg.seed);
      const auto tests = generate_test_inputs(cfg.resolved_test_density(), cfg.resolved_test_size(), seeds.test);
      const double value = rmse(make_truth(cfg, sim), tests, *sim, samples, seeds.predict);
      const auto preds = predict_all(*sim, tests, samples, seeds.predict);
      fs::create_directories(cfg.output_dir);
      const auto hash = config_hash(cfg);
      const std::size_t width = static_cast<std::size_t>(samples.rows());
      std::vector<std::string> header{"x"};
      for (std::size_t k = 0; k < width; ++k) header.push_back("y_" + std::to_string(k + 1));
      header.push_back("mean");
      Eigen::MatrixXd rows(tests.size(), static_cast<Eigen::Index>(width + 2));
      for (Eigen::Index i = 0; i < tests.size(); ++i) {
        const auto& p = preds[static_cast<std::size_t>(i)];
        rows(i, 0) = p.x;
        for (std::size_t k = 0; k < width; ++k) rows(i, static_cast<Eigen::Index>(k + 1)) = p.outputs[k];
        rows(i, static_cast<Eigen::Index>(width + 1)) = p.mean;
      }
      write_csv(cfg.output_dir / "predictive.csv", header, rows, hash);
      write_json_file(cfg.output_dir / "predict_report.json", {{"config_hash", hash}, {"rmse", value}});
      std::cout << "rmse " << format_real(value) << "\n";
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
