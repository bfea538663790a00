#include "shiftcal/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iostream>
#include <numeric>

#include "shiftcal/csv.hpp"
#include "shiftcal/error.hpp"
#include "shiftcal/parallel.hpp"

namespace shiftcal {

using nlohmann::json;
namespace fs = std::filesystem;

RunSeeds RunSeeds::from_master(std::uint64_t master) {
  RunSeeds s;
  s.master = master;
  s.data = derive_seed(master, "data");
  s.prior = derive_seed(master, "prior");
  s.pseudo = derive_seed(master, "pseudo");
  s.pool = derive_seed(master, "pool");
  s.test = derive_seed(master, "test");
  s.predict = derive_seed(master, "predict");
  s.mh = derive_seed(master, "mh");
  return s;
}

json RunSeeds::to_json() const {
  return {{"master", master}, {"data", data},   {"prior", prior},     {"pseudo", pseudo},
          {"pool", pool},     {"test", test},   {"predict", predict}, {"mh", mh}};
}

json RunReport::to_json() const {
  return {{"rmse", rmse},
          {"config_hash", config_hash},
          {"seeds", seeds.to_json()},
          {"weight_mode", to_string(weight_mode)},
          {"output_bandwidth_sq", output_bandwidth_sq},
          {"param_bandwidth_sq", param_bandwidth_sq},
          {"epsilon", epsilon},
          {"weight_sum", weight_sum},
          {"artifacts", artifacts}};
}

namespace {

template <typename F>
auto run_stage(const char* name, std::vector<StageTiming>& timings, F&& body) {
  const auto start = std::chrono::steady_clock::now();
  try {
    auto result = body();
    timings.push_back({name, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()});
    return result;
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

DataGeneratingProcess make_dgp(const ExperimentConfig& cfg, const SimulatorPtr& sim) {
  DataGeneratingProcess dgp;
  dgp.truth = make_truth(cfg, sim);
  dgp.noise = cfg.noise;
  dgp.input_density = cfg.q0;
  dgp.description = describe_truth(cfg) + "; x ~ " + cfg.q0.describe() +
                    "; noise variance " + format_real(cfg.noise.variance);
  return dgp;
}

std::vector<double> truth_at(const RegressionFunction& truth, const Eigen::VectorXd& xs, std::uint64_t seed) {
  std::vector<double> out(static_cast<std::size_t>(xs.size()));
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = truth(xs(static_cast<Eigen::Index>(i)), derive_seed(seed, "truth", {i}));
  return out;
}

std::vector<double> means_of(const std::vector<PredictiveSample>& preds) {
  std::vector<double> out;
  out.reserve(preds.size());
  for (const auto& p : preds) out.push_back(p.mean);
  return out;
}

std::vector<std::string> theta_header(std::size_t d) {
  std::vector<std::string> h;
  for (std::size_t k = 0; k < d; ++k) h.push_back("theta_" + std::to_string(k));
  return h;
}

void write_predictive(const fs::path& path, const std::vector<PredictiveSample>& preds,
                      const std::string& hash) {
  const std::size_t width = preds.empty() ? 0 : preds.front().outputs.size();
  std::vector<std::string> header{"x"};
  for (std::size_t j = 0; j < width; ++j) header.push_back("y_" + std::to_string(j + 1));
  header.push_back("mean");
  Eigen::MatrixXd rows(static_cast<Eigen::Index>(preds.size()), static_cast<Eigen::Index>(width + 2));
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    rows(r, 0) = preds[i].x;
    for (std::size_t j = 0; j < width; ++j) rows(r, static_cast<Eigen::Index>(j + 1)) = preds[i].outputs[j];
    rows(r, static_cast<Eigen::Index>(width + 1)) = preds[i].mean;
  }
  write_csv(path, header, rows, hash);
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2)); }

}  // namespace

ImportanceWeights weights_for(const ExperimentConfig& cfg, const Eigen::VectorXd& xs) {
  return cfg.weight_mode == WeightMode::shift ? importance_weights(xs, cfg.q0, cfg.q1)
                                              : ordinary_weights(static_cast<std::size_t>(xs.size()));
}

std::pair<double, double> resolve_bandwidths(const ExperimentConfig& cfg, const Eigen::MatrixXd& draws,
                                             const Eigen::MatrixXd& pseudo, const ImportanceWeights& beta) {
  if (!cfg.median_bandwidth) return {cfg.output_bandwidth_sq, cfg.param_bandwidth_sq};
  auto median_or_unit = [](const Eigen::MatrixXd& pts, const std::optional<Eigen::VectorXd>& w,
                           const char* what) {
    try {
      return median_heuristic(pts, w);
    } catch (const DegenerateBandwidth& e) {
      std::clog << "warning: " << what << " bandwidth falls back to 1.0 (" << e.what() << ")\n";
      return 1.0;
    }
  };
  return {median_or_unit(pseudo, beta.values(), "output"), median_or_unit(draws, std::nullopt, "parameter")};
}

CalibrationResult run_calibration(const ExperimentConfig& cfg, const CalibrationInputs& inputs) {
  cfg.validate();
  CalibrationResult res;
  auto& rep = res.report;
  rep.config_hash = config_hash(cfg);
  rep.seeds = RunSeeds::from_master(cfg.seed);
  rep.weight_mode = cfg.weight_mode;
  const auto& seeds = rep.seeds;
  const auto sim = make_simulator(cfg.simulator);
  const auto truth = make_truth(cfg, sim);

  res.data = run_stage("generate_dataset", rep.timings, [&] {
    return inputs.dataset ? *inputs.dataset : generate_dataset(make_dgp(cfg, sim), cfg.n, seeds.data);
  });
  res.beta = run_stage("importance_weights", rep.timings, [&] {
    if (inputs.weights) {
      if (inputs.weights->size() != res.data.size())
        throw DimensionMismatch("supplied weights do not match the dataset length");
      return *inputs.weights;
    }
    return weights_for(cfg, res.data.xs);
  });
  res.draws = run_stage("sample_prior", rep.timings, [&] { return sample_prior(cfg.prior, cfg.m, seeds.prior); });
  res.pseudo = run_stage("simulate_pseudo_outputs", rep.timings, [&] {
    return simulate_pseudo_outputs(*sim, res.draws, res.data.xs, seeds.pseudo);
  });
  const auto [out_bw, param_bw] = run_stage("median_heuristic", rep.timings, [&] {
    return resolve_bandwidths(cfg, res.draws, res.pseudo, res.beta);
  });
  rep.output_bandwidth_sq = out_bw;
  rep.param_bandwidth_sq = param_bw;
  rep.epsilon = cfg.resolved_epsilon();
  res.embedding = run_stage("build_embedding", rep.timings, [&] {
    return build_embedding(res.draws, res.pseudo, res.data.ys, res.beta, out_bw, param_bw, rep.epsilon);
  });
  rep.weight_sum = res.embedding.weights.sum();
  res.herded = run_stage("herd", rep.timings, [&] {
    Eigen::MatrixXd extra;
    if (cfg.extra_pool > 0) extra = sample_prior(cfg.prior, cfg.extra_pool, seeds.pool);
    return herd(res.embedding, default_pool(res.embedding, extra), cfg.resolved_herd_steps());
  });
  res.test_inputs = run_stage("generate_test_inputs", rep.timings, [&] {
    return generate_test_inputs(cfg.resolved_test_density(), cfg.resolved_test_size(), seeds.test);
  });
  res.predictions = run_stage("predict", rep.timings, [&] {
    return predict_all(*sim, res.test_inputs, res.herded.samples, seeds.predict);
  });
  rep.rmse = run_stage("rmse", rep.timings, [&] {
    res.truth_values = truth_at(truth, res.test_inputs, seeds.predict);
    return rmse_from_means(res.truth_values, means_of(res.predictions));
  });
  return res;
}

void write_dataset(const fs::path& dir, const Dataset& data, const ExperimentConfig& cfg) {
  const auto hash = config_hash(cfg);
  Eigen::MatrixXd rows(data.xs.size(), 2);
  rows << data.xs, data.ys;
  write_csv(dir / "dataset.csv", {"x", "y"}, rows, hash);
  write_json(dir / "dataset.json", {{"config_hash", hash},
                                    {"seed", data.seed},
                                    {"n", data.size()},
                                    {"generator", data.generator}});
}

std::vector<std::string> write_calibration_artifacts(CalibrationResult& result, const ExperimentConfig& cfg,
                                                     const fs::path& dir) {
  fs::create_directories(dir);
  const auto& hash = result.report.config_hash;
  std::vector<std::string> files{"dataset.csv", "dataset.json", "weights.csv", "embedding.json",
                                 "herded.csv",  "predictive.csv", "report.json"};
  write_dataset(dir, result.data, cfg);

  Eigen::MatrixXd wrows(result.data.xs.size(), 2);
  wrows << result.data.xs, result.beta.values();
  write_csv(dir / "weights.csv", {"x", "beta"}, wrows, hash);

  json emb = embedding_to_json(result.embedding);
  emb["config_hash"] = hash;
  emb["seeds"] = result.report.seeds.to_json();
  write_json(dir / "embedding.json", emb);

  write_csv(dir / "herded.csv", theta_header(result.embedding.dim()), result.herded.samples, hash);
  write_predictive(dir / "predictive.csv", result.predictions, hash);

  result.report.artifacts = files;
  write_json(dir / "report.json", result.report.to_json());
  return files;
}

LoadedDataset load_dataset(const fs::path& csv) {
  const auto table = read_csv(csv);
  const auto xc = table.column("x");
  const auto yc = table.column("y");
  if (xc < 0 || yc < 0) throw InvalidInput(csv.string() + " needs 'x' and 'y' columns");
  if (table.rows.rows() < 1) throw InvalidInput(csv.string() + " has no data rows");
  LoadedDataset out;
  out.data.xs = table.rows.col(xc);
  out.data.ys = table.rows.col(yc);
  out.data.generator = "loaded from " + csv.filename().string();
  if (const auto bc = table.column("beta"); bc >= 0) out.beta = ImportanceWeights(table.rows.col(bc));
  return out;
}

Eigen::MatrixXd load_parameter_rows(const fs::path& csv) {
  const auto table = read_csv(csv);
  if (table.rows.rows() < 1) throw InvalidInput(csv.string() + " has no parameter rows");
  return table.rows;
}

MHResult run_mh_baseline(const ExperimentConfig& cfg) {
  cfg.validate();
  MHResult res;
  res.seeds = RunSeeds::from_master(cfg.seed);
  res.config_hash = config_hash(cfg);
  const auto sim = make_simulator(cfg.simulator);
  const auto truth = make_truth(cfg, sim);
  std::vector<StageTiming> timings;

  res.data = run_stage("generate_dataset", timings,
                       [&] { return generate_dataset(make_dgp(cfg, sim), cfg.n, res.seeds.data); });
  res.beta = run_stage("importance_weights", timings, [&] { return weights_for(cfg, res.data.xs); });
  res.trace = run_stage("mh_sample", timings, [&] {
    MHConfig mh = cfg.mh;
    mh.seed = res.seeds.mh;
    const LogTarget target = [&](const Eigen::VectorXd& theta, std::size_t step) {
      const double lp = cfg.prior.log_density(theta);
      if (!std::isfinite(lp)) return lp;
      return lp + weighted_log_likelihood(theta, res.data, res.beta, *sim, mh.noise_var,
                                          derive_seed(res.seeds.mh, "step", {step}));
    };
    return mh_sample(target, cfg.prior.center(), mh);
  });
  res.test_inputs = run_stage("generate_test_inputs", timings, [&] {
    return generate_test_inputs(cfg.resolved_test_density(), cfg.resolved_test_size(), res.seeds.test);
  });
  res.predictions = run_stage("predict", timings, [&] {
    Eigen::MatrixXd samples = res.trace.post_burn_in();
    if (samples.rows() == 0) samples = res.trace.states.bottomRows(1);
    return predict_all(*sim, res.test_inputs, samples, res.seeds.predict);
  });
  res.truth_values = truth_at(truth, res.test_inputs, res.seeds.predict);
  res.rmse = rmse_from_means(res.truth_values, means_of(res.predictions));
  return res;
}

std::vector<std::string> write_mh_artifacts(const MHResult& result, const ExperimentConfig& cfg,
                                            const fs::path& dir) {
  fs::create_directories(dir);
  const auto d = result.trace.states.cols();
  std::vector<std::string> header{"step"};
  for (const auto& h : theta_header(static_cast<std::size_t>(d))) header.push_back(h);
  header.push_back("accepted");
  Eigen::MatrixXd rows(result.trace.states.rows(), d + 2);
  for (Eigen::Index s = 0; s < rows.rows(); ++s) {
    rows(s, 0) = static_cast<double>(s + 1);
    rows.block(s, 1, 1, d) = result.trace.states.row(s);
    rows(s, d + 1) = result.trace.accepted[static_cast<std::size_t>(s)] ? 1.0 : 0.0;
  }
  write_csv(dir / "mh_trace.csv", header, rows, result.config_hash);
  write_predictive(dir / "mh_predictive.csv", result.predictions, result.config_hash);
  std::vector<std::string> files{"mh_trace.csv", "mh_predictive.csv", "mh_report.json"};
  write_json(dir / "mh_report.json", {{"rmse", result.rmse},
                                      {"config_hash", result.config_hash},
                                      {"seeds", result.seeds.to_json()},
                                      {"weight_mode", to_string(cfg.weight_mode)},
                                      {"proposal_std", cfg.mh.proposal_std},
                                      {"steps", result.trace.steps()},
                                      {"burn_in_steps", result.trace.burn_in_steps},
                                      {"acceptance_ratio", result.trace.acceptance_ratio()},
                                      {"simulation_budget", simulation_budget(result.trace)},
                                      {"artifacts", files}});
  return files;
}

std::uint64_t trial_seed(std::uint64_t master, std::size_t trial) {
  return derive_seed(master, "trial", {static_cast<std::uint64_t>(trial)});
}

std::vector<CurveRow> rmse_curve(const ExperimentConfig& cfg, const std::vector<std::size_t>& m_values,
                                 std::size_t trials, const std::vector<double>& mh_proposal_stds) {
  if (trials < 1) throw InvalidInput("rmse curve needs at least one trial");
  if (m_values.empty()) throw InvalidInput("rmse curve needs at least one m value");

  struct Job {
    std::size_t row;
    std::size_t trial;
  };
  std::vector<CurveRow> rows;
  for (auto m : m_values) {
    rows.push_back({m, "kabc", 0.0, 0.0, 0.0, 0.0, std::vector<double>(trials)});
    for (double sd : mh_proposal_stds) rows.push_back({m, "mh", sd, 0.0, 0.0, 0.0, std::vector<double>(trials)});
  }
  std::vector<std::vector<double>> acceptance(rows.size(), std::vector<double>(trials, 0.0));
  std::vector<Job> jobs;
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t t = 0; t < trials; ++t) jobs.push_back({r, t});

  parallel_for(jobs.size(), [&](std::size_t k) {
    const auto [r, t] = jobs[k];
    ExperimentConfig trial_cfg = cfg;
    trial_cfg.seed = trial_seed(cfg.seed, t);
    if (rows[r].method == "kabc") {
      trial_cfg.m = rows[r].m;
      rows[r].trial_rmse[t] = run_calibration(trial_cfg).report.rmse;
    } else {
      trial_cfg.mh.steps = rows[r].m;
      trial_cfg.mh.proposal_std = rows[r].proposal_std;
      const auto mh = run_mh_baseline(trial_cfg);
      rows[r].trial_rmse[t] = mh.rmse;
      acceptance[r][t] = mh.trace.acceptance_ratio();
    }
  });

  for (std::size_t r = 0; r < rows.size(); ++r) {
    auto& row = rows[r];
    const double n = static_cast<double>(trials);
    row.mean_rmse = pairwise_sum(row.trial_rmse) / n;
    double ss = 0.0;
    for (double v : row.trial_rmse) ss += (v - row.mean_rmse) * (v - row.mean_rmse);
    row.std_rmse = trials > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    row.mean_acceptance = pairwise_sum(acceptance[r]) / n;
  }
  return rows;
}

Eigen::Vector2d weighted_least_squares(const Eigen::VectorXd& xs, const Eigen::VectorXd& ys,
                                       const Eigen::VectorXd& beta) {
  if (xs.size() != ys.size() || xs.size() != beta.size())
    throw DimensionMismatch("weighted least squares inputs differ in length");
  Eigen::MatrixXd design(xs.size(), 2);
  design.col(0).setOnes();
  design.col(1) = xs;
  const Eigen::MatrixXd xtb = design.transpose() * beta.asDiagonal();
  return (xtb * design).ldlt().solve(xtb * ys);
}

namespace {

double weighted_loss(const Simulator& sim, const Dataset& data, const ImportanceWeights& beta,
                     const Eigen::VectorXd& theta, std::uint64_t seed) {
  double loss = 0.0;
  for (Eigen::Index i = 0; i < data.xs.size(); ++i) {
    const double r = data.ys(i) - sim.evaluate(data.xs(i), theta, derive_seed(seed, "loss", {static_cast<std::uint64_t>(i)}));
    loss += beta.values()(i) * r * r;
  }
  return loss;
}

// Exhaustive search over a regular grid on [lo, hi]; returns the best point and
// its multi-index.
std::pair<Eigen::VectorXd, std::vector<std::size_t>> grid_argmin(
    const std::function<double(const Eigen::VectorXd&)>& loss, const Eigen::VectorXd& lo,
    const Eigen::VectorXd& hi, std::size_t resolution, double& best_loss) {
  const auto d = lo.size();
  std::vector<std::size_t> idx(static_cast<std::size_t>(d), 0), best_idx;
  Eigen::VectorXd theta(d), best;
  best_loss = std::numeric_limits<double>::infinity();
  auto coord = [&](Eigen::Index k, std::size_t i) {
    return resolution == 1 ? 0.5 * (lo(k) + hi(k))
                           : lo(k) + (hi(k) - lo(k)) * static_cast<double>(i) / static_cast<double>(resolution - 1);
  };
  while (true) {
    for (Eigen::Index k = 0; k < d; ++k) theta(k) = coord(k, idx[static_cast<std::size_t>(k)]);
    const double l = loss(theta);
    if (l < best_loss) {
      best_loss = l;
      best = theta;
      best_idx = idx;
    }
    std::size_t k = 0;
    while (k < idx.size() && ++idx[k] == resolution) idx[k++] = 0;
    if (k == idx.size()) break;
  }
  return {best, best_idx};
}

}  // namespace

GridOptimum brute_force_optimum(const Simulator& sim, const Dataset& data, const ImportanceWeights& beta,
                                const PriorSpec& prior, std::size_t resolution, std::size_t refinements,
                                std::uint64_t seed) {
  if (resolution < 2) throw InvalidInput("grid resolution must be at least 2");
  const auto loss = [&](const Eigen::VectorXd& theta) { return weighted_loss(sim, data, beta, theta, seed); };
  GridOptimum out;
  auto [lo, hi] = prior.search_box();

  if (prior.dim() > 2) {
    const Eigen::MatrixXd draws = sample_prior(prior, resolution * resolution, derive_seed(seed, "search"));
    out.loss = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < draws.rows(); ++j) {
      const Eigen::VectorXd theta = draws.row(j).transpose();
      const double l = loss(theta);
      if (l < out.loss) {
        out.loss = l;
        out.theta = theta;
      }
    }
    return out;
  }

  auto [best, best_idx] = grid_argmin(loss, lo, hi, resolution, out.loss);
  for (auto i : best_idx) out.on_boundary = out.on_boundary || i == 0 || i + 1 == resolution;
  Eigen::VectorXd spacing = (hi - lo) / static_cast<double>(resolution - 1);
  for (std::size_t r = 0; r < refinements; ++r) {
    // Zoom to +/- one cell; on an elongated valley the optimum can lie outside
    // that window, so slide it while the best point sits on an interior edge.
    const Eigen::VectorXd half = spacing;
    Eigen::VectorXd rlo, rhi;
    for (int slide = 0; slide < 200; ++slide) {
      rlo = (best - half).cwiseMax(lo);
      rhi = (best + half).cwiseMin(hi);
      double l = 0.0;
      auto [b, bi] = grid_argmin(loss, rlo, rhi, resolution, l);
      bool at_edge = false;
      for (std::size_t k = 0; k < bi.size(); ++k) {
        const auto kk = static_cast<Eigen::Index>(k);
        at_edge = at_edge || (bi[k] == 0 && rlo(kk) > lo(kk)) || (bi[k] + 1 == resolution && rhi(kk) < hi(kk));
      }
      if (!(l <= out.loss)) break;
      out.loss = l;
      const bool moved = b != best;
      best = b;
      if (!at_edge || !moved) break;
    }
    spacing = (rhi - rlo) / static_cast<double>(resolution - 1);
  }
  out.theta = best;
  out.spacing = spacing;
  return out;
}

json Theorem1Report::to_json() const {
  json seeds_json = json::array();
  for (const auto& s : seeds) {
    json e = {{"seed", s.seed},
              {"theta_star", std::vector<double>(s.optimum.theta.data(), s.optimum.theta.data() + s.optimum.theta.size())},
              {"loss", s.optimum.loss},
              {"grid_spacing", std::vector<double>(s.optimum.spacing.data(), s.optimum.spacing.data() + s.optimum.spacing.size())},
              {"grid_too_coarse", s.optimum.on_boundary}};
    if (s.wls) e["wls"] = {(*s.wls)(0), (*s.wls)(1)};
    seeds_json.push_back(std::move(e));
  }
  json entries_json = json::array();
  for (const auto& e : entries)
    entries_json.push_back({{"seed_index", e.seed_index}, {"m", e.m}, {"epsilon", e.epsilon}, {"distance", e.distance}});
  json means = json::array();
  for (const auto& [m, d] : mean_distance) means.push_back({{"m", m}, {"mean_distance", d}});
  return {{"config_hash", config_hash}, {"seeds", seeds_json}, {"entries", entries_json}, {"mean_distance", means}};
}

Theorem1Report theorem1_check(const ExperimentConfig& cfg, const Theorem1Options& options) {
  cfg.validate();
  if (options.seeds < 1 || options.m_values.empty()) throw InvalidInput("theorem1 check needs seeds and m values");
  const auto sim = make_simulator(cfg.simulator);
  Theorem1Report report;
  report.config_hash = config_hash(cfg);
  report.seeds.resize(options.seeds);
  report.entries.resize(options.seeds * options.m_values.size());

  parallel_for(options.seeds, [&](std::size_t s) {
    const auto seeds = RunSeeds::from_master(trial_seed(cfg.seed, s));
    const Dataset data = generate_dataset(make_dgp(cfg, sim), cfg.n, seeds.data);
    const ImportanceWeights beta = weights_for(cfg, data.xs);
    auto& seed_report = report.seeds[s];
    seed_report.seed = seeds.master;
    seed_report.optimum = brute_force_optimum(*sim, data, beta, cfg.prior, options.grid_resolution,
                                              options.refinements, seeds.data);
    if (cfg.simulator == "linear") seed_report.wls = weighted_least_squares(data.xs, data.ys, beta.values());

    Eigen::VectorXd r_star(data.xs.size());
    for (Eigen::Index i = 0; i < data.xs.size(); ++i)
      r_star(i) = sim->evaluate(data.xs(i), seed_report.optimum.theta,
                                derive_seed(seeds.master, "rstar", {static_cast<std::uint64_t>(i)}));

    for (std::size_t k = 0; k < options.m_values.size(); ++k) {
      ExperimentConfig mcfg = cfg;
      mcfg.m = options.m_values[k];
      const Eigen::MatrixXd draws = sample_prior(cfg.prior, mcfg.m, seeds.prior);
      const Eigen::MatrixXd pseudo = simulate_pseudo_outputs(*sim, draws, data.xs, seeds.pseudo);
      const auto [out_bw, param_bw] = resolve_bandwidths(mcfg, draws, pseudo, beta);
      const double eps = mcfg.resolved_epsilon();
      const auto from_data = build_embedding(draws, pseudo, data.ys, beta, out_bw, param_bw, eps);
      const auto from_opt = build_embedding(draws, pseudo, r_star, beta, out_bw, param_bw, eps);
      report.entries[s * options.m_values.size() + k] = {s, mcfg.m, eps, embedding_distance(from_data, from_opt)};
    }
  });

  for (auto m : options.m_values) {
    std::vector<double> ds;
    for (const auto& e : report.entries)
      if (e.m == m) ds.push_back(e.distance);
    report.mean_distance[m] = pairwise_sum(ds) / static_cast<double>(ds.size());
  }
  return report;
}

std::vector<std::string> emit_plot_data(const ExperimentConfig& cfg, const fs::path& dir, std::size_t grid_points) {
  if (grid_points < 2) throw InvalidInput("plot grid needs at least two points");
  fs::create_directories(dir);
  ExperimentConfig ordinary = cfg;
  ordinary.weight_mode = WeightMode::ordinary;
  ExperimentConfig shifted = cfg;
  shifted.weight_mode = WeightMode::shift;
  const auto hash = config_hash(cfg);
  const auto ord = run_calibration(ordinary);
  const auto sft = run_calibration(shifted);
  const auto sim = make_simulator(cfg.simulator);
  const auto truth = make_truth(cfg, sim);

  // training points with their shift weights
  Eigen::MatrixXd train(sft.data.xs.size(), 3);
  train << sft.data.xs, sft.data.ys, sft.beta.values();
  write_csv(dir / "fig1_training.csv", {"x", "y", "beta"}, train, hash);

  auto span_of = [](const DensitySpec& d) {
    return d.family() == DensitySpec::Family::normal
               ? std::pair{d.first() - 3.0 * d.second(), d.first() + 3.0 * d.second()}
               : std::pair{d.first(), d.second()};
  };
  const auto [a0, b0] = span_of(cfg.q0);
  const auto [a1, b1] = span_of(cfg.q1);
  const double lo = std::min(a0, a1);
  const double hi = std::max(b0, b1);
  Eigen::VectorXd grid(static_cast<Eigen::Index>(grid_points));
  for (Eigen::Index i = 0; i < grid.size(); ++i)
    grid(i) = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(grid_points - 1);

  const auto plot_seed = derive_seed(cfg.seed, "plot");
  const auto truth_values = truth_at(truth, grid, plot_seed);
  const auto pred_ord = predict_all(*sim, grid, ord.herded.samples, plot_seed);
  const auto pred_sft = predict_all(*sim, grid, sft.herded.samples, plot_seed);
  Eigen::MatrixXd curves(grid.size(), 4);
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    const auto k = static_cast<std::size_t>(i);
    curves.row(i) << grid(i), truth_values[k], pred_ord[k].mean, pred_sft[k].mean;
  }
  write_csv(dir / "fig1_predictive.csv", {"x", "truth", "mean_ordinary", "mean_shift"}, curves, hash);

  const auto header = theta_header(sft.embedding.dim());
  write_csv(dir / "fig3_herded_ordinary.csv", header, ord.herded.samples, hash);
  write_csv(dir / "fig3_herded_shift.csv", header, sft.herded.samples, hash);

  auto mean_row = [](const Eigen::MatrixXd& s) {
    const Eigen::VectorXd mu = s.colwise().mean().transpose();
    return std::vector<double>(mu.data(), mu.data() + mu.size());
  };
  std::vector<std::string> files{"fig1_training.csv", "fig1_predictive.csv", "fig3_herded_ordinary.csv",
                                 "fig3_herded_shift.csv", "plot_data.json"};
  write_json(dir / "plot_data.json", {{"config_hash", hash},
                                      {"rmse_ordinary", ord.report.rmse},
                                      {"rmse_shift", sft.report.rmse},
                                      {"herded_mean_ordinary", mean_row(ord.herded.samples)},
                                      {"herded_mean_shift", mean_row(sft.herded.samples)},
                                      {"artifacts", files}});
  return files;
}

}  // namespace shiftcal
