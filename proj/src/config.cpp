#include "shiftcal/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "shiftcal/csv.hpp"
#include "shiftcal/error.hpp"

namespace shiftcal {

using nlohmann::json;

WeightMode parse_weight_mode(const std::string& s) {
  if (s == "shift") return WeightMode::shift;
  if (s == "ordinary") return WeightMode::ordinary;
  throw InvalidInput("weight mode must be 'shift' or 'ordinary', got '" + s + "'");
}

std::string to_string(WeightMode mode) { return mode == WeightMode::shift ? "shift" : "ordinary"; }

namespace {

Eigen::VectorXd vec(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

json vec_json(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

// Normal densities take exactly one of "std" or "variance".
DensitySpec density_from_json(const json& j) {
  const auto family = j.at("family").get<std::string>();
  if (family == "normal") {
    const double mean = j.at("mean").get<double>();
    const bool has_std = j.contains("std");
    const bool has_var = j.contains("variance");
    if (has_std == has_var) throw InvalidInput("normal density needs exactly one of 'std' or 'variance'");
    return has_std ? DensitySpec::normal(mean, j.at("std").get<double>())
                   : DensitySpec::normal_from_variance(mean, j.at("variance").get<double>());
  }
  if (family == "uniform") return DensitySpec::uniform(j.at("lower").get<double>(), j.at("upper").get<double>());
  throw InvalidInput("unknown density family '" + family + "'");
}

json density_to_json(const DensitySpec& d) {
  if (d.family() == DensitySpec::Family::normal)
    return {{"family", "normal"}, {"mean", d.first()}, {"std", d.second()}};
  return {{"family", "uniform"}, {"lower", d.first()}, {"upper", d.second()}};
}

PriorSpec prior_from_json(const json& j) {
  const auto family = j.at("family").get<std::string>();
  if (family == "normal") {
    Eigen::VectorXd mean = vec(j.at("mean"));
    if (j.contains("variance")) return PriorSpec::diagonal_normal(mean, vec(j.at("variance")));
    const Eigen::VectorXd sd = vec(j.at("std"));
    return PriorSpec::diagonal_normal(mean, sd.array().square().matrix());
  }
  if (family == "uniform") return PriorSpec::uniform_box(vec(j.at("lower")), vec(j.at("upper")));
  throw InvalidInput("unknown prior family '" + family + "'");
}

json prior_to_json(const PriorSpec& p) {
  if (p.family() == PriorSpec::Family::diagonal_normal)
    return {{"family", "normal"},
            {"mean", vec_json(p.first())},
            {"variance", vec_json(p.second().array().square().matrix())}};
  return {{"family", "uniform"}, {"lower", vec_json(p.first())}, {"upper", vec_json(p.second())}};
}

std::string test_density_name(TestDensity t) {
  switch (t) {
    case TestDensity::q0: return "q0";
    case TestDensity::q1: return "q1";
    default: return "auto";
  }
}

}  // namespace

double ExperimentConfig::resolved_epsilon() const {
  return schedule ? regularization_schedule(m, schedule->decay, schedule->constant) : epsilon;
}

const DensitySpec& ExperimentConfig::resolved_test_density() const noexcept {
  switch (test_density) {
    case TestDensity::q0: return q0;
    case TestDensity::q1: return q1;
    default: return weight_mode == WeightMode::shift ? q1 : q0;
  }
}

void ExperimentConfig::validate() const {
  const auto sim = make_simulator(simulator);
  if (prior.dim() != sim->param_dim())
    throw InvalidInput("prior dimension does not match simulator '" + simulator + "'");
  if (truth.kind == "piecewise") {
    if (static_cast<std::size_t>(truth.theta_lo.size()) != sim->param_dim() ||
        static_cast<std::size_t>(truth.theta_hi.size()) != sim->param_dim())
      throw InvalidInput("piecewise truth parameters do not match the simulator dimension");
    if (!std::isfinite(truth.breakpoint)) throw InvalidInput("piecewise breakpoint must be finite");
  } else if (truth.kind != "cubic") {
    throw InvalidInput("unknown truth kind '" + truth.kind + "'");
  }
  if (n < 1 || m < 1) throw InvalidInput("n and m must be at least 1");
  if (!schedule && !(epsilon > 0.0)) throw InvalidInput("epsilon must be positive");
  if (!median_bandwidth && (!(output_bandwidth_sq > 0.0) || !(param_bandwidth_sq > 0.0)))
    throw InvalidInput("fixed bandwidths must be positive");
  noise.stddev();
  mh.validate();
}

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig cfg;
  if (j.contains("experiment")) {
    const auto& e = j.at("experiment");
    cfg.name = e.value("name", cfg.name);
    cfg.seed = e.value("seed", cfg.seed);
    if (e.contains("output_dir")) cfg.output_dir = e.at("output_dir").get<std::string>();
  }
  cfg.simulator = j.at("simulator").at("name").get<std::string>();

  const auto& t = j.at("truth");
  cfg.truth.kind = t.at("kind").get<std::string>();
  if (cfg.truth.kind == "piecewise") {
    cfg.truth.theta_lo = vec(t.at("theta_lo"));
    cfg.truth.theta_hi = vec(t.at("theta_hi"));
    cfg.truth.breakpoint = t.at("breakpoint").get<double>();
  }

  const auto& d = j.at("data");
  cfg.n = d.at("n").get<std::size_t>();
  cfg.q0 = density_from_json(d.at("q0"));
  cfg.q1 = density_from_json(d.at("q1"));
  const auto& noise = d.at("noise");
  cfg.noise.variance = noise.contains("variance") ? noise.at("variance").get<double>()
                                                  : std::pow(noise.at("std").get<double>(), 2);

  cfg.prior = prior_from_json(j.at("prior"));

  const auto& k = j.at("kabc");
  cfg.m = k.at("m").get<std::size_t>();
  cfg.epsilon = k.value("epsilon", cfg.epsilon);
  if (k.contains("schedule"))
    cfg.schedule = ScheduleSpec{k.at("schedule").at("constant").get<double>(),
                                k.at("schedule").at("decay").get<double>()};
  const auto& bw = k.value("bandwidth", json("median"));
  if (bw.is_string()) {
    if (bw.get<std::string>() != "median") throw InvalidInput("bandwidth must be 'median' or an object");
    cfg.median_bandwidth = true;
  } else {
    cfg.median_bandwidth = false;
    cfg.output_bandwidth_sq = bw.at("output").get<double>();
    cfg.param_bandwidth_sq = bw.at("param").get<double>();
  }
  cfg.weight_mode = parse_weight_mode(k.value("weight_mode", std::string("shift")));

  if (j.contains("herd")) {
    cfg.herd_steps = j.at("herd").value("steps", cfg.herd_steps);
    cfg.extra_pool = j.at("herd").value("extra_pool", cfg.extra_pool);
  }
  if (j.contains("predict")) {
    const auto& p = j.at("predict");
    cfg.test_size = p.value("test_size", cfg.test_size);
    const auto td = p.value("test_density", std::string("auto"));
    if (td == "q0") cfg.test_density = TestDensity::q0;
    else if (td == "q1") cfg.test_density = TestDensity::q1;
    else if (td == "auto") cfg.test_density = TestDensity::automatic;
    else throw InvalidInput("predict.test_density must be auto, q0 or q1");
  }
  if (j.contains("mh")) {
    const auto& mh = j.at("mh");
    cfg.mh.proposal_std = mh.value("proposal_std", cfg.mh.proposal_std);
    cfg.mh.steps = mh.value("steps", cfg.mh.steps);
    cfg.mh.burn_in = mh.value("burn_in", cfg.mh.burn_in);
    cfg.mh.noise_var = mh.value("noise_var", cfg.noise.variance);
  } else {
    cfg.mh.noise_var = cfg.noise.variance;
  }
  cfg.validate();
  return cfg;
}

json config_to_json(const ExperimentConfig& cfg) {
  json truth = {{"kind", cfg.truth.kind}};
  if (cfg.truth.kind == "piecewise") {
    truth["theta_lo"] = vec_json(cfg.truth.theta_lo);
    truth["theta_hi"] = vec_json(cfg.truth.theta_hi);
    truth["breakpoint"] = cfg.truth.breakpoint;
  }
  json kabc = {{"m", cfg.m}, {"epsilon", cfg.epsilon}, {"weight_mode", to_string(cfg.weight_mode)}};
  if (cfg.schedule) kabc["schedule"] = {{"constant", cfg.schedule->constant}, {"decay", cfg.schedule->decay}};
  kabc["bandwidth"] = cfg.median_bandwidth
                          ? json("median")
                          : json{{"output", cfg.output_bandwidth_sq}, {"param", cfg.param_bandwidth_sq}};
  return {
      {"experiment", {{"name", cfg.name}, {"seed", cfg.seed}, {"output_dir", cfg.output_dir.string()}}},
      {"simulator", {{"name", cfg.simulator}}},
      {"truth", truth},
      {"data",
       {{"n", cfg.n},
        {"q0", density_to_json(cfg.q0)},
        {"q1", density_to_json(cfg.q1)},
        {"noise", {{"variance", cfg.noise.variance}}}}},
      {"prior", prior_to_json(cfg.prior)},
      {"kabc", kabc},
      {"herd", {{"steps", cfg.herd_steps}, {"extra_pool", cfg.extra_pool}}},
      {"predict", {{"test_size", cfg.test_size}, {"test_density", test_density_name(cfg.test_density)}}},
      {"mh",
       {{"proposal_std", cfg.mh.proposal_std},
        {"steps", cfg.mh.steps},
        {"burn_in", cfg.mh.burn_in},
        {"noise_var", cfg.mh.noise_var}}},
  };
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::exception& e) {
    throw InvalidInput("config " + path.string() + ": " + e.what());
  }
  try {
    return config_from_json(j);
  } catch (const json::exception& e) {
    throw InvalidInput("config " + path.string() + ": " + e.what());
  }
}

std::string config_hash(const ExperimentConfig& cfg) {
  json j = config_to_json(cfg);
  j["experiment"].erase("output_dir");
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a64(j.dump())));
  return buf;
}

ExperimentConfig preset(const std::string& name) {
  ExperimentConfig cfg;
  cfg.name = name;
  if (name == "linear-shift" || name == "linear-ordinary") {
    cfg.simulator = "linear";
    cfg.truth.kind = "cubic";
    cfg.q0 = DensitySpec::normal(0.5, 0.5);
    cfg.q1 = DensitySpec::normal(0.0, 0.3);
    cfg.noise.variance = 2.0;
    cfg.prior = PriorSpec::diagonal_normal(Eigen::VectorXd::Zero(2), Eigen::VectorXd::Constant(2, 5.0));
    cfg.n = 100;
    cfg.m = 400;
    cfg.epsilon = 1.0;
    cfg.mh = MHConfig{0.06, 400, 0.10, 2.0, 0};
    cfg.weight_mode = name == "linear-shift" ? WeightMode::shift : WeightMode::ordinary;
    return cfg;
  }
  if (name == "assembly-shift" || name == "assembly-ordinary") {
    cfg.simulator = "assembly";
    cfg.truth.kind = "piecewise";
    cfg.truth.theta_lo = Eigen::Vector4d(2.0, 0.5, 5.0, 1.0);
    cfg.truth.theta_hi = Eigen::Vector4d(3.5, 0.5, 7.0, 1.0);
    cfg.truth.breakpoint = 110.0;
    cfg.q0 = DensitySpec::normal(100.0, 10.0);
    cfg.q1 = DensitySpec::normal(120.0, 10.0);
    cfg.noise.variance = 30.0;
    cfg.prior = PriorSpec::uniform_box(Eigen::Vector4d(0.0, 0.0, 0.0, 0.0),
                                       Eigen::Vector4d(5.0, 2.0, 10.0, 2.0));
    cfg.n = 50;
    cfg.m = 400;
    cfg.epsilon = 0.01;
    cfg.test_density = TestDensity::q1;
    cfg.mh = MHConfig{0.03, 400, 0.10, 30.0, 0};
    cfg.weight_mode = name == "assembly-shift" ? WeightMode::shift : WeightMode::ordinary;
    return cfg;
  }
  throw InvalidInput("unknown preset '" + name + "'");
}

RegressionFunction make_truth(const ExperimentConfig& cfg, const SimulatorPtr& sim) {
  if (cfg.truth.kind == "cubic") return [](double x, std::uint64_t) { return cubic_truth(x); };
  if (cfg.truth.kind == "piecewise")
    return make_piecewise_truth(sim, cfg.truth.theta_lo, cfg.truth.theta_hi, cfg.truth.breakpoint);
  throw InvalidInput("unknown truth kind '" + cfg.truth.kind + "'");
}

std::string describe_truth(const ExperimentConfig& cfg) {
  if (cfg.truth.kind == "cubic") return "R(x) = -x + x^3";
  return "piecewise " + cfg.simulator + " truth, breakpoint " + format_real(cfg.truth.breakpoint);
}

}  // namespace shiftcal
