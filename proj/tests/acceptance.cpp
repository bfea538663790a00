// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "shiftcal/pipeline.hpp"

using namespace shiftcal;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Outcome reduction_identity() {
  auto ordinary = preset("linear-ordinary");
  auto equal = preset("linear-shift");
  equal.q1 = equal.q0;
  equal.test_density = TestDensity::q0;
  double wdiff = 0, rdiff = 0;
  for (std::uint64_t seed : {0u, 1u, 2u}) {
    ordinary.seed = equal.seed = seed;
    const auto a = run_calibration(ordinary), b = run_calibration(equal);
    wdiff = std::max(wdiff, (a.embedding.weights - b.embedding.weights).lpNorm<Eigen::Infinity>());
    rdiff = std::max(rdiff, std::abs(a.report.rmse - b.report.rmse));
  }
  return {wdiff <= 1e-12 && rdiff <= 1e-12, fmt("max |dw| = %.3g, max |dRMSE| = %.3g", wdiff, rdiff)};
}

Outcome gram_solve_contract() {
  std::mt19937_64 rng(20240601);
  std::normal_distribution<double> nd(0, 1);
  std::uniform_int_distribution<int> msize(1, 500), nsize(1, 30);
  std::uniform_real_distribution<double> logeps(-3, 0), bw(0.2, 3);
  double worst = 0;
  int largest = 0;
  for (int rep = 0; rep < 100; ++rep) {
    const int m = rep == 0 ? 500 : msize(rng), n = nsize(rng);
    largest = std::max(largest, m);
    Eigen::MatrixXd pseudo(m, n);
    for (auto& v : pseudo.reshaped()) v = nd(rng);
    Eigen::VectorXd obs(n), beta(n);
    for (auto& v : obs) v = nd(rng);
    for (auto& v : beta) v = std::exp(nd(rng));
    const WeightedOutputKernel k(bw(rng) * n, ImportanceWeights(beta));
    const auto sys = gram_and_rhs(pseudo, obs, k, std::pow(10.0, logeps(rng)));
    const auto w = regularized_solve(sys);
    Eigen::MatrixXd a = sys.gram;
    a.diagonal().array() += static_cast<double>(m) * sys.epsilon;
    const double rel = (a * w - sys.rhs).lpNorm<Eigen::Infinity>() /
                       std::max(1.0, sys.rhs.lpNorm<Eigen::Infinity>());
    worst = std::max(worst, rel);
  }
  return {worst <= 1e-10, fmt("worst scaled residual %.3g over 100 systems (m up to %d)", worst, largest)};
}

PosteriorEmbedding embedding_of(Eigen::MatrixXd atoms, Eigen::VectorXd w, double s2) {
  PosteriorEmbedding e;
  e.draws = std::move(atoms);
  e.weights = std::move(w);
  e.kernel = ParamKernel(s2);
  return e;
}

Outcome herding_oracle() {
  std::mt19937_64 rng(77);
  std::normal_distribution<double> nd(0, 1);
  std::uniform_int_distribution<int> dim(1, 3);
  int matches = 0;
  for (int rep = 0; rep < 20; ++rep) {
    const int d = dim(rng);
    Eigen::MatrixXd atoms(5, d), extra(10, d);
    for (auto& v : atoms.reshaped()) v = nd(rng);
    for (auto& v : extra.reshaped()) v = 1.5 * nd(rng);
    Eigen::VectorXd w(5);
    for (auto& v : w) v = nd(rng);
    const double s2 = 0.3 + std::abs(nd(rng));
    const auto e = embedding_of(atoms, w, s2);
    const auto pool = default_pool(e, extra);
    if (herd(e, pool, 20).pool_indices == oracle::herd(atoms, w, s2, pool.points(), 20)) ++matches;
  }
  return {matches == 20, fmt("%d/20 sequences identical", matches)};
}

Outcome herding_decay() {
  std::mt19937_64 rng(4242);
  std::normal_distribution<double> nd(0, 1);
  std::gamma_distribution<double> gd(1.0, 1.0);
  bool ok = true;
  double worst_ratio = 0, worst_end = 0;
  for (int rep = 0; rep < 10; ++rep) {
    const int m = 5 + 5 * rep;
    Eigen::MatrixXd atoms(m, 2);
    for (auto& v : atoms.reshaped()) v = nd(rng);
    Eigen::VectorXd w(m);
    for (auto& v : w) v = gd(rng);
    w /= w.sum();
    const auto e = embedding_of(atoms, w, 0.5 + 0.1 * rep);
    const auto h = herd(e, default_pool(e), 200);
    const auto curve = herding_mmd_curve(e, h);
    double ratio = 0;
    for (std::size_t t = 0; t < curve.size(); ++t) ratio = std::max(ratio, curve[t] * std::sqrt(t + 1.0) / curve[0]);
    worst_ratio = std::max(worst_ratio, ratio);
    worst_end = std::max(worst_end, curve.back() / curve[0]);
    ok = ok && curve.back() <= curve[0] && ratio <= 3.0;
  }
  return {ok, fmt("max mmd(200)/mmd(1) = %.3g, max mmd(t)sqrt(t)/mmd(1) = %.3g", worst_end, worst_ratio)};
}

Outcome theorem1_equivalence() {
  const auto cfg = preset("linear-shift");
  const auto report = theorem1_check(cfg, {.grid_resolution = 201, .refinements = 2, .m_values = {100, 800}, .seeds = 5});
  bool wls_ok = true;
  double worst = 0;
  for (const auto& s : report.seeds) {
    for (int k = 0; k < 2; ++k) {
      const double err = std::abs(s.optimum.theta(k) - (*s.wls)(k));
      worst = std::max(worst, err / s.optimum.spacing(k));
      wls_ok = wls_ok && err <= s.optimum.spacing(k) && !s.optimum.on_boundary;
    }
  }
  const double d100 = report.mean_distance.at(100), d800 = report.mean_distance.at(800);
  return {wls_ok && d800 < d100,
          fmt("mean distance m=100: %.5g, m=800: %.5g; max |theta*-WLS|/spacing = %.3g", d100, d800, worst)};
}

Outcome shift_benefit() {
  auto shift = preset("assembly-shift");
  auto ordinary = preset("assembly-ordinary");
  double s = 0, o = 0;
  int wins = 0;
  for (std::size_t t = 0; t < 10; ++t) {
    shift.seed = ordinary.seed = trial_seed(0, t);
    const double rs = run_calibration(shift).report.rmse, ro = run_calibration(ordinary).report.rmse;
    s += rs / 10;
    o += ro / 10;
    wins += rs < ro;
  }
  return {s < o, fmt("mean RMSE shift %.4g vs ordinary %.4g (shift lower on %d/10 seeds)", s, o, wins)};
}

Outcome efficiency_ordering() {
  const auto cfg = load_config(fs::path(SHIFTCAL_SOURCE_DIR) / "configs" / "linear_shift.json");
  const auto rows = rmse_curve(cfg, {400}, 10, {cfg.mh.proposal_std});
  double kabc = 0, mh = 0, acc = 0;
  for (const auto& r : rows) {
    if (r.method == "kabc") kabc = r.mean_rmse;
    else mh = r.mean_rmse, acc = r.mean_acceptance;
  }
  return {kabc < mh, fmt("mean RMSE at budget 400: kernel ABC %.4g vs MH %.4g (proposal std %.3g, acceptance %.2f)",
                         kabc, mh, cfg.mh.proposal_std, acc)};
}

Outcome mh_correctness() {
  const LogTarget gauss = [](const Eigen::VectorXd& th, std::size_t) { return -0.5 * th.squaredNorm(); };
  const auto tr = mh_sample(gauss, Eigen::VectorXd::Zero(1), {.proposal_std = 2.4, .steps = 100000, .seed = 1});
  const auto post = tr.post_burn_in();
  const double mean = post.mean();
  const double var = (post.array() - mean).square().sum() / static_cast<double>(post.rows() - 1);
  const bool gauss_ok = std::abs(mean) < 0.05 && std::abs(var - 1) < 0.1;

  auto cfg = load_config(fs::path(SHIFTCAL_SOURCE_DIR) / "configs" / "linear_shift.json");
  cfg.mh.steps = 50000;
  const auto res = run_mh_baseline(cfg);
  const auto p = res.trace.post_burn_in();
  const Eigen::RowVectorXd pm = p.colwise().mean();
  const Eigen::VectorXd sd =
      ((p.rowwise() - pm).array().square().colwise().sum() / static_cast<double>(p.rows() - 1)).sqrt();
  const auto w = oracle::wls(res.data.xs, res.data.ys, res.beta.values());
  double z = 0;
  for (int k = 0; k < 2; ++k) z = std::max(z, std::abs(pm(k) - w(k)) / sd(k));
  return {gauss_ok && z <= 3.0,
          fmt("N(0,1) target: mean %.4f, var %.4f; linear model max |mean-WLS|/sd = %.3g", mean, var, z)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::map<std::string, std::string> tree(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) out[fs::relative(e.path(), root).string()] = slurp(e.path());
  return out;
}

Outcome cli_determinism() {
  const fs::path cli = SHIFTCAL_CLI;
  const fs::path work = fs::temp_directory_path() / "shiftcal_acceptance_cli";
  fs::remove_all(work);
  const std::string common = " --preset linear-shift --seed 11";
  auto run = [&](const fs::path& root) {
    const std::vector<std::string> cmds = {
        "calibrate" + common + " --m 60 --out " + (root / "calibrate").string(),
        "rmse-curve" + common + " --m-values 20,40 --trials 2 --mh-proposal-std 0.3 --out " + (root / "curve").string(),
        "mh-baseline" + common + " --steps 300 --out " + (root / "mh").string(),
        "mh-sweep" + common + " --proposal-std 0.1,0.3 --out " + (root / "sweep").string(),
        "theorem1-check" + common + " --grid 31 --refinements 1 --m-values 20,40 --seeds 2 --out " + (root / "t1").string(),
        "emit-plot-data" + common + " --grid-points 30 --out " + (root / "plot").string(),
        "herd" + common + " --embedding " + (root / "calibrate" / "embedding.json").string() + " --steps 25 --out " +
            (root / "herd").string(),
        "predict" + common + " --samples " + (root / "herd" / "herded.csv").string() + " --out " +
            (root / "predict").string(),
    };
    for (const auto& c : cmds) {
      const std::string line = "\"" + cli.string() + "\" " + c + " > /dev/null 2>&1";
      if (std::system(line.c_str()) != 0) return c.substr(0, c.find(' '));
    }
    return std::string();
  };
  for (const char* r : {"a", "b"})
    if (auto failed = run(work / r); !failed.empty()) return {false, "subcommand '" + failed + "' exited non-zero"};
  const auto a = tree(work / "a"), b = tree(work / "b");
  std::size_t same = 0;
  std::string first_diff;
  for (const auto& [name, text] : a) {
    auto it = b.find(name);
    if (it != b.end() && it->second == text) ++same;
    else if (first_diff.empty()) first_diff = name;
  }
  const bool ok = !a.empty() && same == a.size() && a.size() == b.size();
  return {ok, fmt("%zu/%zu output files byte-identical across two runs of 8 subcommands%s", same, a.size(),
                  first_diff.empty() ? "" : (" (first difference: " + first_diff + ")").c_str())};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"1 reduction identity", reduction_identity},
      {"2 gram solve contract", gram_solve_contract},
      {"3 herding oracle equivalence", herding_oracle},
      {"4 herding decay", herding_decay},
      {"5 optimal-parameter equivalence", theorem1_equivalence},
      {"6 covariate-shift benefit", shift_benefit},
      {"7 efficiency ordering", efficiency_ordering},
      {"8 MH correctness", mh_correctness},
      {"9 CLI determinism", cli_determinism},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << name << ": " << o.detail << fmt("  [%.1fs]", secs)
              << std::endl;
    failed += !o.pass;
  }
  std::cout << (9 - failed) << "/9 criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
