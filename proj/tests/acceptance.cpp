// Acceptance checks: one PASS/FAIL/SKIP line per criterion.
// Datasets for the conditional criteria are looked up under
// $RANKRATE_DATA_DIR/{aibs,sushi}/data.cfg (data.* keys as in a run config).

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

#include <boost/math/distributions/beta.hpp>
#include <boost/math/distributions/gamma.hpp>

#include "oracles.hpp"
#include "rankrate/btl_binomial.hpp"
#include "rankrate/config.hpp"
#include "rankrate/diagnostics.hpp"
#include "rankrate/error.hpp"
#include "rankrate/fixed_k.hpp"
#include "rankrate/mfm_sampler.hpp"
#include "rankrate/simulation.hpp"
#include "test_util.hpp"

namespace fs = std::filesystem;
using namespace rankrate;

namespace {

enum class Status { pass, fail, skip };

struct Outcome {
  Status status = Status::fail;
  std::string detail;
};

Outcome verdict(bool ok, const std::string& detail) { return {ok ? Status::pass : Status::fail, detail}; }

std::string fmt(double x, int digits = 4) {
  std::ostringstream s;
  s << std::setprecision(digits) << x;
  return s.str();
}

// Reference P(A before B) with p_B - p_A = 0.1.
Outcome criterion1() {
  const std::vector<double> thetas{1, 5, 10, 20, 40}, expected{0.525, 0.622, 0.731, 0.881, 0.982};
  double worst = 0.0;
  std::string got;
  for (std::size_t t = 0; t < thetas.size(); ++t) {
    const double v = pairwise_prob(0.3, 0.4, thetas[t]);
    worst = std::max(worst, std::abs(v - expected[t]));
    got += (t ? " " : "") + fmt(v);
  }
  return verdict(worst <= 5e-4, "got " + got + ", max error " + fmt(worst, 2));
}

// Exhaustive sum of the joint pmf over all rankings and rating vectors.
Outcome criterion2() {
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double worst = 0.0;
  for (auto [J, M, R] : {std::tuple{2, 1, 2}, std::tuple{3, 2, 3}, std::tuple{3, 2, 2}}) {
    std::vector<ObjectId> all(J);
    std::iota(all.begin(), all.end(), 0);
    const auto rankings = oracle::partial_permutations(all, R);
    for (int rep = 0; rep < 50; ++rep) {
      ClassParams cp;
      for (int j = 0; j < J; ++j) cp.p.push_back(unif(gen));
      cp.theta = 40.0 * unif(gen) + 1e-3;
      double total = 0.0;
      for (const auto& ranking : rankings) {
        oracle::for_each_rating_vector(J, M, [&](const std::vector<int>& x) {
          std::vector<std::pair<ObjectId, int>> ratings;
          for (int j = 0; j < J; ++j) ratings.emplace_back(j, x[j]);
          total += std::exp(log_btl_binomial(oracle::make_judge(0, all, ranking, ratings), cp, M));
        });
      }
      worst = std::max(worst, std::abs(total - 1.0));
    }
  }
  return verdict(worst <= 1e-10, "max |sum - 1| = " + fmt(worst, 3) + " over 150 parameter draws");
}

// Two judges, two objects, M = 1: Gibbs means and the EM mode against a
// 51^3 grid of the exact posterior.
Outcome criterion3() {
  std::vector<JudgeRecord> judges{oracle::make_judge(0, {0, 1}, {0, 1}, {{0, 0}, {1, 1}}),
                                  oracle::make_judge(0, {0, 1}, {1}, {{0, 0}, {1, 0}})};
  const auto data = oracle::make_dataset(judges, 2, 1);
  Hyperparams h;
  h.a = 2.0;
  h.b = 2.0;
  h.gamma1 = 20.0;
  h.gamma2 = 40.0;

  const int n = 51;
  const double theta_max = 1.02;
  const boost::math::beta_distribution<double> beta(h.a, h.b);
  const boost::math::gamma_distribution<double> gam(h.gamma1, 1.0 / h.gamma2);
  double z = 0.0, m1 = 0.0, m2 = 0.0, mt = 0.0, best = -1.0;
  std::array<double, 3> argmax{};
  for (int a = 0; a < n; ++a) {
    const double p1 = (a + 0.5) / n;
    for (int b = 0; b < n; ++b) {
      const double p2 = (b + 0.5) / n;
      for (int c = 0; c < n; ++c) {
        const double th = (c + 0.5) * theta_max / n;
        double dens = boost::math::pdf(beta, p1) * boost::math::pdf(beta, p2) * boost::math::pdf(gam, th);
        for (const auto& j : judges) dens *= oracle::judge_prob(j, {p1, p2}, th, 1);
        z += dens;
        m1 += p1 * dens;
        m2 += p2 * dens;
        mt += th * dens;
        if (dens > best) {
          best = dens;
          argmax = {p1, p2, th};
        }
      }
    }
  }
  const std::array<double, 3> grid_mean{m1 / z, m2 / z, mt / z};

  ChainConfig cfg;
  cfg.B_gibbs = 120000;
  cfg.B_mh = 1;
  cfg.sigma2_p = 0.08;
  cfg.sigma2_theta = 0.03;
  cfg.burn_in = 2000;
  cfg.seed = 31;
  const auto samples = run_fixed_k(data, 1, h, cfg);
  std::array<double, 3> chain_mean{};
  for (const auto& d : samples.draws) {
    chain_mean[0] += d.classes[0].p[0];
    chain_mean[1] += d.classes[0].p[1];
    chain_mean[2] += d.classes[0].theta;
  }
  for (double& v : chain_mean) v /= static_cast<double>(samples.draws.size());

  MapOptions opts;
  opts.tol = 1e-12;
  opts.restarts = 3;
  const auto fit = run_map(data, 1, h, opts);
  const std::array<double, 3> mode{fit.classes[0].p[0], fit.classes[0].p[1], fit.classes[0].theta};

  double mean_err = 0.0, mode_err = 0.0;
  for (int k = 0; k < 3; ++k) {
    mean_err = std::max(mean_err, std::abs(chain_mean[k] - grid_mean[k]));
    mode_err = std::max(mode_err, std::abs(mode[k] - argmax[k]));
  }
  return verdict(mean_err <= 0.02 && mode_err <= 0.02,
                 "grid mean (" + fmt(grid_mean[0]) + ", " + fmt(grid_mean[1]) + ", " + fmt(grid_mean[2]) +
                     "), Gibbs error " + fmt(mean_err, 2) + "; EM mode error " + fmt(mode_err, 2));
}

// Random small instance generated independently of the library.
PreferenceDataset random_instance(std::mt19937_64& gen, int K) {
  std::uniform_int_distribution<int> pick_I(4, 10), pick_J(2, 4), pick_M(1, 4);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const int I = pick_I(gen), J = pick_J(gen), M = pick_M(gen);
  std::vector<std::vector<double>> p(K, std::vector<double>(J));
  std::vector<double> theta(K);
  for (int k = 0; k < K; ++k) {
    for (double& x : p[k]) x = 0.05 + 0.9 * unif(gen);
    theta[k] = 1.0 + 19.0 * unif(gen);
  }
  std::vector<JudgeRecord> judges;
  for (int i = 0; i < I; ++i) {
    const int k = std::uniform_int_distribution<int>(0, K - 1)(gen);
    std::vector<ObjectId> assessed;
    for (int j = 0; j < J; ++j) {
      if (unif(gen) < 0.8) assessed.push_back(j);
    }
    if (assessed.size() < 2) assessed = {0, 1};
    std::vector<std::pair<ObjectId, int>> ratings;
    for (ObjectId j : assessed) {
      if (unif(gen) < 0.7) ratings.emplace_back(j, std::binomial_distribution<int>(M, p[k][j])(gen));
    }
    const int r = std::uniform_int_distribution<int>(ratings.empty() ? 1 : 0, static_cast<int>(assessed.size()))(gen);
    std::vector<ObjectId> left = assessed, ranking;
    for (int t = 0; t < r; ++t) {
      std::vector<double> w;
      for (ObjectId j : left) w.push_back(std::exp(-theta[k] * p[k][j]));
      const int c = std::discrete_distribution<int>(w.begin(), w.end())(gen);
      ranking.push_back(left[c]);
      left.erase(left.begin() + c);
    }
    judges.push_back(oracle::make_judge(0, assessed, ranking, ratings));
  }
  return oracle::make_dataset(std::move(judges), J, M);
}

// Largest central-difference derivative over interior coordinates.
double stationarity(const PreferenceDataset& data, const EMState& fit, const Hyperparams& h, const MapOptions& o) {
  const double step = 1e-5;
  double worst = 0.0;
  auto probe = [&](const std::function<void(EMState&, double)>& move) {
    EMState up = fit, down = fit;
    move(up, step);
    move(down, -step);
    const double g = (em_objective(data, up, h) - em_objective(data, down, h)) / (2 * step);
    worst = std::max(worst, std::abs(g));
  };
  for (int k = 0; k < fit.K(); ++k) {
    for (int j = 0; j < data.J; ++j) {
      const double p = fit.classes[k].p[j];
      if (p - o.p_lower < 1e-4 || o.p_upper - p < 1e-4) continue;
      probe([&](EMState& s, double d) { s.classes[k].p[j] += d; });
    }
    const double t = fit.classes[k].theta;
    if (t - o.theta_lower > 1e-4 && o.theta_upper - t > 1e-4) {
      probe([&](EMState& s, double d) { s.classes[k].theta += d; });
    }
  }
  // Weights move along the simplex: mass from the last class to class k.
  const int K = fit.K();
  for (int k = 0; k + 1 < K; ++k) {
    if (fit.weights[k] < 1e-4 || fit.weights[K - 1] < 1e-4) continue;
    probe([&](EMState& s, double d) {
      s.weights[k] += d;
      s.weights[K - 1] -= d;
    });
  }
  if (fit.gamma - o.gamma_lower > 1e-4 && o.gamma_upper - fit.gamma > 1e-4) {
    probe([&](EMState& s, double d) { s.gamma += d; });
  }
  return worst;
}

Outcome criterion4() {
  std::mt19937_64 gen(404);
  Hyperparams h;
  h.a = 2.0;
  h.b = 2.0;
  MapOptions o;
  o.tol = 1e-12;
  o.max_iter = 20000;
  o.inner_grad_tol = 1e-10;
  double worst_drop = 0.0, worst_grad = 0.0;
  int failures = 0, unconverged = 0;
  testutil::WarningCapture quiet;
  for (int inst = 0; inst < 100; ++inst) {
    const int K = 1 + inst % 3;
    const auto data = random_instance(gen, K);
    Rng rng = make_stream(inst, "acceptance-em");
    try {
      const auto fit = run_em(data, em_initial_state(data, K, h, rng), h, o);
      for (std::size_t t = 1; t < fit.objective_trace.size(); ++t) {
        worst_drop = std::max(worst_drop, fit.objective_trace[t - 1] - fit.objective_trace[t]);
      }
      if (!fit.converged) ++unconverged;
      worst_grad = std::max(worst_grad, stationarity(data, fit, h, o));
    } catch (const Error& e) {
      ++failures;
      std::cerr << "  instance " << inst << ": " << e.what() << '\n';
    }
  }
  const bool ok = failures == 0 && worst_drop <= 1e-8 && worst_grad < 1e-4;
  return verdict(ok, "largest objective drop " + fmt(worst_drop, 2) + ", largest derivative " + fmt(worst_grad, 2) +
                         ", " + std::to_string(unconverged) + " hit max_iter, " + std::to_string(failures) +
                         " errors");
}

Outcome criterion5() {
  const int I = 100, J = 8, M = 4;
  std::vector<double> spread(J), reversed(J);
  for (int j = 0; j < J; ++j) {
    spread[j] = 0.1 + 0.8 * j / (J - 1);
    reversed[j] = spread[J - 1 - j];
  }
  Hyperparams h;  // lambda = 1, gamma ~ Gamma(2, 3), Beta(1, 1), theta ~ Gamma(10, 0.5)
  std::string detail;
  bool ok = true;
  for (int k_true : {1, 2}) {
    int hits = 0;
    std::map<int, int> modes;
    for (int run = 0; run < 20; ++run) {
      std::mt19937_64 gen(5000 + 100 * k_true + run);
      std::vector<int> membership(I);
      for (int i = 0; i < I; ++i) membership[i] = k_true == 1 ? 0 : i % 2;
      const auto data = oracle::mixture_data({spread, reversed}, {20.0, 20.0}, membership, M, 4, gen);
      ChainConfig cfg;
      cfg.B_gibbs = 2000;
      cfg.B_mh = 2;
      cfg.K_start = 3;
      cfg.sigma2_p = 0.003;
      cfg.sigma2_theta = 9.0;
      cfg.sigma2_gamma = 0.5;
      cfg.seed = 7000 + 100 * k_true + run;
      testutil::WarningCapture quiet;
      const int mode = modal_kplus(run_mfm(data, h, cfg));
      modes[mode]++;
      hits += mode == k_true;
    }
    std::string hist;
    for (const auto& [k, c] : modes) hist += (hist.empty() ? "" : " ") + std::to_string(k) + ":" + std::to_string(c);
    detail += (detail.empty() ? "" : "; ") + std::string("K_true=") + std::to_string(k_true) + " hits " +
              std::to_string(hits) + "/20 (modes " + hist + ")";
    ok = ok && hits >= 18;
  }
  return verdict(ok, detail);
}

// The desk-scale study shared by criteria 6 and 9.
const std::vector<ReplicationResult>& desk_study() {
  static const std::vector<ReplicationResult> results = [] {
    SimScenario base;
    base.I = 50;
    base.J = 50;
    base.replications = 20;
    base.ranking_length = 4;
    const std::vector<int> Rs{4, 24}, Ms{4};
    const std::vector<double> thetas{20.0};
    const auto grid = make_grid(base, Rs, Ms, thetas, 606);
    StudyOptions opts;
    opts.threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    testutil::WarningCapture quiet;
    return run_study(grid, opts);
  }();
  return results;
}

struct CellStats {
  double btl = 0.0, ratings = 0.0, bias = 0.0, abs_err = 0.0;
};

std::map<int, CellStats> cell_stats() {
  std::map<int, CellStats> out;
  std::map<int, int> reps, coords;
  for (const auto& r : desk_study()) {
    auto& c = out[r.scenario.R];
    c.btl += r.btl_inaccuracy;
    c.ratings += r.ratings_inaccuracy;
    reps[r.scenario.R]++;
    for (std::size_t j = 0; j < r.truth.p.size(); ++j) {
      c.bias += r.estimate.p[j] - r.truth.p[j];
      c.abs_err += std::abs(r.estimate.p[j] - r.truth.p[j]);
      coords[r.scenario.R]++;
    }
  }
  for (auto& [R, c] : out) {
    c.btl /= reps[R];
    c.ratings /= reps[R];
    c.bias /= coords[R];
    c.abs_err /= coords[R];
  }
  return out;
}

Outcome criterion6() {
  const auto cells = cell_stats();
  const auto &r4 = cells.at(4), &r24 = cells.at(24);
  const bool ok = r4.btl < r4.ratings && r24.btl < r24.ratings && r24.btl < r4.btl && r24.ratings < r4.ratings;
  return verdict(ok, "R=4: btl " + fmt(r4.btl) + " vs ratings " + fmt(r4.ratings) + "; R=24: btl " + fmt(r24.btl) +
                         " vs ratings " + fmt(r24.ratings));
}

std::optional<fs::path> dataset_config(const std::string& name) {
  const char* root = std::getenv("RANKRATE_DATA_DIR");
  if (!root || !*root) return std::nullopt;
  const fs::path cfg = fs::path(root) / name / "data.cfg";
  if (!fs::exists(cfg)) return std::nullopt;
  return cfg;
}

Outcome criterion7() {
  const auto aibs = dataset_config("aibs"), sushi = dataset_config("sushi");
  if (!aibs || !sushi) {
    return {Status::skip, "AIBS and sushi data not found (set RANKRATE_DATA_DIR with aibs/data.cfg and sushi/data.cfg)"};
  }
  const auto fa = empirical_bayes_beta(load_dataset(Config::load(*aibs)));
  const auto fs_ = empirical_bayes_beta(load_dataset(Config::load(*sushi)));
  const bool ok = std::abs(fa.a - 2.50) <= 0.02 && std::abs(fa.b - 3.77) <= 0.02 && std::abs(fs_.a - 0.26) <= 0.02 &&
                  std::abs(fs_.b - 0.77) <= 0.02;
  return verdict(ok, "AIBS (" + fmt(fa.a) + ", " + fmt(fa.b) + "), sushi (" + fmt(fs_.a) + ", " + fmt(fs_.b) + ")");
}

Outcome criterion8() {
  const auto cfg_path = dataset_config("aibs");
  if (!cfg_path) return {Status::skip, "AIBS data not found (set RANKRATE_DATA_DIR with aibs/data.cfg)"};
  const auto data = load_dataset(Config::load(*cfg_path));
  Hyperparams h;
  h.lambda = 1.0;
  h.xi1 = 2.0;
  h.xi2 = 3.0;
  const auto eb = empirical_bayes_beta(data);
  h.a = eb.a;
  h.b = eb.b;
  h.gamma1 = 10.0;
  h.gamma2 = 0.5;
  int successes = 0;
  std::string detail;
  for (std::uint64_t seed : {1, 2, 3}) {
    ChainConfig cfg;
    cfg.B_gibbs = 1000;
    cfg.B_mh = 10;
    cfg.K_start = data.num_judges();
    cfg.sigma2_p = 0.05;
    cfg.sigma2_theta = 3.0;
    cfg.sigma2_gamma = 0.5;
    cfg.seed = seed;
    testutil::WarningCapture quiet;
    const auto samples = run_mfm(data, h, cfg);
    const int mode = modal_kplus(samples);
    bool ok = mode == 2;
    std::string note = "seed " + std::to_string(seed) + ": mode " + std::to_string(mode);
    if (ok) {
      const auto cs = conditional_summary(samples, 2);
      std::vector<std::string> minority;
      for (int i = 0; i < data.num_judges(); ++i) {
        if (cs.membership[i][1] > 0.5) minority.push_back(data.judge_labels[i]);
      }
      std::vector<std::string> top;
      for (int r = 0; r < 4; ++r) top.push_back(data.object_labels[cs.classes[0].consensus[r]]);
      ok = minority == std::vector<std::string>{"8"} && top == std::vector<std::string>{"18", "6", "8", "19"};
      note += ", minority {";
      for (const auto& m : minority) note += m + (m == minority.back() ? "" : ",");
      note += "}, top " + top[0] + " " + top[1] + " " + top[2] + " " + top[3];
    }
    successes += ok;
    detail += (detail.empty() ? "" : "; ") + note;
  }
  return verdict(successes >= 2, std::to_string(successes) + "/3 seeds; " + detail);
}

Outcome criterion9() {
  const auto cells = cell_stats();
  const auto &r4 = cells.at(4), &r24 = cells.at(24);
  bool ok = std::abs(r24.bias) <= 0.03 && r24.abs_err < r4.abs_err;
  std::string detail = "R=24 mean(p_hat - p) " + fmt(r24.bias, 3) + "; mean |p_hat - p| " + fmt(r4.abs_err, 3) +
                       " (R=4) vs " + fmt(r24.abs_err, 3) + " (R=24)";

  const auto sushi = dataset_config("sushi");
  if (!sushi) {
    detail += "; sushi surrogate skipped (data not found)";
  } else {
    const auto full = load_dataset(Config::load(*sushi));
    PreferenceDataset sub = full;
    std::vector<int> idx(full.num_judges());
    std::iota(idx.begin(), idx.end(), 0);
    std::mt19937_64 gen(909);
    std::shuffle(idx.begin(), idx.end(), gen);
    idx.resize(std::min<std::size_t>(500, idx.size()));
    std::sort(idx.begin(), idx.end());
    sub.judges.clear();
    sub.judge_labels.clear();
    for (int i : idx) {
      sub.judges.push_back(full.judges[i]);
      sub.judges.back().judge = static_cast<int>(sub.judges.size()) - 1;
      sub.judge_labels.push_back(full.judge_labels[i]);
    }
    Hyperparams h;
    h.lambda = 7.0;
    h.xi1 = 2.0;
    h.xi2 = 3.0;
    h.a = 0.26;
    h.b = 0.77;
    h.gamma1 = 20.0;
    h.gamma2 = 1.0;
    ChainConfig cfg;
    cfg.B_gibbs = 1000;
    cfg.B_mh = 10;
    cfg.K_start = 1;
    cfg.sigma2_p = 0.1;
    cfg.sigma2_theta = 3.0;
    cfg.sigma2_gamma = 0.3;
    cfg.seed = 9;
    testutil::WarningCapture quiet;
    const int mode = modal_kplus(run_mfm(sub, h, cfg));
    ok = ok && mode >= 2;
    detail += "; sushi surrogate (I=" + std::to_string(sub.num_judges()) + ") K+ mode " + std::to_string(mode);
  }
  return verdict(ok, detail);
}

#ifdef RANKRATE_CLI_PATH
int run_cli(const std::string& args, const fs::path& log) {
  const std::string cmd = "'" RANKRATE_CLI_PATH "' " + args + " > '" + log.string() + "' 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::map<std::string, std::string> tables(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::directory_iterator(dir)) out[e.path().filename().string()] = testutil::read_file(e.path());
  // Clock lines are the only permitted difference.
  if (auto it = out.find("manifest.txt"); it != out.end()) {
    std::istringstream in(it->second);
    std::string line, kept;
    while (std::getline(in, line)) {
      if (line.rfind("finished_utc", 0) != 0 && line.rfind("wall_seconds", 0) != 0) kept += line + '\n';
    }
    it->second = kept;
  }
  return out;
}
#endif

Outcome criterion10() {
#ifndef RANKRATE_CLI_PATH
  return {Status::skip, "command-line tool not built"};
#else
  testutil::TempDir dir("acceptance-cli");
  std::mt19937_64 gen(10);
  std::vector<int> membership;
  for (int i = 0; i < 20; ++i) membership.push_back(i % 2);
  const auto data = oracle::mixture_data({{0.1, 0.4, 0.6, 0.9, 0.5}, {0.9, 0.6, 0.4, 0.1, 0.5}}, {15.0, 15.0},
                                         membership, 4, 3, gen);
  DatasetFiles files;
  files.ratings = dir / "ratings.csv";
  files.rankings = dir / "rankings.csv";
  files.assignments = dir / "assignments.csv";
  write_dataset(data, files);
  const std::string data_block = "seed = 12\n[data]\nratings = ratings.csv\nrankings = rankings.csv\nassignments = assignments.csv\nM = 4\n";
  const std::string chain = "[chain]\nB_gibbs = 200\nB_mh = 3\nsigma2_p = 0.005\n";
  testutil::write_file(dir / "fit-mfm.cfg", data_block + chain);
  testutil::write_file(dir / "fit-k.cfg", data_block + chain + "[model]\nK = 2\n");
  testutil::write_file(dir / "map.cfg", data_block + "[model]\nK = 2\n");
  testutil::write_file(dir / "simulate.cfg",
                       "seed = 12\n[sim]\nI = 20\nJ = 10\nR = 2, 5\nM = 4\ntheta = 20\nreplications = 2\n");
  testutil::write_file(dir / "gof.cfg", data_block + "[gof]\nsamples = base\nn_rep = 30\n");
  testutil::write_file(dir / "summarize.cfg", data_block + "[summarize]\nsamples = base\n");
  if (run_cli("fit-mfm --config '" + (dir / "fit-mfm.cfg").string() + "' --out '" + (dir / "base").string() + "'",
              dir / "log") != 0) {
    return {Status::fail, "fit-mfm failed: " + testutil::read_file(dir / "log")};
  }
  std::string detail;
  bool ok = true;
  for (const char* sub : {"fit-mfm", "fit-k", "map", "simulate", "gof", "summarize"}) {
    const auto cfg = dir / (std::string(sub) + ".cfg");
    std::map<std::string, std::string> runs[2];
    for (int r = 0; r < 2; ++r) {
      const auto out = dir / (std::string(sub) + "-" + std::to_string(r));
      if (run_cli(std::string(sub) + " --config '" + cfg.string() + "' --out '" + out.string() + "'", dir / "log") != 0) {
        return {Status::fail, std::string(sub) + " failed: " + testutil::read_file(dir / "log")};
      }
      runs[r] = tables(out);
    }
    const bool same = !runs[0].empty() && runs[0] == runs[1];
    ok = ok && same;
    detail += (detail.empty() ? "" : ", ") + std::string(sub) + (same ? " identical" : " DIFFERS") + " (" +
              std::to_string(runs[0].size()) + " tables)";
  }
  return verdict(ok, detail);
#endif
}

}  // namespace

int main() {
  const std::vector<std::pair<int, std::function<Outcome()>>> criteria = {
      {1, criterion1}, {2, criterion2}, {3, criterion3}, {4, criterion4},  {5, criterion5},
      {6, criterion6}, {7, criterion7}, {8, criterion8}, {9, criterion9}, {10, criterion10},
  };
  int failed = 0;
  for (const auto& [id, check] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {Status::fail, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const char* tag = o.status == Status::pass ? "PASS" : o.status == Status::skip ? "SKIP" : "FAIL";
    failed += o.status == Status::fail;
    std::cout << "criterion " << id << ": " << tag << " - " << o.detail << " [" << std::fixed << std::setprecision(1)
              << secs << "s]" << std::defaultfloat << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
