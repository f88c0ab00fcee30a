// rankrate command-line front end.

#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rankrate/config.hpp"
#include "rankrate/diagnostics.hpp"
#include "rankrate/error.hpp"
#include "rankrate/fixed_k.hpp"
#include "rankrate/format.hpp"
#include "rankrate/mfm_sampler.hpp"
#include "rankrate/samples_io.hpp"
#include "rankrate/simulation.hpp"

#ifndef RANKRATE_VERSION
#define RANKRATE_VERSION "unknown"
#endif

namespace fs = std::filesystem;
using namespace rankrate;

namespace {

enum ExitCode : int {
  kOk = 0,
  kInternal = 1,
  kUsage = 2,
  kConfig = 3,
  kData = 4,
  kModel = 5,
};

constexpr const char* kOutEnv = "RANKRATE_OUT";
constexpr const char* kManifestFile = "manifest.txt";

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  int threads = 1;
  std::optional<int> kplus;
};

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 digest failed");
  }
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
  return hex.str();
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  return out;
}

std::string join_labels(const std::vector<ObjectId>& order, const std::vector<std::string>& labels) {
  std::string s;
  for (std::size_t r = 0; r < order.size(); ++r) {
    if (r) s += ' ';
    s += labels[order[r]];
  }
  return s;
}

std::vector<std::string> index_labels(int n) {
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i) out.push_back(std::to_string(i + 1));
  return out;
}

// Output files of one run, in creation order, for the manifest.
class RunOutputs {
 public:
  explicit RunOutputs(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }
  const fs::path& dir() const { return dir_; }
  fs::path add(const std::string& name) {
    files_.push_back(dir_ / name);
    return files_.back();
  }
  void add_all(const std::vector<fs::path>& paths) {
    for (const auto& p : paths) files_.push_back(p);
  }
  const std::vector<fs::path>& files() const { return files_; }

 private:
  fs::path dir_;
  std::vector<fs::path> files_;
};

void write_distribution(RunOutputs& out, const std::string& name, const char* column,
                        const std::map<int, double>& dist) {
  auto f = open_out(out.add(name));
  f << column << ",probability\n";
  for (const auto& [k, p] : dist) f << k << ',' << format_double(p) << '\n';
}

void write_similarity(RunOutputs& out, const SimilarityMatrix& sim, const std::vector<std::string>& judges) {
  auto f = open_out(out.add("similarity.csv"));
  f << "judge";
  for (int j : sim.order) f << ',' << judges[j];
  f << '\n';
  for (int i : sim.order) {
    f << judges[i];
    for (int j : sim.order) f << ',' << format_double(sim.values[i][j]);
    f << '\n';
  }
}

void write_summary(RunOutputs& out, const ConditionalSummary& s, const std::vector<std::string>& objects,
                   const std::vector<std::string>& judges) {
  {
    auto f = open_out(out.add("summary_classes.csv"));
    f << "kplus,class,weight_mean,weight_lo,weight_hi,theta_mean,theta_lo,theta_hi,consensus\n";
    for (std::size_t k = 0; k < s.classes.size(); ++k) {
      const auto& c = s.classes[k];
      f << s.kplus << ',' << k + 1 << ',' << format_double(c.weight_mean) << ',' << format_double(c.weight_lo)
        << ',' << format_double(c.weight_hi) << ',' << format_double(c.theta_mean) << ','
        << format_double(c.theta_lo) << ',' << format_double(c.theta_hi) << ',' << join_labels(c.consensus, objects)
        << '\n';
    }
  }
  {
    auto f = open_out(out.add("summary_p.csv"));
    f << "class,object,mean,lo,hi\n";
    for (std::size_t k = 0; k < s.classes.size(); ++k) {
      const auto& c = s.classes[k];
      for (std::size_t j = 0; j < c.p_mean.size(); ++j) {
        f << k + 1 << ',' << objects[j] << ',' << format_double(c.p_mean[j]) << ',' << format_double(c.p_lo[j])
          << ',' << format_double(c.p_hi[j]) << '\n';
      }
    }
  }
  {
    auto f = open_out(out.add("summary_membership.csv"));
    f << "judge,class,probability\n";
    for (std::size_t i = 0; i < s.membership.size(); ++i) {
      for (std::size_t k = 0; k < s.membership[i].size(); ++k) {
        f << judges[i] << ',' << k + 1 << ',' << format_double(s.membership[i][k]) << '\n';
      }
    }
  }
  {
    auto f = open_out(out.add("summary_info.csv"));
    f << "key,value\n"
      << "kplus," << s.kplus << '\n'
      << "num_draws," << s.num_draws << '\n'
      << "posterior_mass," << format_double(s.posterior_mass) << '\n'
      << "mean_match_distance," << format_double(s.mean_match_distance) << '\n';
  }
}

// Everything derived from a set of posterior draws.
void write_posterior_products(RunOutputs& out, const PosteriorSamples& samples, std::optional<int> kplus,
                              const std::vector<std::string>& objects, const std::vector<std::string>& judges) {
  write_distribution(out, "kplus_distribution.csv", "kplus", kplus_distribution(samples));
  write_distribution(out, "k_distribution.csv", "K", k_distribution(samples));
  write_similarity(out, similarity_matrix(samples), judges);
  write_summary(out, conditional_summary(samples, kplus.value_or(modal_kplus(samples))), objects, judges);
}

struct RunContext {
  std::string subcommand;
  Options opts;
  Config cfg;
  std::uint64_t seed = 1;
  std::string dataset_digest = "none";
};

PreferenceDataset load_data(RunContext& ctx) {
  const auto files = dataset_files(ctx.cfg);
  std::string concat;
  for (const auto& p : {files.ratings, files.rankings, files.assignments}) {
    concat += p ? slurp(*p) : std::string();
    concat += '\0';
  }
  ctx.dataset_digest = sha256_hex(concat);
  return load_dataset(ctx.cfg);
}

void run_fit(RunContext& ctx, RunOutputs& out, bool telescoping) {
  const auto data = load_data(ctx);
  const auto hyper = hyperparams(ctx.cfg, &data);
  const auto chain = chain_config(ctx.cfg, ctx.seed);
  PosteriorSamples samples;
  if (telescoping) {
    samples = run_mfm(data, hyper, chain);
  } else {
    const long long K = ctx.cfg.get_int("model.K");
    if (K < 1) throw ConfigError("model.K must be at least 1");
    samples = run_fixed_k(data, static_cast<int>(K), hyper, chain);
  }
  out.add_all(trace_export(samples, out.dir()));
  write_posterior_products(out, samples, ctx.opts.kplus, data.object_labels, data.judge_labels);
}

void run_map_cmd(RunContext& ctx, RunOutputs& out) {
  const auto data = load_data(ctx);
  const long long K = ctx.cfg.get_int("model.K");
  if (K < 1) throw ConfigError("model.K must be at least 1");
  const bool mle = ctx.cfg.get_bool("map.mle", false);
  auto opts = map_options(ctx.cfg, ctx.seed);
  EMState fit;
  Hyperparams hyper;
  if (mle) {
    hyper = Hyperparams::flat();
    fit = mle_mode(data, static_cast<int>(K), opts);
  } else {
    hyper = hyperparams(ctx.cfg, &data);
    fit = run_map(data, static_cast<int>(K), hyper, opts);
  }

  {
    auto f = open_out(out.add("map_report.txt"));
    f << "mode: " << (mle ? "mle (flat priors, gamma = 1)" : "map") << '\n'
      << "K: " << fit.K() << '\n'
      << "objective: " << format_double(fit.objective) << '\n'
      << "iterations: " << fit.iterations << '\n'
      << "converged: " << (fit.converged ? "yes" : "no") << '\n'
      << "gamma: " << format_double(fit.gamma) << '\n';
    for (int k = 0; k < fit.K(); ++k) {
      f << "class " << k + 1 << ": weight " << format_double(fit.weights[k]) << ", theta "
        << format_double(fit.classes[k].theta) << ", consensus "
        << join_labels(consensus_ranking(fit.classes[k]), data.object_labels) << '\n';
    }
  }
  {
    auto f = open_out(out.add("map_params.csv"));
    f << "class,param,object,value\n";
    for (int k = 0; k < fit.K(); ++k) {
      f << k + 1 << ",weight,," << format_double(fit.weights[k]) << '\n';
      f << k + 1 << ",theta,," << format_double(fit.classes[k].theta) << '\n';
      for (int j = 0; j < data.J; ++j) {
        f << k + 1 << ",p," << data.object_labels[j] << ',' << format_double(fit.classes[k].p[j]) << '\n';
      }
    }
  }
  {
    auto f = open_out(out.add("map_membership.csv"));
    f << "judge,class,probability\n";
    for (int i = 0; i < data.num_judges(); ++i) {
      for (int k = 0; k < fit.K(); ++k) {
        f << data.judge_labels[i] << ',' << k + 1 << ',' << format_double(fit.responsibilities[i][k]) << '\n';
      }
    }
  }
  {
    auto f = open_out(out.add("map_objective_trace.csv"));
    f << "iteration,objective\n";
    for (std::size_t t = 0; t < fit.objective_trace.size(); ++t) {
      f << t + 1 << ',' << format_double(fit.objective_trace[t]) << '\n';
    }
  }
}

void run_simulate(RunContext& ctx, RunOutputs& out) {
  const auto grid = sim_grid(ctx.cfg, ctx.seed);
  StudyOptions study;
  if (ctx.cfg.has("hyper.a") || ctx.cfg.has("hyper.b") || ctx.cfg.has("hyper.gamma1") ||
      ctx.cfg.has("hyper.gamma2")) {
    Hyperparams h = study.hyper;
    h.a = ctx.cfg.get_double("hyper.a", h.a);
    h.b = ctx.cfg.get_double("hyper.b", h.b);
    h.gamma1 = ctx.cfg.get_double("hyper.gamma1", h.gamma1);
    h.gamma2 = ctx.cfg.get_double("hyper.gamma2", h.gamma2);
    h.check();
    study.hyper = h;
  }
  const auto map = map_options(ctx.cfg, ctx.seed);
  study.map.tol = map.tol;
  study.map.max_iter = map.max_iter;
  if (ctx.cfg.has("map.restarts")) study.map.restarts = map.restarts;
  study.threads = ctx.opts.threads;

  const auto results = run_study(grid, study);
  out.add_all(write_study(results, out.dir()));

  auto f = open_out(out.add("sim_summary.csv"));
  f << "scenario,R,M,theta,method,mean_inaccuracy,mean_p_error,mean_abs_p_error\n";
  for (const auto& sc : grid) {
    double btl = 0.0, ratings = 0.0, err = 0.0, abs_err = 0.0;
    int n = 0, np = 0;
    for (const auto& r : results) {
      if (r.scenario.key() != sc.key()) continue;
      btl += r.btl_inaccuracy;
      ratings += r.ratings_inaccuracy;
      ++n;
      for (std::size_t j = 0; j < r.truth.p.size(); ++j) {
        err += r.estimate.p[j] - r.truth.p[j];
        abs_err += std::abs(r.estimate.p[j] - r.truth.p[j]);
        ++np;
      }
    }
    const std::string prefix = sc.key() + "," + std::to_string(sc.R) + "," + std::to_string(sc.M) + "," +
                               format_double(sc.theta) + ",";
    f << prefix << "btl_binomial," << format_double(btl / n) << ',' << format_double(err / np) << ','
      << format_double(abs_err / np) << '\n';
    f << prefix << "ratings_only," << format_double(ratings / n) << ",NA,NA\n";
  }
}

void write_bands(std::ostream& f, const char* stat, const std::vector<StatBand>& bands,
                 const std::vector<std::string>& objects) {
  for (std::size_t j = 0; j < bands.size(); ++j) {
    const auto& b = bands[j];
    f << objects[j] << ',' << stat << ',' << format_double(b.observed) << ',' << format_double(b.replicated_mean)
      << ',' << format_double(b.replicated_lo) << ',' << format_double(b.replicated_hi) << '\n';
  }
}

void run_gof(RunContext& ctx, RunOutputs& out) {
  const auto data = load_data(ctx);
  const auto samples = read_samples(ctx.cfg.get_path("gof.samples"));
  if (samples.num_judges != data.num_judges() || samples.num_objects != data.J) {
    throw DataError("gof.samples do not match the configured dataset");
  }
  const int n_rep = static_cast<int>(ctx.cfg.get_int("gof.n_rep", std::min<long long>(200, samples.draws.size())));
  Rng rng = make_stream(ctx.seed, "gof");
  const auto report = posterior_predictive(samples, data, n_rep, rng);
  {
    auto f = open_out(out.add("gof_ratings.csv"));
    f << "object,statistic,observed,replicated_mean,replicated_lo,replicated_hi\n";
    write_bands(f, "mean", report.rating_mean, data.object_labels);
    write_bands(f, "variance", report.rating_variance, data.object_labels);
  }
  if (!report.observed_pairwise.empty()) {
    auto f = open_out(out.add("gof_pairwise.csv"));
    f << "object_a,object_b,observed,replicated_mean,replicated_lo,replicated_hi\n";
    for (int a = 0; a < data.J; ++a) {
      for (int b = 0; b < data.J; ++b) {
        if (a == b) continue;
        f << data.object_labels[a] << ',' << data.object_labels[b] << ','
          << format_double(report.observed_pairwise[a][b]) << ',' << format_double(report.replicated_pairwise[a][b])
          << ',' << format_double(report.replicated_pairwise_lo[a][b]) << ','
          << format_double(report.replicated_pairwise_hi[a][b]) << '\n';
      }
    }
  }
}

void run_summarize(RunContext& ctx, RunOutputs& out) {
  const auto samples = read_samples(ctx.cfg.get_path("summarize.samples"));
  std::vector<std::string> objects = index_labels(samples.num_objects);
  std::vector<std::string> judges = index_labels(samples.num_judges);
  if (ctx.cfg.has("data.ratings") || ctx.cfg.has("data.rankings")) {
    const auto data = load_data(ctx);
    if (samples.num_judges != data.num_judges() || samples.num_objects != data.J) {
      throw DataError("summarize.samples do not match the configured dataset");
    }
    objects = data.object_labels;
    judges = data.judge_labels;
  }
  std::optional<int> kplus = ctx.opts.kplus;
  if (!kplus && ctx.cfg.has("summarize.kplus")) kplus = static_cast<int>(ctx.cfg.get_int("summarize.kplus"));
  write_posterior_products(out, samples, kplus, objects, judges);
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream s;
  s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return s.str();
}

void write_manifest(const RunContext& ctx, const RunOutputs& out, double seconds) {
  auto f = open_out(out.dir() / kManifestFile);
  f << "version: " << RANKRATE_VERSION << '\n'
    << "subcommand: " << ctx.subcommand << '\n'
    << "seed: " << ctx.seed << '\n'
    << "config: " << ctx.cfg.origin().string() << '\n'
    << "config_sha256: " << sha256_hex(ctx.cfg.text()) << '\n'
    << "dataset_sha256: " << ctx.dataset_digest << '\n'
    << "threads: " << ctx.opts.threads << '\n'
    << "finished_utc: " << utc_timestamp() << '\n'
    << "wall_seconds: " << std::fixed << std::setprecision(3) << seconds << '\n';
  for (const auto& p : out.files()) {
    f << "output: " << p.filename().string() << ' ' << sha256_hex(slurp(p)) << '\n';
  }
}

int run(const std::string& sub, const Options& opts) {
  const auto start = std::chrono::steady_clock::now();
  RunContext ctx{sub, opts, Config::load(opts.config)};
  for (const auto& key : unknown_keys(ctx.cfg)) log::warn("unknown config key '" + key + "' ignored");
  ctx.seed = opts.seed ? *opts.seed : static_cast<std::uint64_t>(ctx.cfg.get_int("seed", 1));
  if (opts.threads < 1) throw ConfigError("--threads must be at least 1");

  fs::path dir;
  if (opts.out) {
    dir = *opts.out;
  } else if (const char* env = std::getenv(kOutEnv); env && *env) {
    dir = env;
  } else if (ctx.cfg.has("output.dir")) {
    dir = ctx.cfg.get_path("output.dir");
  } else {
    dir = fs::path("rankrate-out") / sub;
  }
  RunOutputs out(dir);

  if (sub == "fit-mfm") {
    run_fit(ctx, out, true);
  } else if (sub == "fit-k") {
    run_fit(ctx, out, false);
  } else if (sub == "map") {
    run_map_cmd(ctx, out);
  } else if (sub == "simulate") {
    run_simulate(ctx, out);
  } else if (sub == "gof") {
    run_gof(ctx, out);
  } else {
    run_summarize(ctx, out);
  }

  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_manifest(ctx, out, seconds);
  std::cout << "wrote " << out.files().size() + 1 << " files to " << out.dir().string() << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian rankings-and-ratings mixture models"};
  app.set_version_flag("--version", RANKRATE_VERSION);
  app.require_subcommand(1);

  Options opts;
  const std::vector<std::pair<const char*, const char*>> subs = {
      {"fit-mfm", "Telescoping sampler with a random number of classes"},
      {"fit-k", "Gibbs sampler with a fixed number of classes"},
      {"map", "EM estimate of the posterior mode (or MLE with map.mle = true)"},
      {"simulate", "Conference-review simulation study"},
      {"gof", "Posterior predictive checks for a saved posterior sample"},
      {"summarize", "Summaries of a saved posterior sample"},
  };
  for (const auto& [name, help] : subs) {
    auto* sc = app.add_subcommand(name, help);
    sc->add_option("--config", opts.config, "Run configuration file")->required();
    sc->add_option("--seed", opts.seed, "Root seed (overrides the config)");
    sc->add_option("--out", opts.out, std::string("Output directory (overrides ") + kOutEnv + " and output.dir)");
    sc->add_option("--threads", opts.threads, "Worker thread cap");
    if (std::string(name) == "summarize" || std::string(name).starts_with("fit")) {
      sc->add_option("--kplus", opts.kplus, "Number of non-empty classes to summarize (default: modal)");
    }
  }

  if (argc > 1 && argv[1][0] != '-') {
    const std::string first = argv[1];
    const bool known = std::any_of(subs.begin(), subs.end(), [&](const auto& s) { return first == s.first; });
    if (!known) {
      std::cerr << "error: unknown subcommand '" << first << "'\n";
      return kUsage;
    }
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }

  const std::string sub = app.get_subcommands().front()->get_name();
  try {
    return run(sub, opts);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kData;
  } catch (const ModelError& e) {
    std::cerr << "model error: " << e.what() << '\n';
    return kModel;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInternal;
  }
}
