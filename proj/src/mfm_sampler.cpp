#include "rankrate/mfm_sampler.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <numeric>
#include <sstream>

#include "rankrate/error.hpp"
#include "rankrate/fixed_k.hpp"

namespace rankrate {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// For every object, the judges who assessed it and their rating (-1 if unrated).
struct Assessor {
  int judge;
  int rating;
};

std::vector<std::vector<Assessor>> assessors_by_object(const PreferenceDataset& data) {
  std::vector<std::vector<Assessor>> out(data.J);
  for (int i = 0; i < data.num_judges(); ++i) {
    const auto& rec = data.judges[i];
    for (ObjectId j : rec.assessed) out[j].push_back({i, rec.rating_of(j).value_or(-1)});
  }
  return out;
}

double binomial_kernel(int x, int M, double p) {
  double out = 0.0;
  if (x > 0) out += x * std::log(p);
  if (x < M) out += (M - x) * std::log1p(-p);
  return out;
}

void warn_rate(const char* block, long long accepts, long long tries) {
  if (tries == 0) return;
  const double rate = AcceptanceStats::rate(accepts, tries);
  if (rate < 0.1 || rate > 0.6) {
    std::ostringstream msg;
    msg << block << " acceptance rate " << rate << " outside [0.1, 0.6]; consider retuning its proposal variance";
    log::warn(msg.str());
  }
}

}  // namespace

void ChainConfig::check(int num_judges) const {
  if (B_gibbs < 1) throw ConfigError("B_gibbs must be at least 1");
  if (B_mh < 0) throw ConfigError("B_mh must be non-negative");
  if (K_start < 1 || K_start > num_judges) throw ConfigError("K_start must lie in [1, I]");
  if (!(sigma2_p > 0.0) || !(sigma2_theta > 0.0) || !(sigma2_gamma > 0.0)) {
    throw ConfigError("proposal variances must be positive");
  }
  if (thin < 1) throw ConfigError("thin must be at least 1");
  if (effective_burn_in() >= B_gibbs) throw ConfigError("burn_in must be smaller than B_gibbs");
}

ChainStreams::ChainStreams(std::uint64_t seed)
    : init(make_stream(seed, "init")),
      labels(make_stream(seed, "labels")),
      mh_p(make_stream(seed, "mh-p")),
      mh_theta(make_stream(seed, "mh-theta")),
      K(make_stream(seed, "K")),
      gamma(make_stream(seed, "gamma")),
      weights(make_stream(seed, "weights")) {}

void class_log_weights(const JudgeRecord& judge, std::span<const double> weights,
                       std::span<const ClassParams> classes, int M, std::span<double> out) {
  for (std::size_t k = 0; k < weights.size(); ++k) {
    out[k] = weights[k] > 0.0 ? std::log(weights[k]) + log_btl_binomial(judge, classes[k], M) : kNegInf;
  }
}

std::vector<double> label_posterior(const JudgeRecord& judge, std::span<const double> weights,
                                    std::span<const ClassParams> classes, int M) {
  std::vector<double> out(weights.size());
  class_log_weights(judge, weights, classes, M, out);
  if (normalize_log_weights(out) == kNegInf) {
    throw ModelError("judge " + std::to_string(judge.judge) + " inconsistent with all classes");
  }
  return out;
}

void recount(MixtureState& state) {
  state.counts.assign(state.K, 0);
  for (int zi : state.z) ++state.counts.at(zi);
  state.Kplus = static_cast<int>(std::count_if(state.counts.begin(), state.counts.end(), [](int n) { return n > 0; }));
}

void relabel_nonempty_first(MixtureState& state) {
  const int K = state.K;
  std::vector<int> order(K);
  std::iota(order.begin(), order.end(), 0);
  std::stable_partition(order.begin(), order.end(), [&](int k) { return state.counts[k] > 0; });
  std::vector<int> new_index(K);
  for (int k = 0; k < K; ++k) new_index[order[k]] = k;

  std::vector<ClassParams> classes(K);
  std::vector<double> weights(K);
  std::vector<int> counts(K);
  for (int k = 0; k < K; ++k) {
    classes[k] = std::move(state.classes[order[k]]);
    weights[k] = state.weights[order[k]];
    counts[k] = state.counts[order[k]];
  }
  state.classes = std::move(classes);
  state.weights = std::move(weights);
  state.counts = std::move(counts);
  for (int& zi : state.z) zi = new_index[zi];
}

void update_labels(MixtureState& state, const PreferenceDataset& data, Rng& rng, bool relabel) {
  std::vector<double> lw(state.K);
  for (int i = 0; i < data.num_judges(); ++i) {
    const auto& judge = data.judges[i];
    class_log_weights(judge, state.weights, state.classes, data.M, lw);
    if (normalize_log_weights(lw) == kNegInf) {
      throw ModelError("judge " + data.judge_labels.at(i) + " inconsistent with all classes");
    }
    state.z[i] = categorical_draw(rng, lw, 1.0);
  }
  recount(state);
  if (relabel) relabel_nonempty_first(state);
}

void update_class_params(MixtureState& state, const PreferenceDataset& data, const Hyperparams& hyper,
                         const ChainConfig& config, Rng& rng_p, Rng& rng_theta, int num_classes,
                         AcceptanceStats* stats) {
  const int I = data.num_judges();
  const int M = data.M;
  const double sd_p = std::sqrt(config.sigma2_p);
  const double sd_theta = std::sqrt(config.sigma2_theta);
  const auto assessors = assessors_by_object(data);

  std::vector<std::vector<int>> members(num_classes);
  for (int i = 0; i < I; ++i) {
    if (state.z[i] < num_classes) members[state.z[i]].push_back(i);
  }

  std::vector<double> rank_ll(I, 0.0);
  std::vector<std::pair<int, double>> proposed;
  AcceptanceStats local;

  for (int k = 0; k < num_classes; ++k) {
    ClassParams& cp = state.classes[k];
    for (int i : members[k]) {
      const auto& rec = data.judges[i];
      rank_ll[i] = log_btl_ranking(rec.ranking, rec.assessed, cp);
    }

    for (int sweep = 0; sweep < config.B_mh; ++sweep) {
      for (int j = 0; j < data.J; ++j) {
        ++local.p_tries;
        const double p_old = cp.p[j];
        const double p_new = p_old + sd_p * normal(rng_p, 0.0, 1.0);
        if (!(p_new > 0.0 && p_new < 1.0)) continue;  // outside the prior support

        double delta = log_prior_p(p_new, hyper.a, hyper.b) - log_prior_p(p_old, hyper.a, hyper.b);
        proposed.clear();
        cp.p[j] = p_new;
        for (const Assessor& as : assessors[j]) {
          if (state.z[as.judge] != k) continue;
          if (as.rating >= 0) {
            delta += binomial_kernel(as.rating, M, p_new) - binomial_kernel(as.rating, M, p_old);
          }
          const auto& rec = data.judges[as.judge];
          if (!rec.ranking.empty()) {
            const double ll = log_btl_ranking(rec.ranking, rec.assessed, cp);
            delta += ll - rank_ll[as.judge];
            proposed.emplace_back(as.judge, ll);
          }
        }
        const double u = uniform01(rng_p);
        if (std::isnan(delta) || !(std::log(u) < delta)) {
          cp.p[j] = p_old;
          continue;
        }
        ++local.p_accepts;
        for (const auto& [i, ll] : proposed) rank_ll[i] = ll;
      }

      ++local.theta_tries;
      const double t_old = cp.theta;
      const double t_new = t_old + sd_theta * normal(rng_theta, 0.0, 1.0);
      if (!(t_new > 0.0)) continue;
      double delta = log_prior_theta(t_new, hyper.gamma1, hyper.gamma2) -
                     log_prior_theta(t_old, hyper.gamma1, hyper.gamma2);
      proposed.clear();
      cp.theta = t_new;
      for (int i : members[k]) {
        const auto& rec = data.judges[i];
        if (rec.ranking.empty()) continue;
        const double ll = log_btl_ranking(rec.ranking, rec.assessed, cp);
        delta += ll - rank_ll[i];
        proposed.emplace_back(i, ll);
      }
      const double u = uniform01(rng_theta);
      if (std::isnan(delta) || !(std::log(u) < delta)) {
        cp.theta = t_old;
        continue;
      }
      ++local.theta_accepts;
      for (const auto& [i, ll] : proposed) rank_ll[i] = ll;
    }
  }

  if (stats) {
    stats->p_tries += local.p_tries;
    stats->p_accepts += local.p_accepts;
    stats->theta_tries += local.theta_tries;
    stats->theta_accepts += local.theta_accepts;
  }
}

std::vector<double> k_conditional_log_weights(int Kplus, double gamma, int num_judges, double lambda) {
  std::vector<double> out;
  double max = kNegInf;
  const double I = num_judges;
  for (int K = Kplus;; ++K) {
    const double lw = log_prior_K(K, lambda) + std::lgamma(K + 1.0) - std::lgamma(K - Kplus + 1.0) +
                      std::lgamma(gamma * K) - std::lgamma(I + gamma * K);
    out.push_back(lw);
    max = std::max(max, lw);
    if (K >= Kplus + 200 && lw < max - 27.0) break;
    if (K - Kplus >= 1000000) break;
  }
  return out;
}

void update_K(MixtureState& state, const Hyperparams& hyper, int num_judges, Rng& rng) {
  const auto lw = k_conditional_log_weights(state.Kplus, state.gamma, num_judges, hyper.lambda);
  const int offset = categorical_from_log(rng, lw);
  if (offset < 0) throw ModelError("K conditional has no mass");
  state.K = state.Kplus + offset;
}

double log_gamma_conditional(double gamma, std::span<const int> counts, int K, int num_judges,
                             const Hyperparams& hyper) {
  if (!(gamma > 0.0)) return kNegInf;
  double out = log_prior_gamma(gamma, hyper.xi1, hyper.xi2) + std::lgamma(gamma * K) -
               std::lgamma(num_judges + gamma * K);
  const double lg = std::lgamma(gamma);
  for (int n : counts) {
    if (n > 0) out += std::lgamma(n + gamma) - lg;
  }
  return out;
}

bool update_gamma(MixtureState& state, const Hyperparams& hyper, const ChainConfig& config, int num_judges,
                  Rng& rng) {
  const double proposal = state.gamma + std::sqrt(config.sigma2_gamma) * normal(rng, 0.0, 1.0);
  if (!(proposal > 0.0)) return false;
  const double delta = log_gamma_conditional(proposal, state.counts, state.K, num_judges, hyper) -
                       log_gamma_conditional(state.gamma, state.counts, state.K, num_judges, hyper);
  const double u = uniform01(rng);
  if (!(std::log(u) < delta)) return false;
  state.gamma = proposal;
  return true;
}

void augment_and_update_weights(MixtureState& state, const Hyperparams& hyper, int num_objects, Rng& rng,
                                bool augment) {
  state.classes.resize(state.K);
  state.counts.resize(state.K, 0);
  if (augment) {
    for (int k = state.Kplus; k < state.K; ++k) {
      state.classes[k] = sample_class_params_prior(hyper, num_objects, rng);
    }
  }
  std::vector<double> alpha(state.K);
  for (int k = 0; k < state.K; ++k) alpha[k] = state.gamma + state.counts[k];
  state.weights = dirichlet_draw(rng, alpha);
}

double log_joint(const MixtureState& state, const PreferenceDataset& data, const Hyperparams& hyper,
                 bool telescoping) {
  const int I = data.num_judges();
  double out = 0.0;
  for (int i = 0; i < I; ++i) out += log_btl_binomial(data.judges[i], state.classes[state.z[i]], data.M);
  // Labels given K and gamma with the weights integrated out.
  const double g = state.gamma;
  out += std::lgamma(g * state.K) - std::lgamma(I + g * state.K);
  for (int n : state.counts) {
    if (n > 0) out += std::lgamma(n + g) - std::lgamma(g);
  }
  out += log_prior_gamma(g, hyper.xi1, hyper.xi2);
  if (telescoping) out += log_prior_K(state.K, hyper.lambda);
  for (const auto& cp : state.classes) out += log_prior_class(cp, hyper);
  return out;
}

ClassParams initial_class_params(const Hyperparams& hyper, int num_objects, Rng& rng) {
  if (hyper.gamma2 > 0.0) return sample_class_params_prior(hyper, num_objects, rng);
  Hyperparams diffuse = hyper;
  diffuse.gamma1 = 2.0;
  diffuse.gamma2 = 0.2;
  return sample_class_params_prior(diffuse, num_objects, rng);
}

MixtureState initial_state_from_prior(const PreferenceDataset& data, const Hyperparams& hyper, int K, Rng& rng) {
  MixtureState state;
  state.K = K;
  state.gamma = hyper.xi2 > 0.0 ? gamma_draw(rng, hyper.xi1, hyper.xi2) : 1.0;
  const std::vector<double> alpha(K, state.gamma);
  state.weights = dirichlet_draw(rng, alpha);
  for (int k = 0; k < K; ++k) state.classes.push_back(initial_class_params(hyper, data.J, rng));
  std::uniform_int_distribution<int> pick(0, K - 1);
  state.z.resize(data.num_judges());
  for (int& zi : state.z) zi = pick(rng);
  recount(state);
  return state;
}

std::string check_state(const MixtureState& state, int num_judges, bool telescoping) {
  std::ostringstream err;
  if (state.K < 1) return "K < 1";
  if (static_cast<int>(state.weights.size()) != state.K) return "weights size differs from K";
  if (static_cast<int>(state.classes.size()) != state.K) return "classes size differs from K";
  if (static_cast<int>(state.counts.size()) != state.K) return "counts size differs from K";
  if (static_cast<int>(state.z.size()) != num_judges) return "label vector size differs from I";
  double total = 0.0;
  for (double w : state.weights) {
    if (!(w >= 0.0)) return "negative weight";
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    err << "weights sum to " << total;
    return err.str();
  }
  std::vector<int> counts(state.K, 0);
  for (int zi : state.z) {
    if (zi < 0 || zi >= state.K) return "label out of range";
    ++counts[zi];
  }
  if (counts != state.counts) return "counts inconsistent with labels";
  const int kplus = static_cast<int>(std::count_if(counts.begin(), counts.end(), [](int n) { return n > 0; }));
  if (kplus != state.Kplus) return "Kplus inconsistent with counts";
  if (telescoping) {
    for (int k = 0; k < state.K; ++k) {
      if ((counts[k] > 0) != (k < state.Kplus)) return "non-empty classes are not first";
    }
  }
  return {};
}

namespace detail {

PosteriorSamples run_chain(const PreferenceDataset& data, const Hyperparams& hyper, const ChainConfig& config,
                           int K, bool telescoping) {
  hyper.check();
  require_valid(data);
  const int I = data.num_judges();
  ChainConfig cfg = config;
  if (!telescoping) cfg.K_start = std::min(K, I);
  cfg.check(I);
  if (K < 1) throw ConfigError("K must be at least 1");

  ChainStreams streams(cfg.seed);
  MixtureState state;
  if (cfg.init == InitMode::map) {
    MapOptions opts;
    opts.restarts = 1;
    opts.seed = cfg.seed;
    const EMState em = run_map(data, K, hyper, opts);
    state.K = K;
    state.gamma = em.gamma;
    state.weights = em.weights;
    state.classes = em.classes;
    state.z.resize(I);
    for (int i = 0; i < I; ++i) {
      const auto& row = em.responsibilities[i];
      state.z[i] = static_cast<int>(std::max_element(row.begin(), row.end()) - row.begin());
    }
    recount(state);
  } else {
    state = initial_state_from_prior(data, hyper, K, streams.init);
  }

  PosteriorSamples out;
  out.num_judges = I;
  out.num_objects = data.J;
  out.telescoping = telescoping;
  const int burn = cfg.effective_burn_in();
  out.draws.reserve((cfg.B_gibbs - burn) / cfg.thin);

  for (int t = 1; t <= cfg.B_gibbs; ++t) {
    update_labels(state, data, streams.labels, telescoping);
    const int n_update = telescoping ? state.Kplus : state.K;
    update_class_params(state, data, hyper, cfg, streams.mh_p, streams.mh_theta, n_update, &out.acceptance);
    if (telescoping) update_K(state, hyper, I, streams.K);
    ++out.acceptance.gamma_tries;
    if (update_gamma(state, hyper, cfg, I, streams.gamma)) ++out.acceptance.gamma_accepts;
    augment_and_update_weights(state, hyper, data.J, streams.weights, telescoping);

    if (t > burn && (t - burn) % cfg.thin == 0) {
      Draw d;
      d.iter = t;
      d.K = state.K;
      d.Kplus = state.Kplus;
      d.gamma = state.gamma;
      d.weights = state.weights;
      d.z = state.z;
      d.classes = state.classes;
      d.logpost = log_joint(state, data, hyper, telescoping);
      out.draws.push_back(std::move(d));
    }
    if (cfg.progress_every > 0 && t % cfg.progress_every == 0) {
      std::clog << "sweep " << t << "/" << cfg.B_gibbs << ": K=" << state.K << " Kplus=" << state.Kplus
                << " gamma=" << state.gamma << '\n';
    }
  }

  const auto& acc = out.acceptance;
  warn_rate("p", acc.p_accepts, acc.p_tries);
  warn_rate("theta", acc.theta_accepts, acc.theta_tries);
  warn_rate("gamma", acc.gamma_accepts, acc.gamma_tries);
  return out;
}

}  // namespace detail

PosteriorSamples run_mfm(const PreferenceDataset& data, const Hyperparams& hyper, const ChainConfig& config) {
  return detail::run_chain(data, hyper, config, config.K_start, true);
}

}  // namespace rankrate
