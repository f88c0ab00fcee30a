#include "rankrate/fixed_k.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "rankrate/error.hpp"
#include "rankrate/optimize.hpp"

namespace rankrate {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kWeightFloor = 1e-8;

double log_sum_exp(std::span<const double> v) {
  double max = kNegInf;
  for (double x : v) max = std::max(max, x);
  if (max == kNegInf) return kNegInf;
  double s = 0.0;
  for (double x : v) s += std::exp(x - max);
  return max + std::log(s);
}

// Part of the expected complete-data log posterior that depends on pi.
double weight_target(std::span<const double> weights, std::span<const double> mass, double gamma) {
  double out = 0.0;
  for (std::size_t k = 0; k < weights.size(); ++k) out += (mass[k] + gamma - 1.0) * std::log(weights[k]);
  return out;
}

std::vector<double> closed_form_weights(std::span<const double> mass, double gamma, int& floors) {
  const std::size_t K = mass.size();
  // pi_k = (gamma - 1 + n_k) / (K gamma - K + I); the denominator is the sum
  // of the numerators.
  std::vector<double> w(K);
  double positive_total = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    w[k] = gamma - 1.0 + mass[k];
    positive_total += std::max(w[k], 0.0);
  }
  bool floored = false;
  for (double& x : w) {
    x = positive_total > 0.0 ? x / positive_total : 0.0;
    if (!(x > kWeightFloor)) {
      x = kWeightFloor;
      floored = true;
    }
  }
  if (floored) ++floors;
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  for (double& x : w) x /= total;
  return w;
}

void clamp_into_box(EMState& state, const MapOptions& opt) {
  for (auto& cp : state.classes) {
    for (double& p : cp.p) p = std::clamp(p, opt.p_lower, opt.p_upper);
    cp.theta = std::clamp(cp.theta, opt.theta_lower, opt.theta_upper);
  }
}

}  // namespace

PosteriorSamples run_fixed_k(const PreferenceDataset& data, int K, const Hyperparams& hyper,
                             const ChainConfig& config) {
  return detail::run_chain(data, hyper, config, K, false);
}

std::vector<std::vector<double>> e_step(const PreferenceDataset& data, const EMState& state) {
  std::vector<std::vector<double>> out;
  out.reserve(data.judges.size());
  for (const auto& judge : data.judges) {
    out.push_back(label_posterior(judge, state.weights, state.classes, data.M));
  }
  return out;
}

double em_objective(const PreferenceDataset& data, const EMState& state, const Hyperparams& hyper) {
  const int K = state.K();
  std::vector<double> lw(K);
  double out = 0.0;
  for (const auto& judge : data.judges) {
    class_log_weights(judge, state.weights, state.classes, data.M, lw);
    out += log_sum_exp(lw);
  }
  out += log_prior_gamma(state.gamma, hyper.xi1, hyper.xi2);
  out += log_dirichlet_symmetric(state.weights, state.gamma);
  for (const auto& cp : state.classes) out += log_prior_class(cp, hyper);
  return out;
}

double class_m_objective(const PreferenceDataset& data, std::span<const double> weights_k,
                         const ClassParams& params, const Hyperparams& hyper) {
  double out = log_prior_class(params, hyper);
  for (int i = 0; i < data.num_judges(); ++i) {
    if (weights_k[i] == 0.0) continue;
    out += weights_k[i] * log_btl_binomial(data.judges[i], params, data.M);
  }
  return out;
}

double gamma_m_objective(double gamma, std::span<const double> weights, const Hyperparams& hyper) {
  return log_dirichlet_symmetric(weights, gamma) + log_prior_gamma(gamma, hyper.xi1, hyper.xi2);
}

EMState run_em(const PreferenceDataset& data, EMState start, const Hyperparams& hyper, const MapOptions& options) {
  if (!(options.tol > 0.0)) throw ConfigError("EM tolerance must be positive");
  const int I = data.num_judges();
  const int J = data.J;
  const int K = start.K();
  if (K < 1) throw ConfigError("K must be at least 1");

  EMState state = std::move(start);
  clamp_into_box(state, options);
  if (options.fixed_gamma) state.gamma = *options.fixed_gamma;
  double objective = em_objective(data, state, hyper);
  state.objective_trace.clear();

  std::vector<double> lower(J + 1, options.p_lower), upper(J + 1, options.p_upper);
  lower[J] = options.theta_lower;
  upper[J] = options.theta_upper;
  BoxOptions box;
  box.grad_tol = options.inner_grad_tol;

  state.converged = false;
  int floors = 0;
  for (int it = 1; it <= options.max_iter; ++it) {
    const auto resp = e_step(data, state);
    std::vector<double> mass(K, 0.0);
    for (const auto& row : resp) {
      for (int k = 0; k < K; ++k) mass[k] += row[k];
    }

    // pi, closed form
    if (K > 1) {
      auto w = closed_form_weights(mass, state.gamma, floors);
      if (weight_target(w, mass, state.gamma) >= weight_target(state.weights, mass, state.gamma)) {
        state.weights = std::move(w);
      }
    }

    // gamma, univariate search
    if (!options.fixed_gamma) {
      auto target = [&](double g) { return gamma_m_objective(g, state.weights, hyper); };
      const auto best = golden_section_maximize(target, options.gamma_lower, options.gamma_upper);
      if (best.value > target(state.gamma)) state.gamma = best.x;
    }

    // (p_k, theta_k), bounded quasi-Newton
    std::vector<double> column(I);
    for (int k = 0; k < K; ++k) {
      for (int i = 0; i < I; ++i) column[i] = resp[i][k];
      ClassParams trial = state.classes[k];
      auto f = [&](std::span<const double> x) {
        std::copy(x.begin(), x.begin() + J, trial.p.begin());
        trial.theta = x[J];
        return class_m_objective(data, column, trial, hyper);
      };
      std::vector<double> x0(state.classes[k].p);
      x0.push_back(state.classes[k].theta);
      const auto result = maximize_box(f, std::move(x0), lower, upper, box);
      std::copy(result.x.begin(), result.x.begin() + J, state.classes[k].p.begin());
      state.classes[k].theta = result.x[J];
    }

    const double next = em_objective(data, state, hyper);
    if (next < objective - 10.0 * options.tol) {
      std::ostringstream msg;
      msg.precision(12);
      msg << "EM regression: objective fell from " << objective << " to " << next << " at iteration " << it;
      throw ModelError(msg.str());
    }
    state.objective_trace.push_back(next);
    state.iterations = it;
    const double change = std::abs(next - objective);
    objective = next;
    if (change < options.tol) {
      state.converged = true;
      break;
    }
  }

  if (floors > 0) {
    log::warn("closed-form class weight not positive in " + std::to_string(floors) +
              " EM iteration(s); floored at 1e-8 and renormalized");
  }
  state.objective = objective;
  state.responsibilities = e_step(data, state);
  if (!std::isfinite(state.objective)) throw ModelError("EM objective is not finite");
  return state;
}

EMState em_initial_state(const PreferenceDataset& data, int K, const Hyperparams& hyper, Rng& rng) {
  EMState s;
  s.gamma = hyper.xi2 > 0.0 ? gamma_draw(rng, hyper.xi1, hyper.xi2) : 1.0;
  s.weights.assign(K, 1.0 / K);
  for (int k = 0; k < K; ++k) s.classes.push_back(initial_class_params(hyper, data.J, rng));
  return s;
}

EMState run_map(const PreferenceDataset& data, int K, const Hyperparams& hyper, const MapOptions& options) {
  hyper.check();
  require_valid(data);
  if (K < 1) throw ConfigError("K must be at least 1");
  if (options.restarts < 1) throw ConfigError("restarts must be at least 1");

  std::optional<EMState> best;
  std::string last_error;
  for (int r = 0; r < options.restarts; ++r) {
    Rng rng = make_stream(options.seed, "em-restart", static_cast<std::uint64_t>(r));
    try {
      EMState fit = run_em(data, em_initial_state(data, K, hyper, rng), hyper, options);
      if (!best || fit.objective > best->objective) best = std::move(fit);
    } catch (const ModelError& e) {
      last_error = e.what();
      log::warn("EM restart " + std::to_string(r) + " failed: " + last_error);
    }
  }
  if (!best) throw ModelError("all EM restarts failed: " + last_error);
  return *best;
}

EMState mle_mode(const PreferenceDataset& data, int K, MapOptions options) {
  options.fixed_gamma = 1.0;
  return run_map(data, K, Hyperparams::flat(), options);
}

}  // namespace rankrate
