#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "rankrate/mfm_sampler.hpp"

namespace rankrate {

// Gibbs sampler for the latent class model with K held fixed: labels,
// class-parameter MH for all K classes, gamma and weights. No relabeling.
PosteriorSamples run_fixed_k(const PreferenceDataset& data, int K, const Hyperparams& hyper,
                             const ChainConfig& config);

struct EMState {
  std::vector<double> weights;
  double gamma = 1.0;
  std::vector<ClassParams> classes;
  std::vector<std::vector<double>> responsibilities;  // I x K
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> objective_trace;  // objective after each iteration

  int K() const { return static_cast<int>(classes.size()); }
};

struct MapOptions {
  double tol = 1e-6;
  int restarts = 5;
  int max_iter = 1000;
  std::uint64_t seed = 1;
  // When set, gamma is held at this value and its M-step is skipped.
  std::optional<double> fixed_gamma;
  // Settings of the inner (p_k, theta_k) maximization.
  double p_lower = 1e-6;
  double p_upper = 1.0 - 1e-6;
  double theta_lower = 1e-6;
  double theta_upper = 1e3;
  double gamma_lower = 1e-4;
  double gamma_upper = 50.0;
  double inner_grad_tol = 1e-8;
};

// Observed-data log posterior: sum_i log sum_k pi_k P[X_i, Pi_i | k] plus the
// log priors on gamma, pi, p and theta.
double em_objective(const PreferenceDataset& data, const EMState& state, const Hyperparams& hyper);

// Responsibilities for every judge (one row per judge, rows sum to one).
std::vector<std::vector<double>> e_step(const PreferenceDataset& data, const EMState& state);

// Weighted single-class objective maximized in the (p_k, theta_k) M-step.
double class_m_objective(const PreferenceDataset& data, std::span<const double> weights_k,
                         const ClassParams& params, const Hyperparams& hyper);

// The gamma M-step target: log Dirichlet(pi | gamma) + log prior(gamma).
double gamma_m_objective(double gamma, std::span<const double> weights, const Hyperparams& hyper);

// Bayesian EM from a given starting point.
EMState run_em(const PreferenceDataset& data, EMState start, const Hyperparams& hyper,
               const MapOptions& options);

// MAP estimate with `options.restarts` prior-drawn starts; best objective wins.
EMState run_map(const PreferenceDataset& data, int K, const Hyperparams& hyper, const MapOptions& options = {});

// Flat-prior bundle (maximum likelihood) with gamma fixed at one.
EMState mle_mode(const PreferenceDataset& data, int K, MapOptions options = {});

// Prior-drawn EM starting point. Improper priors fall back to fixed diffuse
// starting distributions (theta ~ Gamma(2, 0.2), gamma = 1).
EMState em_initial_state(const PreferenceDataset& data, int K, const Hyperparams& hyper, Rng& rng);

}  // namespace rankrate
