#pragma once

#include "rankrate/btl_binomial.hpp"
#include "rankrate/dataset.hpp"
#include "rankrate/rng.hpp"

namespace rankrate {

// Prior settings. Gamma densities use shape/rate, so the mean of theta is
// gamma1 / gamma2. A zero rate gives the improper density x^(shape - 1).
struct Hyperparams {
  double lambda = 1.0;  // K - 1 ~ Poisson(lambda)
  double xi1 = 2.0;     // gamma ~ Gamma(xi1, xi2)
  double xi2 = 3.0;
  double a = 1.0;  // p_jk ~ Beta(a, b)
  double b = 1.0;
  double gamma1 = 10.0;  // theta_k ~ Gamma(gamma1, gamma2)
  double gamma2 = 0.5;

  // Throws ConfigError when a setting is outside its domain.
  void check() const;

  // a = b = 1, flat theta (gamma1 = 1, gamma2 = 0), flat gamma (xi1 = 1, xi2 = 0).
  static Hyperparams flat();
};

double log_prior_K(int K, double lambda);
double log_gamma_density(double x, double shape, double rate);
double log_prior_gamma(double gamma, double xi1, double xi2);
double log_prior_theta(double theta, double gamma1, double gamma2);
double log_prior_p(double p, double a, double b);

// Log density of a symmetric Dirichlet(gamma, ..., gamma) at `weights`.
double log_dirichlet_symmetric(std::span<const double> weights, double gamma);

// Sum of Beta log-densities over p plus the Gamma log-density of theta.
double log_prior_class(const ClassParams& params, const Hyperparams& hyper);

struct BetaFit {
  double a = 1.0;
  double b = 1.0;
};

// Method-of-moments Beta fit to all observed ratings scaled to x / M.
// Throws ModelError("moment fit infeasible") when the variance is zero or
// not below m(1 - m).
BetaFit empirical_bayes_beta(const PreferenceDataset& data);

// Same, but falls back to Beta(1, 1) with a warning instead of throwing.
BetaFit empirical_bayes_beta_or_uniform(const PreferenceDataset& data);

// p_j ~ Beta(a, b) iid, theta ~ Gamma(gamma1, gamma2). Requires gamma2 > 0.
ClassParams sample_class_params_prior(const Hyperparams& hyper, int J, Rng& rng);

}  // namespace rankrate
