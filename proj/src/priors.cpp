#include "rankrate/priors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "rankrate/error.hpp"

namespace rankrate {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

}  // namespace

void Hyperparams::check() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw ConfigError(std::string("hyperparameter ") + name + " must be positive");
    }
  };
  auto non_negative = [](double v, const char* name) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw ConfigError(std::string("hyperparameter ") + name + " must be non-negative");
    }
  };
  positive(lambda, "lambda");
  positive(xi1, "xi1");
  non_negative(xi2, "xi2");
  positive(a, "a");
  positive(b, "b");
  positive(gamma1, "gamma1");
  non_negative(gamma2, "gamma2");
}

Hyperparams Hyperparams::flat() {
  Hyperparams h;
  h.xi1 = 1.0;
  h.xi2 = 0.0;
  h.a = 1.0;
  h.b = 1.0;
  h.gamma1 = 1.0;
  h.gamma2 = 0.0;
  return h;
}

double log_prior_K(int K, double lambda) {
  if (K < 1) throw ConfigError("log_prior_K: K must be at least 1");
  const double n = K - 1;
  return n * std::log(lambda) - lambda - std::lgamma(n + 1.0);
}

double log_gamma_density(double x, double shape, double rate) {
  if (!(x > 0.0) || !std::isfinite(x)) return kNegInf;
  if (rate == 0.0) return (shape - 1.0) * std::log(x);
  return shape * std::log(rate) - std::lgamma(shape) + (shape - 1.0) * std::log(x) - rate * x;
}

double log_prior_gamma(double gamma, double xi1, double xi2) {
  return log_gamma_density(gamma, xi1, xi2);
}

double log_prior_theta(double theta, double gamma1, double gamma2) {
  return log_gamma_density(theta, gamma1, gamma2);
}

double log_prior_p(double p, double a, double b) {
  if (!(p >= 0.0 && p <= 1.0)) return kNegInf;
  const double log_norm = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b);
  double out = log_norm;
  // 0 * log(0) is taken as 0 so that Beta(1, 1) is flat on the closed interval.
  if (a != 1.0) out += (a - 1.0) * std::log(p);
  if (b != 1.0) out += (b - 1.0) * std::log1p(-p);
  return out;
}

double log_dirichlet_symmetric(std::span<const double> weights, double gamma) {
  const double K = static_cast<double>(weights.size());
  double out = std::lgamma(gamma * K) - K * std::lgamma(gamma);
  if (gamma != 1.0) {
    for (double w : weights) out += (gamma - 1.0) * std::log(w);
  }
  return out;
}

double log_prior_class(const ClassParams& params, const Hyperparams& hyper) {
  double out = log_prior_theta(params.theta, hyper.gamma1, hyper.gamma2);
  for (double p : params.p) out += log_prior_p(p, hyper.a, hyper.b);
  return out;
}

BetaFit empirical_bayes_beta(const PreferenceDataset& data) {
  double n = 0.0, sum = 0.0, sum_sq = 0.0;
  for (const auto& judge : data.judges) {
    for (const auto& r : judge.ratings) {
      const double x = static_cast<double>(r.value) / data.M;
      n += 1.0;
      sum += x;
      sum_sq += x * x;
    }
  }
  if (n < 2.0) throw ModelError("moment fit infeasible: fewer than two observed ratings");
  const double m = sum / n;
  const double v = sum_sq / n - m * m;
  const double ceiling = m * (1.0 - m);
  if (!(v > 0.0) || v >= ceiling) {
    throw ModelError("moment fit infeasible: variance " + std::to_string(v) +
                     " outside (0, m(1-m)) with m = " + std::to_string(m));
  }
  const double common = ceiling / v - 1.0;
  return {m * common, (1.0 - m) * common};
}

BetaFit empirical_bayes_beta_or_uniform(const PreferenceDataset& data) {
  try {
    return empirical_bayes_beta(data);
  } catch (const ModelError& e) {
    log::warn(std::string(e.what()) + "; using Beta(1, 1)");
    return {};
  }
}

ClassParams sample_class_params_prior(const Hyperparams& hyper, int J, Rng& rng) {
  if (!(hyper.gamma2 > 0.0)) throw ModelError("cannot sample improper prior on theta (gamma2 = 0)");
  ClassParams out;
  out.p.resize(J);
  // Beta draws with small shapes can round to exactly 0 or 1; keep them
  // interior so every rating keeps a finite likelihood.
  for (double& p : out.p) p = std::clamp(beta_draw(rng, hyper.a, hyper.b), 1e-12, 1.0 - 1e-12);
  out.theta = gamma_draw(rng, hyper.gamma1, hyper.gamma2);
  return out;
}

}  // namespace rankrate
