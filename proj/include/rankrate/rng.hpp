#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace rankrate {

using Rng = std::mt19937_64;

// Independent engine for a named consumer of a root seed. Adding a new
// stream name never perturbs the draws of existing ones.
Rng make_stream(std::uint64_t seed, std::string_view name);
Rng make_stream(std::uint64_t seed, std::string_view name, std::uint64_t index);

double uniform01(Rng& rng);
double normal(Rng& rng, double mean, double sd);

// Gamma with shape/rate parameterization (mean = shape / rate).
double gamma_draw(Rng& rng, double shape, double rate);
// log of a Gamma(shape, 1) variate; stays finite for tiny shapes.
double log_gamma_draw(Rng& rng, double shape);
double beta_draw(Rng& rng, double a, double b);
int binomial_draw(Rng& rng, int trials, double p);

// Draws from Dirichlet(alpha) through log-Gamma variates so that very
// small concentrations do not underflow to an all-zero vector.
std::vector<double> dirichlet_draw(Rng& rng, std::span<const double> alpha);

// Index drawn with probability proportional to exp(log_weights[k]).
// Entries equal to -inf are never chosen. Returns -1 if all are -inf.
int categorical_from_log(Rng& rng, std::span<const double> log_weights);

// Inverse-CDF draw from non-negative weights with the given total.
int categorical_draw(Rng& rng, std::span<const double> weights, double total);

// Normalizes log weights in place into probabilities (max subtraction).
// Returns the log normalizing constant.
double normalize_log_weights(std::span<double> log_weights);

}  // namespace rankrate
