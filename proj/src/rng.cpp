#include "rankrate/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rankrate/error.hpp"

namespace rankrate {
namespace {

constexpr std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 14695981039346656037ull;
  for (char c : text) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  return h;
}

Rng seeded(std::uint64_t seed, std::uint64_t tag, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(tag), static_cast<std::uint32_t>(tag >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return Rng(seq);
}

}  // namespace

Rng make_stream(std::uint64_t seed, std::string_view name) {
  return seeded(seed, fnv1a(name), 0);
}

Rng make_stream(std::uint64_t seed, std::string_view name, std::uint64_t index) {
  return seeded(seed, fnv1a(name), index + 1);
}

double uniform01(Rng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

double normal(Rng& rng, double mean, double sd) {
  return std::normal_distribution<double>(mean, sd)(rng);
}

double gamma_draw(Rng& rng, double shape, double rate) {
  if (!(shape > 0.0) || !(rate > 0.0)) {
    throw ConfigError("gamma_draw: shape and rate must be positive");
  }
  return std::gamma_distribution<double>(shape, 1.0 / rate)(rng);
}

double log_gamma_draw(Rng& rng, double shape) {
  if (!(shape > 0.0)) throw ConfigError("log_gamma_draw: shape must be positive");
  if (shape >= 1.0) {
    return std::log(std::gamma_distribution<double>(shape, 1.0)(rng));
  }
  // G(a) = G(a + 1) * U^(1/a)
  const double g = std::gamma_distribution<double>(shape + 1.0, 1.0)(rng);
  double u = uniform01(rng);
  while (u <= 0.0) u = uniform01(rng);
  return std::log(g) + std::log(u) / shape;
}

double beta_draw(Rng& rng, double a, double b) {
  const double x = log_gamma_draw(rng, a);
  const double y = log_gamma_draw(rng, b);
  const double m = std::max(x, y);
  const double ex = std::exp(x - m);
  const double ey = std::exp(y - m);
  return ex / (ex + ey);
}

int binomial_draw(Rng& rng, int trials, double p) {
  if (p <= 0.0) return 0;
  if (p >= 1.0) return trials;
  return std::binomial_distribution<int>(trials, p)(rng);
}

std::vector<double> dirichlet_draw(Rng& rng, std::span<const double> alpha) {
  std::vector<double> out(alpha.size());
  for (std::size_t k = 0; k < alpha.size(); ++k) out[k] = log_gamma_draw(rng, alpha[k]);
  normalize_log_weights(out);
  return out;
}

double normalize_log_weights(std::span<double> log_weights) {
  const double neg_inf = -std::numeric_limits<double>::infinity();
  double max = neg_inf;
  for (double w : log_weights) max = std::max(max, w);
  if (max == neg_inf) {
    std::fill(log_weights.begin(), log_weights.end(), 0.0);
    return neg_inf;
  }
  double total = 0.0;
  for (double& w : log_weights) {
    w = std::exp(w - max);
    total += w;
  }
  for (double& w : log_weights) w /= total;
  return max + std::log(total);
}

int categorical_draw(Rng& rng, std::span<const double> weights, double total) {
  const double u = uniform01(rng) * total;
  double acc = 0.0;
  int last_positive = -1;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    if (weights[k] <= 0.0) continue;
    acc += weights[k];
    last_positive = static_cast<int>(k);
    if (u < acc) return last_positive;
  }
  return last_positive;
}

int categorical_from_log(Rng& rng, std::span<const double> log_weights) {
  std::vector<double> probs(log_weights.begin(), log_weights.end());
  if (normalize_log_weights(probs) == -std::numeric_limits<double>::infinity()) return -1;
  return categorical_draw(rng, probs, 1.0);
}

}  // namespace rankrate
