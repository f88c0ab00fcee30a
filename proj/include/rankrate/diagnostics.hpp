#pragma once

#include <filesystem>
#include <map>
#include <vector>

#include "rankrate/dataset.hpp"
#include "rankrate/mfm_sampler.hpp"
#include "rankrate/rng.hpp"

namespace rankrate {

using Matrix = std::vector<std::vector<double>>;

// Observed statistic with the mean and central 95% band of its replicates.
struct StatBand {
  double observed = 0.0;
  double replicated_mean = 0.0;
  double replicated_lo = 0.0;
  double replicated_hi = 0.0;
};

// Posterior-predictive comparison of rating means, rating variances and
// pairwise precedence probabilities. Undefined statistics are NaN (an object
// with too few ratings, a pair nobody ordered). The pairwise matrices are
// empty when the data hold no rankings.
struct GofReport {
  int n_rep = 0;
  std::vector<StatBand> rating_mean;
  std::vector<StatBand> rating_variance;
  Matrix observed_pairwise;
  Matrix replicated_pairwise;
  Matrix replicated_pairwise_lo;
  Matrix replicated_pairwise_hi;
};

struct RatingMoments {
  std::vector<double> mean;      // NaN without ratings
  std::vector<double> variance;  // sample variance, NaN with fewer than two ratings
};

RatingMoments rating_moments(const PreferenceDataset& data);

// P(A before B) over judges whose data order the pair: A ranked ahead of B,
// or A ranked and B assessed but unranked. NaN where no judge orders the pair.
Matrix pairwise_precedence(const PreferenceDataset& data);

// Replicates the observed design (assessed sets, ranking lengths, rated
// objects) under n_rep evenly spaced posterior draws, each judge's class
// drawn afresh from the draw's weights.
GofReport posterior_predictive(const PosteriorSamples& samples, const PreferenceDataset& data, int n_rep, Rng& rng);

struct SimilarityMatrix {
  Matrix values;           // I x I co-membership probabilities
  std::vector<int> order;  // judges by their first principal coordinate
};

SimilarityMatrix similarity_matrix(const PosteriorSamples& samples);

struct ClassSummary {
  double weight_mean = 0.0, weight_lo = 0.0, weight_hi = 0.0;
  double theta_mean = 0.0, theta_lo = 0.0, theta_hi = 0.0;
  std::vector<double> p_mean, p_lo, p_hi;
  std::vector<ObjectId> consensus;  // of the posterior-mean p
};

// Posterior summary over the draws with a given number of non-empty classes.
// Classes are aligned to the first such draw by greedy nearest-p matching and
// reported in descending order of mean weight.
struct ConditionalSummary {
  int kplus = 0;
  int num_draws = 0;
  double posterior_mass = 0.0;  // fraction of retained draws with this Kplus
  std::vector<ClassSummary> classes;
  Matrix membership;  // I x kplus, rows sum to one
  double mean_match_distance = 0.0;
};

ConditionalSummary conditional_summary(const PosteriorSamples& samples, int kplus);

// Posterior frequency of each Kplus (and K) value among retained draws.
std::map<int, double> kplus_distribution(const PosteriorSamples& samples);
std::map<int, double> k_distribution(const PosteriorSamples& samples);
int modal_kplus(const PosteriorSamples& samples);

// Quantile with linear interpolation between order statistics.
double quantile(std::vector<double> values, double q);

}  // namespace rankrate
