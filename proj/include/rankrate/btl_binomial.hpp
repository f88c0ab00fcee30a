#pragma once

#include <span>
#include <vector>

#include "rankrate/dataset.hpp"
#include "rankrate/rng.hpp"

namespace rankrate {

// Parameters of one preference class: object qualities p in [0,1]^J
// (0 = best) and the consensus scale theta > 0. Object j's BTL worth is
// exp(-theta * p_j).
struct ClassParams {
  std::vector<double> p;
  double theta = 1.0;

  friend bool operator==(const ClassParams&, const ClassParams&) = default;
};

// Log-probability of a top-R ranking drawn by sequential selection without
// replacement from `assessed`, each step choosing an unranked object with
// probability proportional to its worth. Empty ranking -> 0.
double log_btl_ranking(std::span<const ObjectId> ranking, std::span<const ObjectId> assessed,
                       const ClassParams& params);

// Sum of Binomial(M, p_j) log-pmfs over observed ratings only. Returns -inf
// when a rating is impossible (p_j at a boundary).
double log_binomial_ratings(std::span<const Rating> ratings, const ClassParams& params, int M);

// Joint log-density of one judge's ranking and ratings.
double log_btl_binomial(const JudgeRecord& judge, const ClassParams& params, int M);

// P[A ranked before B] for a two-object comparison.
double pairwise_prob(double p_a, double p_b, double theta);

// Objects sorted by ascending p, ties by ascending index.
std::vector<ObjectId> consensus_ranking(std::span<const double> p);
inline std::vector<ObjectId> consensus_ranking(const ClassParams& params) {
  return consensus_ranking(params.p);
}

// Exact draw of a judge record with the given design: a ranking of
// `ranking_length` objects by sequential worth-weighted selection and a
// Binomial(M, p_j) rating for each object in `rated`.
JudgeRecord sample_judge(std::span<const ObjectId> assessed, int ranking_length,
                         std::span<const ObjectId> rated, const ClassParams& params, int M, Rng& rng);

// Binomial coefficient table log C(M, x), x = 0..M.
std::vector<double> log_binomial_coefficients(int M);

}  // namespace rankrate
