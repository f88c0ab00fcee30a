// Independent reference computations for the tests. Nothing here calls the
// library's likelihood or sampler code.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include <boost/math/distributions/binomial.hpp>
#include <boost/math/distributions/chi_squared.hpp>

#include "rankrate/dataset.hpp"

namespace oracle {

using rankrate::JudgeRecord;
using rankrate::ObjectId;
using rankrate::PreferenceDataset;
using rankrate::Rating;

// Plackett-Luce probability with every denominator summed from scratch.
inline double btl_ranking_prob(const std::vector<ObjectId>& ranking, const std::vector<ObjectId>& assessed,
                               const std::vector<double>& p, double theta) {
  std::vector<ObjectId> left = assessed;
  double prob = 1.0;
  for (ObjectId chosen : ranking) {
    double denom = 0.0;
    for (ObjectId j : left) denom += std::exp(-theta * p[j]);
    prob *= std::exp(-theta * p[chosen]) / denom;
    left.erase(std::find(left.begin(), left.end(), chosen));
  }
  return prob;
}

inline double binom_pmf(int M, int x, double p) {
  return boost::math::pdf(boost::math::binomial_distribution<double>(M, p), x);
}

inline double judge_prob(const JudgeRecord& judge, const std::vector<double>& p, double theta, int M) {
  double prob = btl_ranking_prob(judge.ranking, judge.assessed, p, theta);
  for (const auto& r : judge.ratings) prob *= binom_pmf(M, r.value, p[r.object]);
  return prob;
}

// All ordered selections of length R from `set`.
inline std::vector<std::vector<ObjectId>> partial_permutations(const std::vector<ObjectId>& set, int R) {
  std::vector<std::vector<ObjectId>> out;
  std::vector<ObjectId> current;
  std::vector<bool> used(set.size(), false);
  std::function<void()> rec = [&] {
    if (static_cast<int>(current.size()) == R) {
      out.push_back(current);
      return;
    }
    for (std::size_t k = 0; k < set.size(); ++k) {
      if (used[k]) continue;
      used[k] = true;
      current.push_back(set[k]);
      rec();
      current.pop_back();
      used[k] = false;
    }
  };
  rec();
  return out;
}

// Calls fn for every vector in {0..M}^n.
inline void for_each_rating_vector(int n, int M, const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> x(n, 0);
  while (true) {
    fn(x);
    int k = 0;
    while (k < n && x[k] == M) x[k++] = 0;
    if (k == n) return;
    ++x[k];
  }
}

inline JudgeRecord make_judge(int id, std::vector<ObjectId> assessed, std::vector<ObjectId> ranking,
                              std::vector<std::pair<ObjectId, int>> ratings) {
  JudgeRecord j;
  j.judge = id;
  std::sort(assessed.begin(), assessed.end());
  j.assessed = std::move(assessed);
  j.ranking = std::move(ranking);
  for (const auto& [o, v] : ratings) j.ratings.push_back(Rating{o, v});
  std::sort(j.ratings.begin(), j.ratings.end(), [](const Rating& a, const Rating& b) { return a.object < b.object; });
  return j;
}

inline PreferenceDataset make_dataset(std::vector<JudgeRecord> judges, int J, int M) {
  PreferenceDataset d;
  d.J = J;
  d.M = M;
  d.assignments_explicit = true;
  for (int j = 0; j < J; ++j) d.object_labels.push_back(std::to_string(j + 1));
  for (std::size_t i = 0; i < judges.size(); ++i) {
    judges[i].judge = static_cast<int>(i);
    d.judge_labels.push_back(std::to_string(i + 1));
  }
  d.judges = std::move(judges);
  return d;
}

// Mixture data: judge i belongs to class membership[i]; everyone assesses
// all J objects, rates them all and ranks the top R.
inline PreferenceDataset mixture_data(const std::vector<std::vector<double>>& p, const std::vector<double>& theta,
                                      const std::vector<int>& membership, int M, int R, std::mt19937_64& rng) {
  const int J = static_cast<int>(p.front().size());
  std::vector<JudgeRecord> judges;
  std::vector<ObjectId> all(J);
  std::iota(all.begin(), all.end(), 0);
  for (int k : membership) {
    std::vector<std::pair<ObjectId, int>> ratings;
    for (int j = 0; j < J; ++j) ratings.emplace_back(j, std::binomial_distribution<int>(M, p[k][j])(rng));
    std::vector<ObjectId> left = all, ranking;
    for (int r = 0; r < R; ++r) {
      std::vector<double> w;
      for (ObjectId j : left) w.push_back(std::exp(-theta[k] * p[k][j]));
      const auto pick = std::discrete_distribution<int>(w.begin(), w.end())(rng);
      ranking.push_back(left[pick]);
      left.erase(left.begin() + pick);
    }
    judges.push_back(make_judge(0, all, ranking, ratings));
  }
  return make_dataset(std::move(judges), J, M);
}

inline double kendall_brute(const std::vector<ObjectId>& a, const std::vector<ObjectId>& b) {
  const std::size_t n = a.size();
  auto pos = [](const std::vector<ObjectId>& v, ObjectId x) {
    return std::find(v.begin(), v.end(), x) - v.begin();
  };
  int bad = 0, pairs = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      ++pairs;
      const bool in_a = pos(a, a[i]) < pos(a, a[j]);
      const bool in_b = pos(b, a[i]) < pos(b, a[j]);
      if (in_a != in_b) ++bad;
    }
  }
  return pairs == 0 ? 0.0 : static_cast<double>(bad) / pairs;
}

// Pearson chi-square goodness-of-fit p-value for observed counts against
// expected probabilities; cells with tiny expectation are pooled.
inline double chi_square_pvalue(const std::vector<double>& counts, const std::vector<double>& probs) {
  const double n = std::accumulate(counts.begin(), counts.end(), 0.0);
  double stat = 0.0, pooled_obs = 0.0, pooled_exp = 0.0;
  int cells = 0;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    const double e = n * probs[k];
    if (e < 5.0) {
      pooled_obs += counts[k];
      pooled_exp += e;
      continue;
    }
    stat += (counts[k] - e) * (counts[k] - e) / e;
    ++cells;
  }
  if (pooled_exp > 0.0) {
    stat += (pooled_obs - pooled_exp) * (pooled_obs - pooled_exp) / std::max(pooled_exp, 1e-12);
    ++cells;
  }
  if (cells < 2) return 1.0;
  return boost::math::cdf(boost::math::complement(boost::math::chi_squared(cells - 1), stat));
}

// Asymptotic Kolmogorov distribution tail P[K > x].
inline double kolmogorov_tail(double x) {
  if (x < 0.2) return 1.0;
  double sum = 0.0;
  for (int k = 1; k < 100; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    sum += (k % 2 ? 2.0 : -2.0) * term;
    if (term < 1e-16) break;
  }
  return std::clamp(sum, 0.0, 1.0);
}

// One-sample KS test p-value of `sample` against the continuous cdf.
inline double ks_pvalue(std::vector<double> sample, const std::function<double(double)>& cdf) {
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  const double sn = std::sqrt(n);
  return kolmogorov_tail((sn + 0.12 + 0.11 / sn) * d);
}

inline double mean(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); }

inline double variance(const std::vector<double>& v) {
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / (v.size() - 1);
}

}  // namespace oracle
