#include "rankrate/btl_binomial.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <numeric>

#include "rankrate/error.hpp"

namespace rankrate {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_choose(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

// log C(M, x) memoized for the most recent M on this thread.
double cached_log_choose(int M, int x) {
  thread_local int cached_m = -1;
  thread_local std::vector<double> table;
  if (cached_m != M) {
    table.resize(M + 1);
    for (int k = 0; k <= M; ++k) table[k] = log_choose(M, k);
    cached_m = M;
  }
  return table[x];
}

}  // namespace

double log_btl_ranking(std::span<const ObjectId> ranking, std::span<const ObjectId> assessed,
                       const ClassParams& params) {
  if (ranking.empty()) return 0.0;
  const double theta = params.theta;
  // Worths relative to the best assessed object, so the largest is exactly 1.
  double p_min = params.p[assessed.front()], p_max = p_min;
  for (ObjectId j : assessed) {
    p_min = std::min(p_min, params.p[j]);
    p_max = std::max(p_max, params.p[j]);
  }

  // The stage-r denominator is the worth of everything not yet chosen: the
  // unranked objects plus ranking[r..]. It is accumulated from the back so
  // that large theta never subtracts nearly equal sums.
  double tail = 0.0;
  for (ObjectId j : assessed) {
    if (std::find(ranking.begin(), ranking.end(), j) == ranking.end()) tail += std::exp(-theta * (params.p[j] - p_min));
  }
  double ll = 0.0;
  if (theta * (p_max - p_min) < 600.0) {
    for (auto it = ranking.rbegin(); it != ranking.rend(); ++it) {
      const double log_w = -theta * (params.p[*it] - p_min);
      tail += std::exp(log_w);
      ll += log_w - std::log(tail);
    }
  } else {
    // Worths can underflow; carry the tail in log space.
    double log_tail = tail > 0.0 ? std::log(tail) : kNegInf;
    for (auto it = ranking.rbegin(); it != ranking.rend(); ++it) {
      const double log_w = -theta * (params.p[*it] - p_min);
      const double hi = std::max(log_tail, log_w), lo = std::min(log_tail, log_w);
      log_tail = hi + std::log1p(std::exp(lo - hi));
      ll += log_w - log_tail;
    }
  }
  assert(std::isfinite(ll));
  return ll;
}

double log_binomial_ratings(std::span<const Rating> ratings, const ClassParams& params, int M) {
  double ll = 0.0;
  for (const Rating& r : ratings) {
    const double p = params.p[r.object];
    const int x = r.value;
    double term = cached_log_choose(M, x);
    if (x > 0) {
      if (p <= 0.0) return kNegInf;
      term += x * std::log(p);
    }
    if (x < M) {
      if (p >= 1.0) return kNegInf;
      term += (M - x) * std::log1p(-p);
    }
    ll += term;
  }
  return ll;
}

double log_btl_binomial(const JudgeRecord& judge, const ClassParams& params, int M) {
  const double ratings = log_binomial_ratings(judge.ratings, params, M);
  if (ratings == kNegInf) return kNegInf;
  return ratings + log_btl_ranking(judge.ranking, judge.assessed, params);
}

double pairwise_prob(double p_a, double p_b, double theta) {
  return 1.0 / (1.0 + std::exp(-theta * (p_b - p_a)));
}

std::vector<ObjectId> consensus_ranking(std::span<const double> p) {
  std::vector<ObjectId> order(p.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](ObjectId a, ObjectId b) { return p[a] < p[b]; });
  return order;
}

JudgeRecord sample_judge(std::span<const ObjectId> assessed, int ranking_length,
                         std::span<const ObjectId> rated, const ClassParams& params, int M, Rng& rng) {
  if (ranking_length < 0 || ranking_length > static_cast<int>(assessed.size())) {
    throw ConfigError("sample_judge: ranking length exceeds the assessed set");
  }
  JudgeRecord rec;
  rec.assessed.assign(assessed.begin(), assessed.end());
  std::sort(rec.assessed.begin(), rec.assessed.end());

  std::vector<ObjectId> remaining = rec.assessed;
  std::vector<double> worth(remaining.size());
  double p_min = std::numeric_limits<double>::infinity();
  for (ObjectId j : remaining) p_min = std::min(p_min, params.p[j]);
  for (std::size_t s = 0; s < remaining.size(); ++s) {
    worth[s] = std::exp(-params.theta * (params.p[remaining[s]] - p_min));
  }
  for (int r = 0; r < ranking_length; ++r) {
    const double total = std::accumulate(worth.begin(), worth.end(), 0.0);
    int pick = categorical_draw(rng, worth, total);
    if (pick < 0) pick = 0;
    rec.ranking.push_back(remaining[pick]);
    remaining.erase(remaining.begin() + pick);
    worth.erase(worth.begin() + pick);
  }

  std::vector<ObjectId> to_rate(rated.begin(), rated.end());
  std::sort(to_rate.begin(), to_rate.end());
  for (ObjectId j : to_rate) {
    if (!rec.assesses(j)) throw ConfigError("sample_judge: rated object outside the assessed set");
    rec.ratings.push_back({j, binomial_draw(rng, M, params.p[j])});
  }
  return rec;
}

std::vector<double> log_binomial_coefficients(int M) {
  std::vector<double> out(M + 1);
  for (int x = 0; x <= M; ++x) out[x] = log_choose(M, x);
  return out;
}

}  // namespace rankrate
