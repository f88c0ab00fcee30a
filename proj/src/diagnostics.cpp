#include "rankrate/diagnostics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "rankrate/btl_binomial.hpp"
#include "rankrate/error.hpp"

namespace rankrate {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Matrix nan_matrix(int n) { return Matrix(n, std::vector<double>(n, kNaN)); }

StatBand band(double observed, std::vector<double> reps) {
  StatBand b;
  b.observed = observed;
  std::erase_if(reps, [](double x) { return std::isnan(x); });
  if (reps.empty()) {
    b.replicated_mean = b.replicated_lo = b.replicated_hi = kNaN;
    return b;
  }
  b.replicated_mean = std::accumulate(reps.begin(), reps.end(), 0.0) / reps.size();
  b.replicated_lo = quantile(reps, 0.025);
  b.replicated_hi = quantile(reps, 0.975);
  return b;
}

std::vector<int> nonempty_classes(const Draw& d) {
  std::vector<char> used(d.K, 0);
  for (int zi : d.z) used[zi] = 1;
  std::vector<int> out;
  for (int k = 0; k < d.K; ++k) {
    if (used[k]) out.push_back(k);
  }
  return out;
}

double distance(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += (a[j] - b[j]) * (a[j] - b[j]);
  return std::sqrt(s);
}

}  // namespace

double quantile(std::vector<double> values, double q) {
  if (values.empty()) return kNaN;
  std::sort(values.begin(), values.end());
  const double pos = q * (values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - lo;
  return values[lo] + frac * (values[hi] - values[lo]);
}

RatingMoments rating_moments(const PreferenceDataset& data) {
  std::vector<double> n(data.J, 0.0), sum(data.J, 0.0), sum_sq(data.J, 0.0);
  for (const auto& judge : data.judges) {
    for (const auto& r : judge.ratings) {
      n[r.object] += 1.0;
      sum[r.object] += r.value;
      sum_sq[r.object] += static_cast<double>(r.value) * r.value;
    }
  }
  RatingMoments out;
  out.mean.assign(data.J, kNaN);
  out.variance.assign(data.J, kNaN);
  for (int j = 0; j < data.J; ++j) {
    if (n[j] >= 1.0) out.mean[j] = sum[j] / n[j];
    if (n[j] >= 2.0) out.variance[j] = std::max(0.0, (sum_sq[j] - n[j] * out.mean[j] * out.mean[j]) / (n[j] - 1.0));
  }
  return out;
}

Matrix pairwise_precedence(const PreferenceDataset& data) {
  if (!data.has_rankings()) return {};
  const int J = data.J;
  std::vector<std::vector<int>> wins(J, std::vector<int>(J, 0));
  std::vector<int> position(J, -1);
  for (const auto& judge : data.judges) {
    if (judge.ranking.empty()) continue;
    for (std::size_t r = 0; r < judge.ranking.size(); ++r) position[judge.ranking[r]] = static_cast<int>(r);
    for (ObjectId a : judge.ranking) {
      for (ObjectId b : judge.assessed) {
        if (a == b) continue;
        if (position[b] < 0 || position[b] > position[a]) ++wins[a][b];
      }
    }
    for (ObjectId a : judge.ranking) position[a] = -1;
  }
  Matrix out = nan_matrix(J);
  for (int a = 0; a < J; ++a) {
    for (int b = 0; b < J; ++b) {
      const int total = wins[a][b] + wins[b][a];
      if (a != b && total > 0) out[a][b] = static_cast<double>(wins[a][b]) / total;
    }
  }
  return out;
}

GofReport posterior_predictive(const PosteriorSamples& samples, const PreferenceDataset& data, int n_rep, Rng& rng) {
  const int n_draws = static_cast<int>(samples.draws.size());
  if (n_draws == 0) throw ConfigError("posterior_predictive: no posterior draws");
  if (n_rep < 1 || n_rep > n_draws) {
    throw ConfigError("posterior_predictive: n_rep must lie in [1, " + std::to_string(n_draws) + "]");
  }
  const int J = data.J;
  const bool rankings = data.has_rankings();

  std::vector<std::vector<ObjectId>> rated(data.num_judges());
  for (int i = 0; i < data.num_judges(); ++i) {
    for (const auto& r : data.judges[i].ratings) rated[i].push_back(r.object);
  }

  std::vector<std::vector<double>> rep_mean(J), rep_var(J);
  std::vector<std::vector<std::vector<double>>> rep_pair;
  if (rankings) rep_pair.assign(J, std::vector<std::vector<double>>(J));

  PreferenceDataset replicate = data;
  for (int r = 0; r < n_rep; ++r) {
    const Draw& d = samples.draws[static_cast<std::size_t>(r) * n_draws / n_rep];
    for (int i = 0; i < data.num_judges(); ++i) {
      const auto& judge = data.judges[i];
      const int k = categorical_draw(rng, d.weights, 1.0);
      auto rec = sample_judge(judge.assessed, static_cast<int>(judge.ranking.size()), rated[i], d.classes[k],
                              data.M, rng);
      rec.judge = judge.judge;
      replicate.judges[i] = std::move(rec);
    }
    const auto moments = rating_moments(replicate);
    for (int j = 0; j < J; ++j) {
      rep_mean[j].push_back(moments.mean[j]);
      rep_var[j].push_back(moments.variance[j]);
    }
    if (rankings) {
      const auto pw = pairwise_precedence(replicate);
      for (int a = 0; a < J; ++a) {
        for (int b = 0; b < J; ++b) rep_pair[a][b].push_back(pw[a][b]);
      }
    }
  }

  GofReport out;
  out.n_rep = n_rep;
  const auto observed = rating_moments(data);
  for (int j = 0; j < J; ++j) {
    out.rating_mean.push_back(band(observed.mean[j], std::move(rep_mean[j])));
    out.rating_variance.push_back(band(observed.variance[j], std::move(rep_var[j])));
  }
  if (rankings) {
    out.observed_pairwise = pairwise_precedence(data);
    out.replicated_pairwise = nan_matrix(J);
    out.replicated_pairwise_lo = nan_matrix(J);
    out.replicated_pairwise_hi = nan_matrix(J);
    for (int a = 0; a < J; ++a) {
      for (int b = 0; b < J; ++b) {
        if (a == b) continue;
        const auto s = band(kNaN, std::move(rep_pair[a][b]));
        out.replicated_pairwise[a][b] = s.replicated_mean;
        out.replicated_pairwise_lo[a][b] = s.replicated_lo;
        out.replicated_pairwise_hi[a][b] = s.replicated_hi;
      }
    }
  }
  return out;
}

SimilarityMatrix similarity_matrix(const PosteriorSamples& samples) {
  const int I = samples.num_judges;
  SimilarityMatrix out;
  out.values.assign(I, std::vector<double>(I, 0.0));
  const double n = static_cast<double>(samples.draws.size());
  for (const auto& d : samples.draws) {
    for (int i = 0; i < I; ++i) {
      for (int j = i + 1; j < I; ++j) {
        if (d.z[i] == d.z[j]) out.values[i][j] += 1.0;
      }
    }
  }
  for (int i = 0; i < I; ++i) {
    out.values[i][i] = 1.0;
    for (int j = i + 1; j < I; ++j) {
      const double v = n > 0 ? out.values[i][j] / n : 0.0;
      out.values[i][j] = v;
      out.values[j][i] = v;
    }
  }

  // Classical scaling of the dissimilarity 1 - S; judges are ordered by the
  // leading coordinate.
  std::vector<double> coord(I, 0.0);
  if (I > 1) {
    Eigen::MatrixXd D2(I, I);
    for (int i = 0; i < I; ++i) {
      for (int j = 0; j < I; ++j) {
        const double d = 1.0 - out.values[i][j];
        D2(i, j) = d * d;
      }
    }
    const Eigen::MatrixXd H = Eigen::MatrixXd::Identity(I, I) - Eigen::MatrixXd::Constant(I, I, 1.0 / I);
    const Eigen::MatrixXd B = -0.5 * H * D2 * H;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(B);
    const double lead = eig.eigenvalues()(I - 1);
    if (lead > 1e-12) {
      Eigen::VectorXd v = eig.eigenvectors().col(I - 1) * std::sqrt(lead);
      if (v(0) > 0) v = -v;
      for (int i = 0; i < I; ++i) coord[i] = std::abs(v(i)) < 1e-12 ? 0.0 : v(i);
    }
  }
  out.order.resize(I);
  std::iota(out.order.begin(), out.order.end(), 0);
  std::stable_sort(out.order.begin(), out.order.end(), [&](int a, int b) { return coord[a] < coord[b]; });
  return out;
}

ConditionalSummary conditional_summary(const PosteriorSamples& samples, int kplus) {
  std::vector<const Draw*> draws;
  for (const auto& d : samples.draws) {
    if (d.Kplus == kplus) draws.push_back(&d);
  }
  if (draws.empty()) throw ModelError("no posterior mass at K+ = " + std::to_string(kplus));

  const int J = samples.num_objects;
  const int I = samples.num_judges;
  const Draw& ref = *draws.front();
  const auto ref_classes = nonempty_classes(ref);

  // Per aligned class: the draw's class index for every selected draw.
  std::vector<std::vector<int>> aligned(draws.size(), std::vector<int>(kplus));
  double total_distance = 0.0;
  for (std::size_t t = 0; t < draws.size(); ++t) {
    const Draw& d = *draws[t];
    const auto cls = nonempty_classes(d);
    struct Pair {
      double dist;
      int a, b;
    };
    std::vector<Pair> pairs;
    for (int a = 0; a < kplus; ++a) {
      for (int b = 0; b < kplus; ++b) {
        pairs.push_back({distance(ref.classes[ref_classes[a]].p, d.classes[cls[b]].p), a, b});
      }
    }
    std::stable_sort(pairs.begin(), pairs.end(), [](const Pair& x, const Pair& y) { return x.dist < y.dist; });
    std::vector<char> used_a(kplus, 0), used_b(kplus, 0);
    double draw_distance = 0.0;
    for (const auto& pr : pairs) {
      if (used_a[pr.a] || used_b[pr.b]) continue;
      used_a[pr.a] = used_b[pr.b] = 1;
      aligned[t][pr.a] = cls[pr.b];
      draw_distance += pr.dist;
    }
    total_distance += draw_distance / kplus;
  }

  ConditionalSummary out;
  out.kplus = kplus;
  out.num_draws = static_cast<int>(draws.size());
  out.posterior_mass = static_cast<double>(draws.size()) / samples.draws.size();
  out.mean_match_distance = total_distance / draws.size();
  if (out.mean_match_distance > 0.5 * std::sqrt(static_cast<double>(J))) {
    std::ostringstream msg;
    msg << "class alignment is poor (mean matching distance " << out.mean_match_distance
        << "); per-class summaries may mix labels";
    log::warn(msg.str());
  }

  std::vector<ClassSummary> classes(kplus);
  Matrix membership(I, std::vector<double>(kplus, 0.0));
  for (int a = 0; a < kplus; ++a) {
    std::vector<double> w, th;
    std::vector<std::vector<double>> p(J);
    for (std::size_t t = 0; t < draws.size(); ++t) {
      const Draw& d = *draws[t];
      const int k = aligned[t][a];
      w.push_back(d.weights[k]);
      th.push_back(d.classes[k].theta);
      for (int j = 0; j < J; ++j) p[j].push_back(d.classes[k].p[j]);
      for (int i = 0; i < I; ++i) {
        if (d.z[i] == k) membership[i][a] += 1.0;
      }
    }
    auto& cs = classes[a];
    const double n = static_cast<double>(draws.size());
    cs.weight_mean = std::accumulate(w.begin(), w.end(), 0.0) / n;
    cs.weight_lo = quantile(w, 0.025);
    cs.weight_hi = quantile(w, 0.975);
    cs.theta_mean = std::accumulate(th.begin(), th.end(), 0.0) / n;
    cs.theta_lo = quantile(th, 0.025);
    cs.theta_hi = quantile(th, 0.975);
    for (int j = 0; j < J; ++j) {
      cs.p_mean.push_back(std::accumulate(p[j].begin(), p[j].end(), 0.0) / n);
      cs.p_lo.push_back(quantile(p[j], 0.025));
      cs.p_hi.push_back(quantile(p[j], 0.975));
    }
    cs.consensus = consensus_ranking(cs.p_mean);
  }
  for (auto& row : membership) {
    for (double& v : row) v /= static_cast<double>(draws.size());
  }

  std::vector<int> order(kplus);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int x, int y) { return classes[x].weight_mean > classes[y].weight_mean; });
  for (int a : order) out.classes.push_back(classes[a]);
  out.membership.assign(I, std::vector<double>(kplus));
  for (int i = 0; i < I; ++i) {
    for (int a = 0; a < kplus; ++a) out.membership[i][a] = membership[i][order[a]];
  }
  return out;
}

std::map<int, double> kplus_distribution(const PosteriorSamples& samples) {
  std::map<int, double> out;
  for (const auto& d : samples.draws) out[d.Kplus] += 1.0;
  for (auto& [k, v] : out) v /= static_cast<double>(samples.draws.size());
  return out;
}

std::map<int, double> k_distribution(const PosteriorSamples& samples) {
  std::map<int, double> out;
  for (const auto& d : samples.draws) out[d.K] += 1.0;
  for (auto& [k, v] : out) v /= static_cast<double>(samples.draws.size());
  return out;
}

int modal_kplus(const PosteriorSamples& samples) {
  if (samples.draws.empty()) throw ConfigError("modal_kplus: no posterior draws");
  const auto dist = kplus_distribution(samples);
  int best = dist.begin()->first;
  for (const auto& [k, v] : dist) {
    if (v > dist.at(best)) best = k;
  }
  return best;
}

}  // namespace rankrate
