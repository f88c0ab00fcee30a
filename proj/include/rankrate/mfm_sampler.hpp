#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rankrate/btl_binomial.hpp"
#include "rankrate/dataset.hpp"
#include "rankrate/priors.hpp"
#include "rankrate/rng.hpp"

namespace rankrate {

// Full sampler state at one iteration. Invariants after every sweep:
// weights on the simplex, counts[k] = #{i : z[i] == k}, and for the
// telescoping sampler the first Kplus classes are exactly the non-empty ones.
struct MixtureState {
  int K = 1;
  int Kplus = 1;
  double gamma = 1.0;
  std::vector<double> weights;
  std::vector<int> z;
  std::vector<ClassParams> classes;
  std::vector<int> counts;
};

enum class InitMode { prior, map };

struct ChainConfig {
  int B_gibbs = 1000;
  int B_mh = 10;
  int K_start = 1;
  double sigma2_p = 0.05;
  double sigma2_theta = 3.0;
  double sigma2_gamma = 0.5;
  std::uint64_t seed = 1;
  int burn_in = -1;  // negative: half of B_gibbs
  int thin = 1;
  InitMode init = InitMode::prior;
  int progress_every = 0;  // 0 disables progress lines on stderr

  int effective_burn_in() const { return burn_in < 0 ? B_gibbs / 2 : burn_in; }
  void check(int num_judges) const;
};

struct AcceptanceStats {
  long long p_tries = 0, p_accepts = 0;
  long long theta_tries = 0, theta_accepts = 0;
  long long gamma_tries = 0, gamma_accepts = 0;

  static double rate(long long accepts, long long tries) {
    return tries == 0 ? 0.0 : static_cast<double>(accepts) / static_cast<double>(tries);
  }
};

struct Draw {
  int iter = 0;  // 1-based sweep number
  int K = 1;
  int Kplus = 1;
  double gamma = 1.0;
  std::vector<double> weights;
  std::vector<int> z;
  std::vector<ClassParams> classes;
  double logpost = 0.0;
};

struct PosteriorSamples {
  int num_judges = 0;
  int num_objects = 0;
  bool telescoping = true;
  std::vector<Draw> draws;
  AcceptanceStats acceptance;
};

// Named RNG sub-streams of one chain.
struct ChainStreams {
  explicit ChainStreams(std::uint64_t seed);
  Rng init, labels, mh_p, mh_theta, K, gamma, weights;
};

// log(weights[k]) + log_btl_binomial(judge, classes[k]) for k < weights.size().
void class_log_weights(const JudgeRecord& judge, std::span<const double> weights,
                       std::span<const ClassParams> classes, int M, std::span<double> out);

// Posterior class-membership probabilities of one judge. Shared by the
// Gibbs label update and the EM E-step. Throws ModelError when every class
// gives the judge zero likelihood.
std::vector<double> label_posterior(const JudgeRecord& judge, std::span<const double> weights,
                                    std::span<const ClassParams> classes, int M);

// Recomputes counts and Kplus from z.
void recount(MixtureState& state);

// Moves the non-empty classes to the front, keeping their relative order,
// and permutes z, weights, classes and counts to match.
void relabel_nonempty_first(MixtureState& state);

// Redraws every label from its class posterior. With `relabel`, the
// non-empty classes are moved to the front afterwards.
void update_labels(MixtureState& state, const PreferenceDataset& data, Rng& rng, bool relabel = true);

// Random-walk Metropolis-Hastings on (p_k, theta_k) for classes
// 0..num_classes-1: B_mh sweeps, each updating p_1k..p_Jk then theta_k.
void update_class_params(MixtureState& state, const PreferenceDataset& data, const Hyperparams& hyper,
                         const ChainConfig& config, Rng& rng_p, Rng& rng_theta, int num_classes,
                         AcceptanceStats* stats = nullptr);

// Unnormalized log P[K | Kplus, gamma] on K = Kplus, Kplus + 1, ... up to an
// adaptive truncation point (at least Kplus + 200, and past the point where
// the log mass has fallen 27 nats below its running maximum).
std::vector<double> k_conditional_log_weights(int Kplus, double gamma, int num_judges, double lambda);

void update_K(MixtureState& state, const Hyperparams& hyper, int num_judges, Rng& rng);

// Unnormalized log density of gamma given the class counts and K; empty
// classes contribute a factor of one.
double log_gamma_conditional(double gamma, std::span<const int> counts, int K, int num_judges,
                             const Hyperparams& hyper);

// One random-walk MH step on gamma. Returns whether the proposal was accepted.
bool update_gamma(MixtureState& state, const Hyperparams& hyper, const ChainConfig& config,
                  int num_judges, Rng& rng);

// Refills classes Kplus..K-1 with prior draws (when `augment`) and redraws
// the weights from Dirichlet(gamma + N_1, ..., gamma + N_K).
void augment_and_update_weights(MixtureState& state, const Hyperparams& hyper, int num_objects, Rng& rng,
                                bool augment = true);

// Log joint density of data, labels and parameters with the weights
// integrated out. `telescoping` adds the prior on K.
double log_joint(const MixtureState& state, const PreferenceDataset& data, const Hyperparams& hyper,
                 bool telescoping);

// Class parameters for a chain or EM start: prior draws when the prior is
// proper; with gamma2 = 0, theta falls back to a diffuse Gamma(2, 0.2).
ClassParams initial_class_params(const Hyperparams& hyper, int num_objects, Rng& rng);

// Prior-drawn starting state with K classes and uniform random labels.
MixtureState initial_state_from_prior(const PreferenceDataset& data, const Hyperparams& hyper, int K,
                                      Rng& rng);

// Telescoping sampler for the mixture of finite mixtures.
PosteriorSamples run_mfm(const PreferenceDataset& data, const Hyperparams& hyper, const ChainConfig& config);

// Checks the state invariants; returns a description of the first failure.
std::string check_state(const MixtureState& state, int num_judges, bool telescoping);

namespace detail {

// Shared chain driver for the telescoping and the fixed-K samplers.
PosteriorSamples run_chain(const PreferenceDataset& data, const Hyperparams& hyper,
                           const ChainConfig& config, int K, bool telescoping);

}  // namespace detail
}  // namespace rankrate
