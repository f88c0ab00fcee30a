#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "rankrate/btl_binomial.hpp"
#include "rankrate/dataset.hpp"
#include "rankrate/fixed_k.hpp"
#include "rankrate/priors.hpp"

namespace rankrate {

// One cell of the conference-review study: I reviewers, J papers, R papers
// per reviewer, ratings on 0..M and a top-`ranking_length` ranking each.
struct SimScenario {
  int I = 50;
  int J = 50;
  int R = 4;
  int M = 4;
  double theta = 20.0;
  int ranking_length = 4;
  int replications = 20;
  std::uint64_t seed = 1;

  std::string key() const;
  void check() const;
};

// Full grid over R x M x theta; cell c gets a seed derived from (seed, c).
std::vector<SimScenario> make_grid(const SimScenario& base, std::span<const int> Rs, std::span<const int> Ms,
                                   std::span<const double> thetas, std::uint64_t seed);

// Random assessed sets with |S_i| = R and every object in exactly I*R/J sets.
std::vector<std::vector<ObjectId>> balanced_assignment(int I, int J, int R, Rng& rng);

struct GeneratedData {
  PreferenceDataset data;
  ClassParams truth;
};

// True p ~ Uniform(0,1)^J; each judge rates all of S_i and ranks its top
// `ranking_length` objects.
GeneratedData generate_scenario(const SimScenario& scenario, Rng& rng);

// Objects by ascending mean rating; exact ties are ordered uniformly at random.
std::vector<ObjectId> ratings_only_estimate(const PreferenceDataset& data, Rng& rng);

// Fraction of object pairs ordered differently by the two rankings.
double kendall_inaccuracy(std::span<const ObjectId> estimate, std::span<const ObjectId> truth);

struct ReplicationResult {
  SimScenario scenario;
  int rep = 0;
  ClassParams truth;
  std::vector<ObjectId> true_order;
  ClassParams estimate;
  std::vector<ObjectId> btl_order;
  std::vector<ObjectId> ratings_order;
  double btl_inaccuracy = 0.0;
  double ratings_inaccuracy = 0.0;
};

struct StudyOptions {
  Hyperparams hyper = default_hyper();
  MapOptions map = default_map();
  int threads = 1;

  // a = b = 1, gamma1 = 5, gamma2 = 0.25.
  static Hyperparams default_hyper();
  static MapOptions default_map();
};

// Fits a single-class MAP model and the ratings-only baseline to every
// replication of every cell. Bit-reproducible for any thread count.
std::vector<ReplicationResult> run_study(std::span<const SimScenario> grid, const StudyOptions& options = {});

// sim_inaccuracy.csv (scenario,R,M,theta,rep,method,inaccuracy) and
// sim_recovery.csv (scenario,R,M,theta,rep,param,index,truth,estimate).
std::vector<std::filesystem::path> write_study(std::span<const ReplicationResult> results,
                                               const std::filesystem::path& dir);

}  // namespace rankrate
