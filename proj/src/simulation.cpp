#include "rankrate/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

#include "csv.hpp"
#include "rankrate/error.hpp"

namespace rankrate {
namespace {

bool row_has_duplicates(std::span<const ObjectId> row) {
  std::vector<ObjectId> sorted(row.begin(), row.end());
  std::sort(sorted.begin(), sorted.end());
  return std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end();
}

}  // namespace

std::string SimScenario::key() const {
  std::ostringstream out;
  out << "I" << I << "_J" << J << "_R" << R << "_M" << M << "_theta" << theta;
  return out.str();
}

void SimScenario::check() const {
  if (I < 1 || J < 1) throw ConfigError("scenario needs I >= 1 and J >= 1");
  if (R < 1 || R > J) throw ConfigError("scenario needs 1 <= R <= J");
  if (ranking_length < 0 || ranking_length > R) throw ConfigError("scenario needs ranking_length <= R");
  if (M < 1) throw ConfigError("scenario needs M >= 1");
  if (!(theta > 0.0)) throw ConfigError("scenario needs theta > 0");
  if (replications < 1) throw ConfigError("scenario needs at least one replication");
  if ((static_cast<long long>(I) * R) % J != 0) throw ConfigError("balanced design needs I*R divisible by J");
}

std::vector<SimScenario> make_grid(const SimScenario& base, std::span<const int> Rs, std::span<const int> Ms,
                                   std::span<const double> thetas, std::uint64_t seed) {
  std::vector<SimScenario> grid;
  std::uint64_t cell = 0;
  for (int R : Rs) {
    for (int M : Ms) {
      for (double theta : thetas) {
        SimScenario sc = base;
        sc.R = R;
        sc.M = M;
        sc.theta = theta;
        Rng rng = make_stream(seed, "sim-cell", cell++);
        sc.seed = rng();
        grid.push_back(sc);
      }
    }
  }
  return grid;
}

std::vector<std::vector<ObjectId>> balanced_assignment(int I, int J, int R, Rng& rng) {
  if (I < 1 || J < 1 || R < 1 || R > J) throw ConfigError("balanced_assignment needs 1 <= R <= J");
  if ((static_cast<long long>(I) * R) % J != 0) {
    throw ConfigError("balanced_assignment needs I*R divisible by J");
  }
  const int copies = static_cast<int>(static_cast<long long>(I) * R / J);
  std::vector<ObjectId> pool;
  pool.reserve(static_cast<std::size_t>(I) * R);
  for (int c = 0; c < copies; ++c) {
    for (int j = 0; j < J; ++j) pool.push_back(j);
  }

  std::vector<std::vector<ObjectId>> rows(I, std::vector<ObjectId>(R));
  auto fill = [&] {
    std::shuffle(pool.begin(), pool.end(), rng);
    for (int i = 0; i < I; ++i) std::copy_n(pool.begin() + static_cast<std::ptrdiff_t>(i) * R, R, rows[i].begin());
  };
  bool clean = false;
  for (int attempt = 0; attempt < 50 && !clean; ++attempt) {
    fill();
    clean = std::none_of(rows.begin(), rows.end(), [](const auto& row) { return row_has_duplicates(row); });
  }

  // Repair by swaps that strictly reduce the number of duplicated entries;
  // such a swap exists whenever a row still holds a duplicate.
  std::vector<int> row_order(I);
  std::iota(row_order.begin(), row_order.end(), 0);
  while (!clean) {
    clean = true;
    for (int i = 0; i < I; ++i) {
      std::multiset<ObjectId> mine(rows[i].begin(), rows[i].end());
      int dup_col = -1;
      for (int c = 0; c < R && dup_col < 0; ++c) {
        if (mine.count(rows[i][c]) > 1) dup_col = c;
      }
      if (dup_col < 0) continue;
      clean = false;
      const ObjectId x = rows[i][dup_col];
      std::shuffle(row_order.begin(), row_order.end(), rng);
      bool swapped = false;
      for (int r2 : row_order) {
        if (r2 == i) continue;
        std::multiset<ObjectId> theirs(rows[r2].begin(), rows[r2].end());
        const bool x_there = theirs.count(x) > 0;
        for (int c2 = 0; c2 < R; ++c2) {
          const ObjectId y = rows[r2][c2];
          if (mine.count(y)) continue;
          if (!x_there || theirs.count(y) > 1) {
            std::swap(rows[i][dup_col], rows[r2][c2]);
            swapped = true;
            break;
          }
        }
        if (swapped) break;
      }
      if (!swapped) throw ModelError("balanced_assignment: repair failed");
    }
  }
  for (auto& row : rows) std::sort(row.begin(), row.end());
  return rows;
}

GeneratedData generate_scenario(const SimScenario& sc, Rng& rng) {
  sc.check();
  GeneratedData out;
  out.truth.p.resize(sc.J);
  for (double& p : out.truth.p) p = uniform01(rng);
  out.truth.theta = sc.theta;

  auto& data = out.data;
  data.J = sc.J;
  data.M = sc.M;
  data.assignments_explicit = true;
  for (int j = 0; j < sc.J; ++j) data.object_labels.push_back(std::to_string(j + 1));
  for (int i = 0; i < sc.I; ++i) data.judge_labels.push_back(std::to_string(i + 1));

  const auto sets = balanced_assignment(sc.I, sc.J, sc.R, rng);
  for (int i = 0; i < sc.I; ++i) {
    auto rec = sample_judge(sets[i], sc.ranking_length, sets[i], out.truth, sc.M, rng);
    rec.judge = i;
    data.judges.push_back(std::move(rec));
  }
  return out;
}

std::vector<ObjectId> ratings_only_estimate(const PreferenceDataset& data, Rng& rng) {
  std::vector<double> sum(data.J, 0.0), n(data.J, 0.0);
  for (const auto& judge : data.judges) {
    for (const auto& r : judge.ratings) {
      sum[r.object] += r.value;
      n[r.object] += 1.0;
    }
  }
  std::vector<double> mean(data.J);
  int unrated = 0;
  for (int j = 0; j < data.J; ++j) {
    if (n[j] > 0.0) {
      mean[j] = sum[j] / n[j];
    } else {
      mean[j] = std::numeric_limits<double>::infinity();
      ++unrated;
    }
  }
  if (unrated > 0) log::warn(std::to_string(unrated) + " object(s) without ratings ranked last");

  std::vector<ObjectId> order(data.J);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::stable_sort(order.begin(), order.end(), [&](ObjectId a, ObjectId b) { return mean[a] < mean[b]; });
  return order;
}

double kendall_inaccuracy(std::span<const ObjectId> estimate, std::span<const ObjectId> truth) {
  const std::size_t J = truth.size();
  if (estimate.size() != J) throw ConfigError("kendall_inaccuracy: rankings differ in length");
  std::vector<ObjectId> a(estimate.begin(), estimate.end()), b(truth.begin(), truth.end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  if (a != b || std::adjacent_find(a.begin(), a.end()) != a.end()) {
    throw ConfigError("kendall_inaccuracy: inputs are not permutations of the same objects");
  }
  if (J < 2) return 0.0;
  const ObjectId max_id = b.back();
  std::vector<std::size_t> pos(static_cast<std::size_t>(max_id) + 1 - b.front());
  const ObjectId base = b.front();
  for (std::size_t r = 0; r < J; ++r) pos[estimate[r] - base] = r;
  std::size_t discordant = 0;
  for (std::size_t r = 0; r < J; ++r) {
    for (std::size_t s = r + 1; s < J; ++s) {
      if (pos[truth[r] - base] > pos[truth[s] - base]) ++discordant;
    }
  }
  return static_cast<double>(discordant) / (static_cast<double>(J) * (J - 1) / 2.0);
}

Hyperparams StudyOptions::default_hyper() {
  Hyperparams h;
  h.a = 1.0;
  h.b = 1.0;
  h.gamma1 = 5.0;
  h.gamma2 = 0.25;
  return h;
}

MapOptions StudyOptions::default_map() {
  MapOptions m;
  m.restarts = 1;  // single class: no label multimodality to escape
  return m;
}

std::vector<ReplicationResult> run_study(std::span<const SimScenario> grid, const StudyOptions& options) {
  struct Task {
    std::size_t cell;
    int rep;
  };
  std::vector<Task> tasks;
  for (std::size_t c = 0; c < grid.size(); ++c) {
    grid[c].check();
    for (int r = 0; r < grid[c].replications; ++r) tasks.push_back({c, r});
  }
  std::vector<ReplicationResult> results(tasks.size());

  auto run_one = [&](std::size_t t) {
    const SimScenario& sc = grid[tasks[t].cell];
    const int rep = tasks[t].rep;
    Rng data_rng = make_stream(sc.seed, "sim-data", static_cast<std::uint64_t>(rep));
    Rng tie_rng = make_stream(sc.seed, "sim-ties", static_cast<std::uint64_t>(rep));
    auto generated = generate_scenario(sc, data_rng);

    MapOptions map = options.map;
    map.seed = make_stream(sc.seed, "sim-map", static_cast<std::uint64_t>(rep))();
    const EMState fit = run_map(generated.data, 1, options.hyper, map);

    ReplicationResult& res = results[t];
    res.scenario = sc;
    res.rep = rep;
    res.truth = generated.truth;
    res.true_order = consensus_ranking(generated.truth);
    res.estimate = fit.classes.front();
    res.btl_order = consensus_ranking(res.estimate);
    res.ratings_order = ratings_only_estimate(generated.data, tie_rng);
    res.btl_inaccuracy = kendall_inaccuracy(res.btl_order, res.true_order);
    res.ratings_inaccuracy = kendall_inaccuracy(res.ratings_order, res.true_order);
  };

  const int threads = std::max(1, std::min<int>(options.threads, static_cast<int>(tasks.size())));
  if (threads == 1) {
    for (std::size_t t = 0; t < tasks.size(); ++t) run_one(t);
    return results;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    for (int w = 0; w < threads; ++w) {
      pool.emplace_back([&] {
        for (std::size_t t = next++; t < tasks.size(); t = next++) {
          try {
            run_one(t);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
  return results;
}

std::vector<std::filesystem::path> write_study(std::span<const ReplicationResult> results,
                                               const std::filesystem::path& dir) {
  using detail::format_double;
  std::filesystem::create_directories(dir);
  const auto inacc_path = dir / "sim_inaccuracy.csv";
  const auto recovery_path = dir / "sim_recovery.csv";
  std::ofstream inacc(inacc_path), recovery(recovery_path);
  if (!inacc || !recovery) throw DataError("cannot write simulation results to " + dir.string());
  inacc << "scenario,R,M,theta,rep,method,inaccuracy\n";
  recovery << "scenario,R,M,theta,rep,param,index,truth,estimate\n";
  for (const auto& r : results) {
    const auto& sc = r.scenario;
    const std::string prefix =
        sc.key() + "," + std::to_string(sc.R) + "," + std::to_string(sc.M) + "," + format_double(sc.theta) + "," +
        std::to_string(r.rep) + ",";
    inacc << prefix << "btl_binomial," << format_double(r.btl_inaccuracy) << '\n';
    inacc << prefix << "ratings_only," << format_double(r.ratings_inaccuracy) << '\n';
    for (std::size_t j = 0; j < r.truth.p.size(); ++j) {
      recovery << prefix << "p," << j << ',' << format_double(r.truth.p[j]) << ','
               << format_double(r.estimate.p[j]) << '\n';
    }
    recovery << prefix << "theta,0," << format_double(r.truth.theta) << ',' << format_double(r.estimate.theta)
             << '\n';
  }
  return {inacc_path, recovery_path};
}

}  // namespace rankrate
