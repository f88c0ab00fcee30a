#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace rankrate {

// Dense object index in [0, J). External labels live in PreferenceDataset.
using ObjectId = int;

struct Rating {
  ObjectId object = 0;
  int value = 0;  // 0 = best, M = worst

  friend bool operator==(const Rating&, const Rating&) = default;
};

// One judge's observed data: the assessed set S_i, a (possibly partial or
// empty) ranking of it, and ratings for any subset of it. Absent ratings are
// missing; there is no sentinel value.
struct JudgeRecord {
  int judge = 0;
  std::vector<ObjectId> assessed;  // sorted, unique
  std::vector<ObjectId> ranking;   // best first
  std::vector<Rating> ratings;     // sorted by object

  bool assesses(ObjectId object) const;
  std::optional<int> rating_of(ObjectId object) const;

  friend bool operator==(const JudgeRecord&, const JudgeRecord&) = default;
};

// How a judge's ranking relates to their assessed set. A pairwise comparison
// is a length-1 ranking over an assessed set of size 2 (winner listed).
enum class RankingStyle { none, complete, top_r, pairwise, groupwise };

RankingStyle ranking_style(const JudgeRecord& judge);
const char* to_string(RankingStyle style);

// Affine map from the raw rating scale to the integer analysis scale:
// analysis = (raw - offset) / step.
struct Recode {
  double offset = 0.0;
  double step = 1.0;
};

struct PreferenceDataset {
  int J = 0;  // number of objects
  int M = 1;  // maximum rating
  std::vector<JudgeRecord> judges;
  std::vector<std::string> object_labels;
  std::vector<std::string> judge_labels;
  bool assignments_explicit = false;
  Recode recode;

  int num_judges() const { return static_cast<int>(judges.size()); }
  std::size_t num_ratings() const;
  bool has_rankings() const;
};

struct DatasetFiles {
  std::optional<std::filesystem::path> ratings;
  std::optional<std::filesystem::path> rankings;
  std::optional<std::filesystem::path> assignments;
};

// Reads the delimited ratings/rankings/assignments files. Object and judge
// labels are mapped to dense indices in sorted label order (numeric order
// when every label is an integer). Throws DataError naming file and row.
PreferenceDataset load_dataset(const DatasetFiles& files, int M, Recode recode = {});

// Writes the three files (assignments always explicit); ratings are written
// on the raw scale so that load_dataset with the same recode round-trips.
void write_dataset(const PreferenceDataset& data, const DatasetFiles& files);

struct Violation {
  int judge = -1;  // -1 for dataset-level problems
  std::string message;
};

std::vector<Violation> validate(const PreferenceDataset& data);

// Throws DataError listing the first violations, if any.
void require_valid(const PreferenceDataset& data);

}  // namespace rankrate
