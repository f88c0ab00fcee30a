#include "rankrate/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

#include "csv.hpp"
#include "rankrate/error.hpp"

namespace rankrate {
namespace {

using detail::CsvRow;
using detail::CsvTable;

bool is_integer_label(const std::string& s) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  return ec == std::errc() && ptr == s.data() + s.size();
}

// Sorted label list -> dense index. Integer labels sort numerically.
class LabelIndex {
 public:
  void add(const std::string& label) { seen_.insert(label); }

  void finalize() {
    labels_.assign(seen_.begin(), seen_.end());
    const bool numeric = std::all_of(labels_.begin(), labels_.end(), is_integer_label);
    if (numeric) {
      std::sort(labels_.begin(), labels_.end(), [](const std::string& a, const std::string& b) {
        return std::stoll(a) < std::stoll(b);
      });
    }
    for (std::size_t i = 0; i < labels_.size(); ++i) index_[labels_[i]] = static_cast<int>(i);
  }

  int at(const std::string& label) const { return index_.at(label); }
  const std::vector<std::string>& labels() const { return labels_; }

 private:
  std::set<std::string> seen_;
  std::vector<std::string> labels_;
  std::unordered_map<std::string, int> index_;
};

std::string where(const CsvTable& t, const CsvRow& r) {
  return t.path.string() + ":" + std::to_string(r.line);
}

struct RankEntry {
  long long position;
  ObjectId object;
  std::size_t line;
};

}  // namespace

bool JudgeRecord::assesses(ObjectId object) const {
  return std::binary_search(assessed.begin(), assessed.end(), object);
}

std::optional<int> JudgeRecord::rating_of(ObjectId object) const {
  const auto it = std::lower_bound(ratings.begin(), ratings.end(), object,
                                   [](const Rating& r, ObjectId o) { return r.object < o; });
  if (it == ratings.end() || it->object != object) return std::nullopt;
  return it->value;
}

RankingStyle ranking_style(const JudgeRecord& judge) {
  const auto r = judge.ranking.size();
  const auto n = judge.assessed.size();
  if (r == 0) return RankingStyle::none;
  if (n == 2) return RankingStyle::pairwise;
  if (r + 1 >= n) return RankingStyle::complete;
  if (r == 1) return RankingStyle::groupwise;
  return RankingStyle::top_r;
}

const char* to_string(RankingStyle style) {
  switch (style) {
    case RankingStyle::none: return "none";
    case RankingStyle::complete: return "complete";
    case RankingStyle::top_r: return "top-r";
    case RankingStyle::pairwise: return "pairwise";
    case RankingStyle::groupwise: return "groupwise";
  }
  return "unknown";
}

std::size_t PreferenceDataset::num_ratings() const {
  std::size_t n = 0;
  for (const auto& j : judges) n += j.ratings.size();
  return n;
}

bool PreferenceDataset::has_rankings() const {
  return std::any_of(judges.begin(), judges.end(),
                     [](const JudgeRecord& j) { return !j.ranking.empty(); });
}

PreferenceDataset load_dataset(const DatasetFiles& files, int M, Recode recode) {
  if (M < 1) throw ConfigError("M must be at least 1");
  if (!(recode.step > 0.0)) throw ConfigError("rating recode step must be positive");

  std::optional<CsvTable> ratings, rankings, assignments;
  if (files.ratings) ratings = detail::read_csv(*files.ratings);
  if (files.rankings) rankings = detail::read_csv(*files.rankings);
  if (files.assignments) assignments = detail::read_csv(*files.assignments);

  LabelIndex judges, objects;
  auto collect = [&](const std::optional<CsvTable>& t) {
    if (!t) return;
    const auto jc = t->column("judge");
    const auto oc = t->column("object");
    for (const auto& row : t->rows) {
      judges.add(row.fields[jc]);
      objects.add(row.fields[oc]);
    }
  };
  collect(ratings);
  collect(rankings);
  collect(assignments);
  judges.finalize();
  objects.finalize();

  PreferenceDataset data;
  data.M = M;
  data.recode = recode;
  data.J = static_cast<int>(objects.labels().size());
  data.object_labels = objects.labels();
  data.judge_labels = judges.labels();
  data.assignments_explicit = assignments.has_value();
  const auto I = judges.labels().size();
  data.judges.resize(I);
  for (std::size_t i = 0; i < I; ++i) data.judges[i].judge = static_cast<int>(i);

  std::vector<std::set<ObjectId>> assessed(I);
  if (assignments) {
    const auto jc = assignments->column("judge");
    const auto oc = assignments->column("object");
    for (const auto& row : assignments->rows) {
      assessed[judges.at(row.fields[jc])].insert(objects.at(row.fields[oc]));
    }
  }

  std::vector<std::map<ObjectId, std::pair<int, std::size_t>>> rated(I);
  if (ratings) {
    const auto jc = ratings->column("judge");
    const auto oc = ratings->column("object");
    const auto rc = ratings->column("rating");
    for (const auto& row : ratings->rows) {
      const int i = judges.at(row.fields[jc]);
      const ObjectId o = objects.at(row.fields[oc]);
      const double raw = detail::parse_double(*ratings, row, rc);
      const double scaled = (raw - recode.offset) / recode.step;
      const double rounded = std::round(scaled);
      if (!std::isfinite(scaled) || std::abs(scaled - rounded) > 1e-6) {
        throw DataError(where(*ratings, row) + ": rating " + row.fields[rc] +
                        " is not on the recoded integer grid");
      }
      if (rounded < 0 || rounded > M) {
        throw DataError(where(*ratings, row) + ": rating " + row.fields[rc] + " outside [0, " +
                        std::to_string(M) + "] after recoding");
      }
      const auto [it, inserted] = rated[i].emplace(o, std::pair{static_cast<int>(rounded), row.line});
      if (!inserted) {
        throw DataError(where(*ratings, row) + ": duplicate rating for judge " + row.fields[jc] +
                        " object " + row.fields[oc] + " (first at line " +
                        std::to_string(it->second.second) + ")");
      }
      if (assignments && !assessed[i].count(o)) {
        throw DataError(where(*ratings, row) + ": judge " + row.fields[jc] + " rated object " +
                        row.fields[oc] + " outside their assigned set");
      }
    }
  }

  std::vector<std::vector<RankEntry>> ranked(I);
  if (rankings) {
    const auto jc = rankings->column("judge");
    const auto pc = rankings->column("position");
    const auto oc = rankings->column("object");
    for (const auto& row : rankings->rows) {
      const int i = judges.at(row.fields[jc]);
      const ObjectId o = objects.at(row.fields[oc]);
      const long long pos = detail::parse_int(*rankings, row, pc);
      if (pos < 1) throw DataError(where(*rankings, row) + ": ranking positions are 1-based");
      for (const auto& prev : ranked[i]) {
        if (prev.position == pos) {
          throw DataError(where(*rankings, row) + ": duplicate rank position " +
                          std::to_string(pos) + " for judge " + row.fields[jc] +
                          " (first at line " + std::to_string(prev.line) + ")");
        }
        if (prev.object == o) {
          throw DataError(where(*rankings, row) + ": object " + row.fields[oc] +
                          " ranked twice by judge " + row.fields[jc] + " (first at line " +
                          std::to_string(prev.line) + ")");
        }
      }
      if (assignments && !assessed[i].count(o)) {
        throw DataError(where(*rankings, row) + ": ranked object " + row.fields[oc] +
                        " is not in judge " + row.fields[jc] + "'s assigned set");
      }
      ranked[i].push_back({pos, o, row.line});
    }
  }

  for (std::size_t i = 0; i < I; ++i) {
    auto& rec = data.judges[i];
    auto& entries = ranked[i];
    std::sort(entries.begin(), entries.end(),
              [](const RankEntry& a, const RankEntry& b) { return a.position < b.position; });
    for (std::size_t r = 0; r < entries.size(); ++r) {
      if (entries[r].position != static_cast<long long>(r + 1)) {
        throw DataError(where(*rankings, CsvRow{entries[r].line, {}}) + ": ranking positions for judge " +
                        data.judge_labels[i] + " are not contiguous from 1");
      }
      rec.ranking.push_back(entries[r].object);
    }
    for (const auto& [o, value] : rated[i]) rec.ratings.push_back({o, value.first});
    if (!assignments) {
      for (const auto& r : rec.ratings) assessed[i].insert(r.object);
      for (ObjectId o : rec.ranking) assessed[i].insert(o);
    }
    rec.assessed.assign(assessed[i].begin(), assessed[i].end());
  }

  require_valid(data);
  return data;
}

void write_dataset(const PreferenceDataset& data, const DatasetFiles& files) {
  auto open = [](const std::optional<std::filesystem::path>& p) {
    if (!p) throw ConfigError("write_dataset needs all three paths");
    std::ofstream out(*p);
    if (!out) throw DataError("cannot write " + p->string());
    return out;
  };
  auto ratings = open(files.ratings);
  auto rankings = open(files.rankings);
  auto assignments = open(files.assignments);
  ratings << "judge,object,rating\n";
  rankings << "judge,position,object\n";
  assignments << "judge,object\n";
  for (const auto& rec : data.judges) {
    const auto& jl = data.judge_labels.at(rec.judge);
    for (const auto& r : rec.ratings) {
      ratings << jl << ',' << data.object_labels.at(r.object) << ','
              << detail::format_double(data.recode.offset + data.recode.step * r.value) << '\n';
    }
    for (std::size_t pos = 0; pos < rec.ranking.size(); ++pos) {
      rankings << jl << ',' << pos + 1 << ',' << data.object_labels.at(rec.ranking[pos]) << '\n';
    }
    for (ObjectId o : rec.assessed) assignments << jl << ',' << data.object_labels.at(o) << '\n';
  }
}

std::vector<Violation> validate(const PreferenceDataset& data) {
  std::vector<Violation> out;
  if (data.J < 1) out.push_back({-1, "dataset has no objects"});
  if (data.judges.empty()) out.push_back({-1, "dataset has no judges"});
  if (data.M < 1) out.push_back({-1, "M must be at least 1"});

  auto name = [&](int i) {
    return i < static_cast<int>(data.judge_labels.size()) ? data.judge_labels[i] : std::to_string(i);
  };
  auto object_name = [&](ObjectId o) {
    return o >= 0 && o < static_cast<int>(data.object_labels.size()) ? data.object_labels[o]
                                                                      : std::to_string(o);
  };

  for (int i = 0; i < data.num_judges(); ++i) {
    const auto& rec = data.judges[i];
    auto add = [&](std::string msg) { out.push_back({i, "judge " + name(i) + ": " + std::move(msg)}); };

    for (std::size_t s = 0; s < rec.assessed.size(); ++s) {
      const ObjectId o = rec.assessed[s];
      if (o < 0 || o >= data.J) add("assessed object index " + std::to_string(o) + " out of range");
      if (s > 0 && rec.assessed[s - 1] >= o) add("assessed set is not sorted and unique");
    }
    std::set<ObjectId> seen;
    for (ObjectId o : rec.ranking) {
      if (!seen.insert(o).second) add("duplicate ranked object " + object_name(o));
      if (!rec.assesses(o)) add("ranked object " + object_name(o) + " not in assessed set");
    }
    if (rec.ranking.size() > rec.assessed.size() && seen.size() == rec.ranking.size()) {
      add("ranking longer than assessed set");
    }
    for (std::size_t r = 0; r < rec.ratings.size(); ++r) {
      const auto& rt = rec.ratings[r];
      if (r > 0 && rec.ratings[r - 1].object >= rt.object) {
        add("ratings are not sorted by object or contain duplicates");
      }
      if (rt.value < 0 || rt.value > data.M) {
        add("rating " + std::to_string(rt.value) + " for object " + object_name(rt.object) +
            " outside [0, " + std::to_string(data.M) + "]");
      }
      if (!rec.assesses(rt.object)) add("rated object " + object_name(rt.object) + " not in assessed set");
    }
  }
  return out;
}

void require_valid(const PreferenceDataset& data) {
  const auto violations = validate(data);
  if (violations.empty()) return;
  std::ostringstream msg;
  msg << "invalid dataset (" << violations.size() << " violation"
      << (violations.size() == 1 ? "" : "s") << ")";
  for (std::size_t k = 0; k < violations.size() && k < 5; ++k) msg << "; " << violations[k].message;
  throw DataError(msg.str());
}

}  // namespace rankrate
