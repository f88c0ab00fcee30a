#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "rankrate/dataset.hpp"
#include "rankrate/fixed_k.hpp"
#include "rankrate/mfm_sampler.hpp"
#include "rankrate/priors.hpp"
#include "rankrate/simulation.hpp"

namespace rankrate {

// Flat `key = value` text. A `[section]` line prefixes the keys that follow
// with `section.`; `#` and `;` start comments. Lookups record which keys were
// consumed so that typos can be reported.
class Config {
 public:
  static Config parse(std::string_view text, std::filesystem::path origin = {});
  static Config load(const std::filesystem::path& path);

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  void set(const std::string& key, std::string value) { values_[key] = std::move(value); }

  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  long long get_int(const std::string& key) const;
  long long get_int(const std::string& key, long long fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<long long> get_int_list(const std::string& key) const;
  std::vector<double> get_double_list(const std::string& key) const;
  // Relative paths resolve against the directory holding the config file.
  std::filesystem::path get_path(const std::string& key) const;
  std::optional<std::filesystem::path> get_optional_path(const std::string& key) const;

  std::vector<std::string> unused_keys() const;
  std::vector<std::string> keys() const;
  const std::string& text() const { return text_; }
  const std::filesystem::path& origin() const { return origin_; }

 private:
  const std::string& raw(const std::string& key) const;
  [[noreturn]] void bad_value(const std::string& key, const char* expected) const;

  std::map<std::string, std::string> values_;
  std::map<std::string, int> lines_;
  mutable std::set<std::string> used_;
  std::filesystem::path origin_;
  std::string text_;
};

// data.ratings, data.rankings, data.assignments, data.M, data.recode_offset,
// data.recode_step.
DatasetFiles dataset_files(const Config& cfg);
PreferenceDataset load_dataset(const Config& cfg);

// hyper.*; `hyper.a = auto` (with b unset or auto) requests the moment fit.
Hyperparams hyperparams(const Config& cfg, const PreferenceDataset* data);
ChainConfig chain_config(const Config& cfg, std::uint64_t seed);
MapOptions map_options(const Config& cfg, std::uint64_t seed);
std::vector<SimScenario> sim_grid(const Config& cfg, std::uint64_t seed);

// Keys no subcommand reads; usually typos.
std::vector<std::string> unknown_keys(const Config& cfg);

}  // namespace rankrate
