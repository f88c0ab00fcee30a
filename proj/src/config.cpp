#include "rankrate/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "rankrate/error.hpp"

namespace rankrate {
namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::string strip_comment(std::string_view line) {
  const auto pos = line.find_first_of("#;");
  return trim(line.substr(0, pos));
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  for (char c : s) {
    if (c == ',' || c == ' ' || c == '\t') {
      if (!item.empty()) out.push_back(std::move(item));
      item.clear();
    } else {
      item += c;
    }
  }
  if (!item.empty()) out.push_back(std::move(item));
  return out;
}

template <class T>
bool parse_number(const std::string& s, T& out) {
  const char* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc{} && ptr == end;
}

}  // namespace

Config Config::parse(std::string_view text, std::filesystem::path origin) {
  Config cfg;
  cfg.origin_ = std::move(origin);
  cfg.text_ = std::string(text);
  const std::string where = cfg.origin_.empty() ? std::string("<config>") : cfg.origin_.string();

  std::istringstream in(cfg.text_);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string body = strip_comment(line);
    if (body.empty()) continue;
    if (body.front() == '[') {
      if (body.back() != ']' || body.size() < 3) {
        throw ConfigError(where + ":" + std::to_string(lineno) + ": malformed section header");
      }
      section = trim(std::string_view(body).substr(1, body.size() - 2));
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(where + ":" + std::to_string(lineno) + ": expected 'key = value'");
    }
    std::string key = trim(std::string_view(body).substr(0, eq));
    std::string value = trim(std::string_view(body).substr(eq + 1));
    if (key.empty()) throw ConfigError(where + ":" + std::to_string(lineno) + ": empty key");
    if (!section.empty()) key = section + "." + key;
    if (cfg.values_.count(key)) {
      throw ConfigError(where + ":" + std::to_string(lineno) + ": duplicate key '" + key + "' (first on line " +
                        std::to_string(cfg.lines_[key]) + ")");
    }
    cfg.values_[key] = std::move(value);
    cfg.lines_[key] = lineno;
  }
  return cfg;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path);
}

const std::string& Config::raw(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("missing config key '" + key + "'");
  used_.insert(key);
  return it->second;
}

void Config::bad_value(const std::string& key, const char* expected) const {
  std::string msg = "config key '" + key + "'";
  if (const auto it = lines_.find(key); it != lines_.end()) msg += " (line " + std::to_string(it->second) + ")";
  throw ConfigError(msg + ": expected " + expected + ", got '" + values_.at(key) + "'");
}

std::string Config::get_string(const std::string& key) const { return raw(key); }

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  return has(key) ? raw(key) : fallback;
}

long long Config::get_int(const std::string& key) const {
  long long v = 0;
  if (!parse_number(raw(key), v)) bad_value(key, "an integer");
  return v;
}

long long Config::get_int(const std::string& key, long long fallback) const {
  return has(key) ? get_int(key) : fallback;
}

double Config::get_double(const std::string& key) const {
  double v = 0.0;
  if (!parse_number(raw(key), v)) bad_value(key, "a number");
  return v;
}

double Config::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  std::string v = raw(key);
  std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
  if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
  if (v == "false" || v == "no" || v == "off" || v == "0") return false;
  bad_value(key, "a boolean");
}

std::vector<long long> Config::get_int_list(const std::string& key) const {
  std::vector<long long> out;
  for (const auto& item : split_list(raw(key))) {
    long long v = 0;
    if (!parse_number(item, v)) bad_value(key, "a list of integers");
    out.push_back(v);
  }
  if (out.empty()) bad_value(key, "a non-empty list");
  return out;
}

std::vector<double> Config::get_double_list(const std::string& key) const {
  std::vector<double> out;
  for (const auto& item : split_list(raw(key))) {
    double v = 0.0;
    if (!parse_number(item, v)) bad_value(key, "a list of numbers");
    out.push_back(v);
  }
  if (out.empty()) bad_value(key, "a non-empty list");
  return out;
}

std::filesystem::path Config::get_path(const std::string& key) const {
  std::filesystem::path p = raw(key);
  if (p.is_relative() && !origin_.empty()) p = origin_.parent_path() / p;
  return p.lexically_normal();
}

std::optional<std::filesystem::path> Config::get_optional_path(const std::string& key) const {
  if (!has(key)) return std::nullopt;
  return get_path(key);
}

std::vector<std::string> Config::unused_keys() const {
  std::vector<std::string> out;
  for (const auto& [key, value] : values_) {
    if (!used_.count(key)) out.push_back(key);
  }
  return out;
}

std::vector<std::string> Config::keys() const {
  std::vector<std::string> out;
  for (const auto& [key, value] : values_) out.push_back(key);
  return out;
}

DatasetFiles dataset_files(const Config& cfg) {
  DatasetFiles files;
  files.ratings = cfg.get_optional_path("data.ratings");
  files.rankings = cfg.get_optional_path("data.rankings");
  files.assignments = cfg.get_optional_path("data.assignments");
  if (!files.ratings && !files.rankings) {
    throw ConfigError("config needs data.ratings and/or data.rankings");
  }
  for (const auto& p : {files.ratings, files.rankings, files.assignments}) {
    if (p && !std::filesystem::exists(*p)) throw ConfigError("data file not found: " + p->string());
  }
  return files;
}

PreferenceDataset load_dataset(const Config& cfg) {
  const auto files = dataset_files(cfg);
  Recode recode;
  recode.offset = cfg.get_double("data.recode_offset", 0.0);
  recode.step = cfg.get_double("data.recode_step", 1.0);
  if (!(recode.step > 0.0)) throw ConfigError("data.recode_step must be positive");
  const long long M = cfg.get_int("data.M");
  if (M < 1) throw ConfigError("data.M must be at least 1");
  return load_dataset(files, static_cast<int>(M), recode);
}

Hyperparams hyperparams(const Config& cfg, const PreferenceDataset* data) {
  Hyperparams h;
  if (cfg.get_string("hyper.preset", "default") == "flat") {
    h = Hyperparams::flat();
  } else if (cfg.has("hyper.preset") && cfg.get_string("hyper.preset") != "default") {
    throw ConfigError("hyper.preset must be 'default' or 'flat'");
  }
  h.lambda = cfg.get_double("hyper.lambda", h.lambda);
  h.xi1 = cfg.get_double("hyper.xi1", h.xi1);
  h.xi2 = cfg.get_double("hyper.xi2", h.xi2);
  h.gamma1 = cfg.get_double("hyper.gamma1", h.gamma1);
  h.gamma2 = cfg.get_double("hyper.gamma2", h.gamma2);

  const bool a_auto = cfg.get_string("hyper.a", "") == "auto";
  const bool b_auto = cfg.get_string("hyper.b", "") == "auto";
  if (a_auto || b_auto) {
    if (a_auto != b_auto && cfg.has(a_auto ? "hyper.b" : "hyper.a")) {
      throw ConfigError("hyper.a and hyper.b must both be 'auto' when either is");
    }
    if (!data) throw ConfigError("hyper.a = auto needs a dataset");
    const BetaFit fit = empirical_bayes_beta(*data);
    h.a = fit.a;
    h.b = fit.b;
  } else {
    h.a = cfg.get_double("hyper.a", h.a);
    h.b = cfg.get_double("hyper.b", h.b);
  }
  h.check();
  return h;
}

ChainConfig chain_config(const Config& cfg, std::uint64_t seed) {
  ChainConfig c;
  c.seed = seed;
  c.B_gibbs = static_cast<int>(cfg.get_int("chain.B_gibbs", c.B_gibbs));
  c.B_mh = static_cast<int>(cfg.get_int("chain.B_mh", c.B_mh));
  c.K_start = static_cast<int>(cfg.get_int("chain.K_start", c.K_start));
  c.sigma2_p = cfg.get_double("chain.sigma2_p", c.sigma2_p);
  c.sigma2_theta = cfg.get_double("chain.sigma2_theta", c.sigma2_theta);
  c.sigma2_gamma = cfg.get_double("chain.sigma2_gamma", c.sigma2_gamma);
  c.burn_in = static_cast<int>(cfg.get_int("chain.burn_in", c.burn_in));
  c.thin = static_cast<int>(cfg.get_int("chain.thin", c.thin));
  c.progress_every = static_cast<int>(cfg.get_int("chain.progress_every", c.progress_every));
  const std::string init = cfg.get_string("chain.init", "prior");
  if (init == "prior") {
    c.init = InitMode::prior;
  } else if (init == "map") {
    c.init = InitMode::map;
  } else {
    throw ConfigError("chain.init must be 'prior' or 'map'");
  }
  return c;
}

MapOptions map_options(const Config& cfg, std::uint64_t seed) {
  MapOptions m;
  m.seed = seed;
  m.tol = cfg.get_double("map.tol", m.tol);
  m.restarts = static_cast<int>(cfg.get_int("map.restarts", m.restarts));
  m.max_iter = static_cast<int>(cfg.get_int("map.max_iter", m.max_iter));
  if (cfg.has("map.fixed_gamma")) m.fixed_gamma = cfg.get_double("map.fixed_gamma");
  if (!(m.tol > 0.0)) throw ConfigError("map.tol must be positive");
  if (m.restarts < 1) throw ConfigError("map.restarts must be at least 1");
  if (m.max_iter < 1) throw ConfigError("map.max_iter must be at least 1");
  return m;
}

std::vector<SimScenario> sim_grid(const Config& cfg, std::uint64_t seed) {
  SimScenario base;
  base.I = static_cast<int>(cfg.get_int("sim.I", base.I));
  base.J = static_cast<int>(cfg.get_int("sim.J", base.J));
  base.replications = static_cast<int>(cfg.get_int("sim.replications", base.replications));
  std::vector<int> Rs, Ms;
  for (long long r : cfg.has("sim.R") ? cfg.get_int_list("sim.R") : std::vector<long long>{base.R}) {
    Rs.push_back(static_cast<int>(r));
  }
  for (long long m : cfg.has("sim.M") ? cfg.get_int_list("sim.M") : std::vector<long long>{base.M}) {
    Ms.push_back(static_cast<int>(m));
  }
  const std::vector<double> thetas =
      cfg.has("sim.theta") ? cfg.get_double_list("sim.theta") : std::vector<double>{base.theta};

  // Top-4 rankings by default; "all" ranks every assessed object.
  const bool full = cfg.has("sim.ranking_length") && cfg.get_string("sim.ranking_length") == "all";
  const int length = full ? 0 : static_cast<int>(cfg.get_int("sim.ranking_length", 4));
  auto grid = make_grid(base, Rs, Ms, thetas, seed);
  for (auto& sc : grid) {
    sc.ranking_length = full ? sc.R : std::min(length, sc.R);
    sc.check();
  }
  return grid;
}

std::vector<std::string> unknown_keys(const Config& cfg) {
  static const std::set<std::string> known = {
      "seed",           "output.dir",     "data.ratings",   "data.rankings",      "data.assignments",
      "data.M",         "data.recode_offset", "data.recode_step", "hyper.preset", "hyper.lambda",
      "hyper.xi1",      "hyper.xi2",      "hyper.a",        "hyper.b",            "hyper.gamma1",
      "hyper.gamma2",   "chain.B_gibbs",  "chain.B_mh",     "chain.K_start",      "chain.sigma2_p",
      "chain.sigma2_theta", "chain.sigma2_gamma", "chain.burn_in", "chain.thin",   "chain.init",
      "chain.progress_every", "model.K",  "map.tol",        "map.restarts",       "map.max_iter",
      "map.fixed_gamma", "map.mle",       "gof.samples",    "gof.n_rep",          "summarize.samples",
      "summarize.kplus", "sim.I",         "sim.J",          "sim.R",              "sim.M",
      "sim.theta",      "sim.ranking_length", "sim.replications"};
  std::vector<std::string> out;
  for (const auto& key : cfg.keys()) {
    if (!known.count(key)) out.push_back(key);
  }
  return out;
}

}  // namespace rankrate
