#include "rankrate/samples_io.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <numeric>

#include "csv.hpp"
#include "rankrate/error.hpp"

namespace rankrate {
namespace {

using detail::format_double;

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  return out;
}

}  // namespace

std::vector<std::filesystem::path> write_samples(const PosteriorSamples& samples, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> paths = {dir / kTraceFile, dir / kWeightsFile, dir / kLabelsFile,
                                              dir / kClassParamsFile, dir / kSamplesInfoFile};
  auto trace = open_out(paths[0]);
  auto weights = open_out(paths[1]);
  auto labels = open_out(paths[2]);
  auto params = open_out(paths[3]);
  auto info = open_out(paths[4]);

  trace << "iter,K,Kplus,gamma,logpost\n";
  weights << "iter,class,value\n";
  labels << "iter,judge,class\n";
  params << "iter,class,param,index,value\n";
  for (const auto& d : samples.draws) {
    trace << d.iter << ',' << d.K << ',' << d.Kplus << ',' << format_double(d.gamma) << ','
          << format_double(d.logpost) << '\n';
    for (std::size_t k = 0; k < d.weights.size(); ++k) {
      weights << d.iter << ',' << k << ',' << format_double(d.weights[k]) << '\n';
    }
    for (std::size_t i = 0; i < d.z.size(); ++i) labels << d.iter << ',' << i << ',' << d.z[i] << '\n';
    for (std::size_t k = 0; k < d.classes.size(); ++k) {
      const auto& cp = d.classes[k];
      for (std::size_t j = 0; j < cp.p.size(); ++j) {
        params << d.iter << ',' << k << ",p," << j << ',' << format_double(cp.p[j]) << '\n';
      }
      params << d.iter << ',' << k << ",theta,0," << format_double(cp.theta) << '\n';
    }
  }

  const auto& a = samples.acceptance;
  info << "key,value\n"
       << "num_judges," << samples.num_judges << '\n'
       << "num_objects," << samples.num_objects << '\n'
       << "telescoping," << (samples.telescoping ? 1 : 0) << '\n'
       << "draws," << samples.draws.size() << '\n'
       << "p_tries," << a.p_tries << '\n'
       << "p_accepts," << a.p_accepts << '\n'
       << "theta_tries," << a.theta_tries << '\n'
       << "theta_accepts," << a.theta_accepts << '\n'
       << "gamma_tries," << a.gamma_tries << '\n'
       << "gamma_accepts," << a.gamma_accepts << '\n';
  return paths;
}

PosteriorSamples read_samples(const std::filesystem::path& dir) {
  PosteriorSamples out;
  {
    const auto t = detail::read_csv(dir / kSamplesInfoFile);
    const auto kc = t.column("key"), vc = t.column("value");
    std::map<std::string, long long> kv;
    for (const auto& row : t.rows) kv[row.fields[kc]] = detail::parse_int(t, row, vc);
    out.num_judges = static_cast<int>(kv.at("num_judges"));
    out.num_objects = static_cast<int>(kv.at("num_objects"));
    out.telescoping = kv.at("telescoping") != 0;
    out.acceptance = {kv.at("p_tries"),     kv.at("p_accepts"),   kv.at("theta_tries"),
                      kv.at("theta_accepts"), kv.at("gamma_tries"), kv.at("gamma_accepts")};
  }

  std::map<int, std::size_t> by_iter;
  {
    const auto t = detail::read_csv(dir / kTraceFile);
    const auto ic = t.column("iter"), kc = t.column("K"), pc = t.column("Kplus"), gc = t.column("gamma"),
               lc = t.column("logpost");
    for (const auto& row : t.rows) {
      Draw d;
      d.iter = static_cast<int>(detail::parse_int(t, row, ic));
      d.K = static_cast<int>(detail::parse_int(t, row, kc));
      d.Kplus = static_cast<int>(detail::parse_int(t, row, pc));
      d.gamma = detail::parse_double(t, row, gc);
      d.logpost = detail::parse_double(t, row, lc);
      d.weights.assign(d.K, 0.0);
      d.z.assign(out.num_judges, 0);
      d.classes.assign(d.K, ClassParams{std::vector<double>(out.num_objects, 0.0), 1.0});
      by_iter[d.iter] = out.draws.size();
      out.draws.push_back(std::move(d));
    }
  }
  auto draw_for = [&](const detail::CsvTable& t, const detail::CsvRow& row, std::size_t col) -> Draw& {
    const auto it = by_iter.find(static_cast<int>(detail::parse_int(t, row, col)));
    if (it == by_iter.end()) throw DataError(t.path.string() + ":" + std::to_string(row.line) + ": unknown iteration");
    return out.draws[it->second];
  };
  {
    const auto t = detail::read_csv(dir / kWeightsFile);
    const auto ic = t.column("iter"), kc = t.column("class"), vc = t.column("value");
    for (const auto& row : t.rows) {
      Draw& d = draw_for(t, row, ic);
      d.weights.at(detail::parse_int(t, row, kc)) = detail::parse_double(t, row, vc);
    }
  }
  {
    const auto t = detail::read_csv(dir / kLabelsFile);
    const auto ic = t.column("iter"), jc = t.column("judge"), kc = t.column("class");
    for (const auto& row : t.rows) {
      Draw& d = draw_for(t, row, ic);
      d.z.at(detail::parse_int(t, row, jc)) = static_cast<int>(detail::parse_int(t, row, kc));
    }
  }
  {
    const auto t = detail::read_csv(dir / kClassParamsFile);
    const auto ic = t.column("iter"), kc = t.column("class"), pc = t.column("param"), xc = t.column("index"),
               vc = t.column("value");
    for (const auto& row : t.rows) {
      Draw& d = draw_for(t, row, ic);
      auto& cp = d.classes.at(detail::parse_int(t, row, kc));
      const double v = detail::parse_double(t, row, vc);
      if (row.fields[pc] == "p") {
        cp.p.at(detail::parse_int(t, row, xc)) = v;
      } else if (row.fields[pc] == "theta") {
        cp.theta = v;
      } else {
        throw DataError(t.path.string() + ":" + std::to_string(row.line) + ": unknown parameter '" +
                        row.fields[pc] + "'");
      }
    }
  }
  return out;
}

std::vector<std::filesystem::path> trace_export(const PosteriorSamples& samples, const std::filesystem::path& dir) {
  auto paths = write_samples(samples, dir);

  std::size_t max_k = 0;
  for (const auto& d : samples.draws) max_k = std::max(max_k, d.weights.size());
  std::vector<double> mean(max_k, 0.0);
  for (const auto& d : samples.draws) {
    for (std::size_t k = 0; k < d.weights.size(); ++k) mean[k] += d.weights[k];
  }
  std::vector<std::size_t> order(max_k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return mean[a] > mean[b]; });

  paths.push_back(dir / kOrderedWeightsFile);
  auto out = open_out(paths.back());
  out << "iter";
  for (std::size_t k : order) out << ",pi_" << k;
  out << '\n';
  for (const auto& d : samples.draws) {
    out << d.iter;
    for (std::size_t k : order) out << ',' << (k < d.weights.size() ? format_double(d.weights[k]) : "NA");
    out << '\n';
  }
  return paths;
}

}  // namespace rankrate
