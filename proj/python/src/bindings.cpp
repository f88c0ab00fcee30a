#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "rankrate/btl_binomial.hpp"
#include "rankrate/config.hpp"
#include "rankrate/dataset.hpp"
#include "rankrate/diagnostics.hpp"
#include "rankrate/error.hpp"
#include "rankrate/fixed_k.hpp"
#include "rankrate/mfm_sampler.hpp"
#include "rankrate/priors.hpp"
#include "rankrate/samples_io.hpp"
#include "rankrate/simulation.hpp"

namespace py = pybind11;
using namespace rankrate;

namespace {

// Long-running calls drop the GIL; warnings still go to the C++ sink.
using release = py::call_guard<py::gil_scoped_release>;

template <class T>
void readwrite_repr(py::class_<T>& cls, const char* name) {
  cls.def("__repr__", [name](const T&) { return std::string("<rankrate.") + name + ">"; });
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Bayesian rankings-and-ratings mixture models";

  auto base = py::register_exception<Error>(m, "Error");
  py::register_exception<DataError>(m, "DataError", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<ModelError>(m, "ModelError", base.ptr());

  py::class_<Rating>(m, "Rating")
      .def(py::init<>())
      .def(py::init([](ObjectId object, int value) { return Rating{object, value}; }), py::arg("object"),
           py::arg("value"))
      .def_readwrite("object", &Rating::object)
      .def_readwrite("value", &Rating::value)
      .def("__eq__", [](const Rating& a, const Rating& b) { return a == b; });

  py::class_<JudgeRecord>(m, "JudgeRecord")
      .def(py::init<>())
      .def_readwrite("judge", &JudgeRecord::judge)
      .def_readwrite("assessed", &JudgeRecord::assessed)
      .def_readwrite("ranking", &JudgeRecord::ranking)
      .def_readwrite("ratings", &JudgeRecord::ratings)
      .def("rating_of", &JudgeRecord::rating_of);

  py::class_<PreferenceDataset>(m, "PreferenceDataset")
      .def(py::init<>())
      .def_readwrite("J", &PreferenceDataset::J)
      .def_readwrite("M", &PreferenceDataset::M)
      .def_readwrite("judges", &PreferenceDataset::judges)
      .def_readwrite("object_labels", &PreferenceDataset::object_labels)
      .def_readwrite("judge_labels", &PreferenceDataset::judge_labels)
      .def_readwrite("assignments_explicit", &PreferenceDataset::assignments_explicit)
      .def_property_readonly("num_judges", &PreferenceDataset::num_judges)
      .def_property_readonly("num_ratings", &PreferenceDataset::num_ratings)
      .def("validate",
           [](const PreferenceDataset& d) {
             std::vector<std::string> out;
             for (const auto& v : validate(d)) out.push_back(v.message);
             return out;
           })
      .def("require_valid", [](const PreferenceDataset& d) { require_valid(d); });

  m.def(
      "load_dataset",
      [](std::optional<std::filesystem::path> ratings, std::optional<std::filesystem::path> rankings,
         std::optional<std::filesystem::path> assignments, int M, double recode_offset, double recode_step) {
        return load_dataset(DatasetFiles{ratings, rankings, assignments}, M, Recode{recode_offset, recode_step});
      },
      py::arg("ratings") = py::none(), py::arg("rankings") = py::none(), py::arg("assignments") = py::none(),
      py::kw_only(), py::arg("M"), py::arg("recode_offset") = 0.0, py::arg("recode_step") = 1.0);
  m.def(
      "write_dataset",
      [](const PreferenceDataset& data, std::optional<std::filesystem::path> ratings,
         std::optional<std::filesystem::path> rankings, std::optional<std::filesystem::path> assignments) {
        write_dataset(data, DatasetFiles{ratings, rankings, assignments});
      },
      py::arg("data"), py::arg("ratings") = py::none(), py::arg("rankings") = py::none(),
      py::arg("assignments") = py::none());
  m.def(
      "load_config_dataset", [](const std::filesystem::path& cfg) { return load_dataset(Config::load(cfg)); },
      py::arg("config"));

  py::class_<ClassParams>(m, "ClassParams")
      .def(py::init<>())
      .def(py::init([](std::vector<double> p, double theta) { return ClassParams{std::move(p), theta}; }),
           py::arg("p"), py::arg("theta"))
      .def_readwrite("p", &ClassParams::p)
      .def_readwrite("theta", &ClassParams::theta);

  m.def("log_btl_binomial", &log_btl_binomial, py::arg("judge"), py::arg("params"), py::arg("M"));
  m.def("pairwise_prob", &pairwise_prob, py::arg("p_a"), py::arg("p_b"), py::arg("theta"));
  m.def(
      "consensus_ranking", [](const std::vector<double>& p) { return consensus_ranking(p); }, py::arg("p"));

  py::class_<Hyperparams>(m, "Hyperparams")
      .def(py::init<>())
      .def_readwrite("lam", &Hyperparams::lambda)
      .def_readwrite("xi1", &Hyperparams::xi1)
      .def_readwrite("xi2", &Hyperparams::xi2)
      .def_readwrite("a", &Hyperparams::a)
      .def_readwrite("b", &Hyperparams::b)
      .def_readwrite("gamma1", &Hyperparams::gamma1)
      .def_readwrite("gamma2", &Hyperparams::gamma2)
      .def("check", &Hyperparams::check)
      .def_static("flat", &Hyperparams::flat);

  py::class_<BetaFit>(m, "BetaFit").def_readonly("a", &BetaFit::a).def_readonly("b", &BetaFit::b);
  m.def("empirical_bayes_beta", &empirical_bayes_beta, py::arg("data"));

  py::enum_<InitMode>(m, "InitMode").value("prior", InitMode::prior).value("map", InitMode::map);

  py::class_<ChainConfig>(m, "ChainConfig")
      .def(py::init<>())
      .def_readwrite("B_gibbs", &ChainConfig::B_gibbs)
      .def_readwrite("B_mh", &ChainConfig::B_mh)
      .def_readwrite("K_start", &ChainConfig::K_start)
      .def_readwrite("sigma2_p", &ChainConfig::sigma2_p)
      .def_readwrite("sigma2_theta", &ChainConfig::sigma2_theta)
      .def_readwrite("sigma2_gamma", &ChainConfig::sigma2_gamma)
      .def_readwrite("seed", &ChainConfig::seed)
      .def_readwrite("burn_in", &ChainConfig::burn_in)
      .def_readwrite("thin", &ChainConfig::thin)
      .def_readwrite("init", &ChainConfig::init);

  py::class_<Draw>(m, "Draw")
      .def_readonly("iter", &Draw::iter)
      .def_readonly("K", &Draw::K)
      .def_readonly("Kplus", &Draw::Kplus)
      .def_readonly("gamma", &Draw::gamma)
      .def_readonly("weights", &Draw::weights)
      .def_readonly("z", &Draw::z)
      .def_readonly("classes", &Draw::classes)
      .def_readonly("logpost", &Draw::logpost);

  py::class_<AcceptanceStats>(m, "AcceptanceStats")
      .def_property_readonly("p", [](const AcceptanceStats& a) { return a.rate(a.p_accepts, a.p_tries); })
      .def_property_readonly("theta", [](const AcceptanceStats& a) { return a.rate(a.theta_accepts, a.theta_tries); })
      .def_property_readonly("gamma", [](const AcceptanceStats& a) { return a.rate(a.gamma_accepts, a.gamma_tries); });

  py::class_<PosteriorSamples>(m, "PosteriorSamples")
      .def_readonly("num_judges", &PosteriorSamples::num_judges)
      .def_readonly("num_objects", &PosteriorSamples::num_objects)
      .def_readonly("telescoping", &PosteriorSamples::telescoping)
      .def_readonly("draws", &PosteriorSamples::draws)
      .def_readonly("acceptance", &PosteriorSamples::acceptance)
      .def("__len__", [](const PosteriorSamples& s) { return s.draws.size(); });

  m.def("run_mfm", &run_mfm, release(), py::arg("data"), py::arg("hyper"), py::arg("config"));
  m.def("run_fixed_k", &run_fixed_k, release(), py::arg("data"), py::arg("K"), py::arg("hyper"), py::arg("config"));
  m.def("write_samples", &write_samples, py::arg("samples"), py::arg("dir"));
  m.def("read_samples", &read_samples, py::arg("dir"));

  py::class_<MapOptions>(m, "MapOptions")
      .def(py::init<>())
      .def_readwrite("tol", &MapOptions::tol)
      .def_readwrite("restarts", &MapOptions::restarts)
      .def_readwrite("max_iter", &MapOptions::max_iter)
      .def_readwrite("seed", &MapOptions::seed)
      .def_readwrite("fixed_gamma", &MapOptions::fixed_gamma);

  py::class_<EMState>(m, "EMState")
      .def_readonly("weights", &EMState::weights)
      .def_readonly("gamma", &EMState::gamma)
      .def_readonly("classes", &EMState::classes)
      .def_readonly("responsibilities", &EMState::responsibilities)
      .def_readonly("objective", &EMState::objective)
      .def_readonly("iterations", &EMState::iterations)
      .def_readonly("converged", &EMState::converged)
      .def_readonly("objective_trace", &EMState::objective_trace)
      .def_property_readonly("K", &EMState::K);

  m.def("run_map", &run_map, release(), py::arg("data"), py::arg("K"), py::arg("hyper"),
        py::arg("options") = MapOptions{});
  m.def("mle_mode", &mle_mode, release(), py::arg("data"), py::arg("K"), py::arg("options") = MapOptions{});
  m.def("em_objective", &em_objective, py::arg("data"), py::arg("state"), py::arg("hyper"));

  py::class_<ClassSummary>(m, "ClassSummary")
      .def_readonly("weight_mean", &ClassSummary::weight_mean)
      .def_readonly("weight_lo", &ClassSummary::weight_lo)
      .def_readonly("weight_hi", &ClassSummary::weight_hi)
      .def_readonly("theta_mean", &ClassSummary::theta_mean)
      .def_readonly("theta_lo", &ClassSummary::theta_lo)
      .def_readonly("theta_hi", &ClassSummary::theta_hi)
      .def_readonly("p_mean", &ClassSummary::p_mean)
      .def_readonly("p_lo", &ClassSummary::p_lo)
      .def_readonly("p_hi", &ClassSummary::p_hi)
      .def_readonly("consensus", &ClassSummary::consensus);

  py::class_<ConditionalSummary>(m, "ConditionalSummary")
      .def_readonly("kplus", &ConditionalSummary::kplus)
      .def_readonly("num_draws", &ConditionalSummary::num_draws)
      .def_readonly("posterior_mass", &ConditionalSummary::posterior_mass)
      .def_readonly("classes", &ConditionalSummary::classes)
      .def_readonly("membership", &ConditionalSummary::membership)
      .def_readonly("mean_match_distance", &ConditionalSummary::mean_match_distance);

  m.def("conditional_summary", &conditional_summary, py::arg("samples"), py::arg("kplus"));
  m.def("kplus_distribution", &kplus_distribution, py::arg("samples"));
  m.def("k_distribution", &k_distribution, py::arg("samples"));
  m.def("modal_kplus", &modal_kplus, py::arg("samples"));

  py::class_<SimilarityMatrix>(m, "SimilarityMatrix")
      .def_readonly("values", &SimilarityMatrix::values)
      .def_readonly("order", &SimilarityMatrix::order);
  m.def("similarity_matrix", &similarity_matrix, py::arg("samples"));

  py::class_<StatBand>(m, "StatBand")
      .def_readonly("observed", &StatBand::observed)
      .def_readonly("replicated_mean", &StatBand::replicated_mean)
      .def_readonly("replicated_lo", &StatBand::replicated_lo)
      .def_readonly("replicated_hi", &StatBand::replicated_hi);
  py::class_<GofReport>(m, "GofReport")
      .def_readonly("n_rep", &GofReport::n_rep)
      .def_readonly("rating_mean", &GofReport::rating_mean)
      .def_readonly("rating_variance", &GofReport::rating_variance)
      .def_readonly("observed_pairwise", &GofReport::observed_pairwise)
      .def_readonly("replicated_pairwise", &GofReport::replicated_pairwise);
  m.def(
      "posterior_predictive",
      [](const PosteriorSamples& samples, const PreferenceDataset& data, int n_rep, std::uint64_t seed) {
        Rng rng = make_stream(seed, "gof");
        return posterior_predictive(samples, data, n_rep, rng);
      },
      release(), py::arg("samples"), py::arg("data"), py::arg("n_rep"), py::arg("seed") = 1);

  py::class_<SimScenario>(m, "SimScenario")
      .def(py::init<>())
      .def_readwrite("I", &SimScenario::I)
      .def_readwrite("J", &SimScenario::J)
      .def_readwrite("R", &SimScenario::R)
      .def_readwrite("M", &SimScenario::M)
      .def_readwrite("theta", &SimScenario::theta)
      .def_readwrite("ranking_length", &SimScenario::ranking_length)
      .def_readwrite("replications", &SimScenario::replications)
      .def_readwrite("seed", &SimScenario::seed)
      .def("key", &SimScenario::key);

  py::class_<ReplicationResult>(m, "ReplicationResult")
      .def_readonly("scenario", &ReplicationResult::scenario)
      .def_readonly("rep", &ReplicationResult::rep)
      .def_readonly("truth", &ReplicationResult::truth)
      .def_readonly("estimate", &ReplicationResult::estimate)
      .def_readonly("true_order", &ReplicationResult::true_order)
      .def_readonly("btl_order", &ReplicationResult::btl_order)
      .def_readonly("ratings_order", &ReplicationResult::ratings_order)
      .def_readonly("btl_inaccuracy", &ReplicationResult::btl_inaccuracy)
      .def_readonly("ratings_inaccuracy", &ReplicationResult::ratings_inaccuracy);

  m.def(
      "make_grid",
      [](const SimScenario& base, const std::vector<int>& Rs, const std::vector<int>& Ms,
         const std::vector<double>& thetas, std::uint64_t seed) { return make_grid(base, Rs, Ms, thetas, seed); },
      py::arg("base"), py::arg("R"), py::arg("M"), py::arg("theta"), py::arg("seed"));
  m.def(
      "run_study",
      [](const std::vector<SimScenario>& grid, int threads) {
        StudyOptions opts;
        opts.threads = threads;
        return run_study(grid, opts);
      },
      release(), py::arg("grid"), py::arg("threads") = 1);
  m.def(
      "kendall_inaccuracy",
      [](const std::vector<ObjectId>& estimate, const std::vector<ObjectId>& truth) {
        return kendall_inaccuracy(estimate, truth);
      },
      py::arg("estimate"), py::arg("truth"));

  m.def(
      "set_quiet",
      [](bool quiet) {
        static log::Sink saved;
        if (quiet) {
          auto previous = log::set_warning_sink({});
          if (previous) saved = previous;
        } else if (saved) {
          log::set_warning_sink(saved);
        }
      },
      py::arg("quiet") = true, "Silence (or restore) library warnings on stderr.");
}
