#include "doctest.h"
#include "rankrate/config.hpp"
#include "rankrate/error.hpp"
#include "test_util.hpp"

using namespace rankrate;

TEST_CASE("parsing sections, comments and values") {
  const auto cfg = Config::parse(
      "# leading comment\n"
      "seed = 7\n"
      "[chain]\n"
      "B_gibbs = 200   ; trailing comment\n"
      "sigma2_p=0.01\n"
      "\n"
      "[sim]\n"
      "R = 2, 4 6\n"
      "theta = 1.5,20\n");
  CHECK(cfg.get_int("seed") == 7);
  CHECK(cfg.get_int("chain.B_gibbs") == 200);
  CHECK(cfg.get_double("chain.sigma2_p") == 0.01);
  CHECK(cfg.get_int_list("sim.R") == std::vector<long long>{2, 4, 6});
  CHECK(cfg.get_double_list("sim.theta") == std::vector<double>{1.5, 20.0});
  CHECK(cfg.get_int("chain.B_mh", 10) == 10);
  CHECK(cfg.get_string("missing", "x") == "x");
  CHECK(cfg.keys().size() == 5);
}

TEST_CASE("parse errors carry line numbers") {
  CHECK_THROWS_WITH_AS(Config::parse("a = 1\nb\n"), doctest::Contains(":2:"), ConfigError);
  CHECK_THROWS_WITH_AS(Config::parse("[chain\nB_mh = 1\n"), doctest::Contains("malformed section"), ConfigError);
  CHECK_THROWS_WITH_AS(Config::parse("a = 1\na = 2\n"), doctest::Contains("duplicate key 'a'"), ConfigError);
  CHECK_THROWS_WITH_AS(Config::parse(" = 3\n"), doctest::Contains("empty key"), ConfigError);
}

TEST_CASE("typed lookups reject bad values") {
  const auto cfg = Config::parse("n = 3.5\nx = abc\nflag = maybe\nyes = ON\nlist = 1, two\n");
  CHECK_THROWS_WITH_AS(cfg.get_int("n"), doctest::Contains("line 1"), ConfigError);
  CHECK(cfg.get_double("n") == 3.5);
  CHECK_THROWS_AS(cfg.get_double("x"), ConfigError);
  CHECK_THROWS_AS(cfg.get_bool("flag", false), ConfigError);
  CHECK(cfg.get_bool("yes", false));
  CHECK_FALSE(cfg.get_bool("absent", false));
  CHECK_THROWS_AS(cfg.get_int_list("list"), ConfigError);
  CHECK_THROWS_WITH_AS(cfg.get_string("nope"), doctest::Contains("missing config key 'nope'"), ConfigError);
}

TEST_CASE("paths resolve against the config directory") {
  testutil::TempDir dir("cfg");
  const auto path = testutil::write_file(dir / "run.cfg", "data.ratings = sub/r.csv\ndata.rankings = /abs/k.csv\n");
  const auto cfg = Config::load(path);
  CHECK(cfg.get_path("data.ratings") == (dir.path() / "sub/r.csv").lexically_normal());
  CHECK(cfg.get_path("data.rankings") == std::filesystem::path("/abs/k.csv"));
  CHECK_FALSE(cfg.get_optional_path("data.assignments").has_value());
  CHECK(cfg.origin() == path);
  CHECK_THROWS_AS(Config::load(dir / "absent.cfg"), ConfigError);
}

TEST_CASE("dataset settings") {
  testutil::TempDir dir("cfgdata");
  testutil::write_file(dir / "ratings.csv", "judge,object,rating\n1,1,1.2\n1,2,1.0\n2,1,1.4\n");
  const auto cfg = Config::load(testutil::write_file(
      dir / "run.cfg", "[data]\nratings = ratings.csv\nM = 4\nrecode_offset = 1.0\nrecode_step = 0.1\n"));
  const auto data = load_dataset(cfg);
  CHECK(data.J == 2);
  CHECK(data.M == 4);
  CHECK(data.judges[0].ratings[0].value == 2);
  CHECK(data.judges[1].ratings[0].value == 4);

  CHECK_THROWS_WITH_AS(dataset_files(Config::parse("data.M = 4\n")), doctest::Contains("data.ratings"), ConfigError);
  CHECK_THROWS_WITH_AS(dataset_files(Config::parse("data.ratings = /no/such/file.csv\n")),
                       doctest::Contains("not found"), ConfigError);
  const auto bad = Config::load(testutil::write_file(dir / "bad.cfg", "data.ratings = ratings.csv\ndata.M = 0\n"));
  CHECK_THROWS_AS(load_dataset(bad), ConfigError);
}

TEST_CASE("hyperparameter settings") {
  const auto h = hyperparams(Config::parse("hyper.lambda = 2\nhyper.gamma1 = 5\nhyper.gamma2 = 0.25\n"), nullptr);
  CHECK(h.lambda == 2.0);
  CHECK(h.gamma1 == 5.0);
  CHECK(h.gamma2 == 0.25);
  CHECK(h.a == 1.0);
  const auto flat = hyperparams(Config::parse("hyper.preset = flat\n"), nullptr);
  CHECK(flat.gamma2 == 0.0);
  CHECK_THROWS_AS(hyperparams(Config::parse("hyper.preset = weird\n"), nullptr), ConfigError);
  CHECK_THROWS_AS(hyperparams(Config::parse("hyper.a = -1\n"), nullptr), ConfigError);
  CHECK_THROWS_WITH_AS(hyperparams(Config::parse("hyper.a = auto\n"), nullptr), doctest::Contains("needs a dataset"),
                       ConfigError);
  CHECK_THROWS_AS(hyperparams(Config::parse("hyper.a = auto\nhyper.b = 2\n"), nullptr), ConfigError);

  PreferenceDataset d;
  d.J = 1;
  d.M = 4;
  for (int v : {0, 1, 2, 2, 4}) {
    JudgeRecord j;
    j.judge = static_cast<int>(d.judges.size());
    j.assessed = {0};
    j.ratings = {Rating{0, v}};
    d.judges.push_back(j);
    d.judge_labels.push_back(std::to_string(j.judge + 1));
  }
  d.object_labels = {"1"};
  const auto eb = hyperparams(Config::parse("hyper.a = auto\n"), &d);
  const auto fit = empirical_bayes_beta(d);
  CHECK(eb.a == fit.a);
  CHECK(eb.b == fit.b);
}

TEST_CASE("chain, MAP and simulation settings") {
  const auto cfg = Config::parse(
      "[chain]\nB_gibbs = 300\nB_mh = 4\nK_start = 3\nburn_in = 100\nthin = 2\ninit = map\n"
      "[map]\ntol = 1e-7\nrestarts = 2\nfixed_gamma = 0.8\n"
      "[sim]\nI = 20\nJ = 10\nR = 2, 5\nM = 4\ntheta = 5\nreplications = 2\n");
  const auto c = chain_config(cfg, 9);
  CHECK(c.seed == 9);
  CHECK(c.B_gibbs == 300);
  CHECK(c.B_mh == 4);
  CHECK(c.K_start == 3);
  CHECK(c.effective_burn_in() == 100);
  CHECK(c.thin == 2);
  CHECK(c.init == InitMode::map);
  const auto m = map_options(cfg, 9);
  CHECK(m.tol == 1e-7);
  CHECK(m.restarts == 2);
  CHECK(m.fixed_gamma == 0.8);
  const auto grid = sim_grid(cfg, 9);
  REQUIRE(grid.size() == 2);
  CHECK(grid[0].R == 2);
  CHECK(grid[0].ranking_length == 2);
  CHECK(grid[1].ranking_length == 4);
  CHECK(grid[1].replications == 2);

  const auto partial = sim_grid(Config::parse("sim.I = 20\nsim.J = 10\nsim.R = 5\nsim.ranking_length = 3\n"), 1);
  CHECK(partial[0].ranking_length == 3);
  const auto all = sim_grid(Config::parse("sim.I = 20\nsim.J = 10\nsim.R = 5\nsim.ranking_length = all\n"), 1);
  CHECK(all[0].ranking_length == 5);
  CHECK_THROWS_AS(sim_grid(Config::parse("sim.I = 7\nsim.J = 10\nsim.R = 3\n"), 1), ConfigError);
  CHECK_THROWS_AS(chain_config(Config::parse("chain.init = warm\n"), 1), ConfigError);
  CHECK_THROWS_AS(map_options(Config::parse("map.tol = 0\n"), 1), ConfigError);
}

TEST_CASE("unknown keys are reported") {
  const auto cfg = Config::parse("chain.B_gibs = 10\nchain.B_mh = 2\nseed = 1\n");
  CHECK(unknown_keys(cfg) == std::vector<std::string>{"chain.B_gibs"});
  cfg.get_int("seed");
  CHECK(cfg.unused_keys() == std::vector<std::string>{"chain.B_gibs", "chain.B_mh"});
}
