#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>

#include "sarm/harness.hpp"

using namespace sarm;
namespace fs = std::filesystem;

namespace {

// Corner starts and two goals keep routes diverse across runs, so the
// only states common to every good trajectory are the key states.
const char* kExperimentText =
    "# two-key chain maze, four runs\n"
    "env = key_maze\n"
    "map:\n"
    "S.T.S\n"
    ".....\n"
    "..12.\n"
    ".....\n"
    "S.T.S\n"
    "endmap\n"
    "order = 12\n"
    "minsup = 0.9\n"
    "minconf = 0.7\n"
    "runs = 4\n"
    "episodes = 500\n"
    "max_steps = 150\n"
    "top_k = 3\n"
    "seed = 5\n";

struct TempDir {
  fs::path path;
  TempDir() : path(fs::temp_directory_path() /
                   ("sarm_test_" + std::to_string(::getpid()) + "_" +
                    std::to_string(counter++))) {}
  ~TempDir() { fs::remove_all(path); }
  static inline int counter = 0;
};

}  // namespace

TEST_CASE("config parsing: keys, map block, orders") {
  const ExperimentConfig cfg = ExperimentConfig::from_text(kExperimentText);
  CHECK(cfg.env == "key_maze");
  CHECK(cfg.map_text == "S.T.S\n.....\n..12.\n.....\nS.T.S\n");
  REQUIRE(cfg.orders.size() == 1);
  CHECK(cfg.orders[0] == std::vector<char>{'1', '2'});
  CHECK(cfg.minsup == 0.9);
  CHECK(cfg.minconf == 0.7);
  CHECK(cfg.runs == 4);
  CHECK(cfg.episodes == 500);
  CHECK(cfg.seed == 5);
  CHECK(cfg.method_flat);
  CHECK(cfg.method_hier);
}

TEST_CASE("config parsing rejects malformed input") {
  CHECK_THROWS_WITH_AS(ExperimentConfig::from_text("bogus_key = 1\n"),
                       doctest::Contains("bogus_key"), std::invalid_argument);
  CHECK_THROWS_AS(ExperimentConfig::from_text("episodes = many\n"),
                  std::invalid_argument);
  CHECK_THROWS_AS(ExperimentConfig::from_text("just a line\n"),
                  std::invalid_argument);
  CHECK_THROWS_AS(ExperimentConfig::from_text("map:\n....\n"),
                  std::invalid_argument);
  CHECK_THROWS_AS(ExperimentConfig::from_text("method = quantum\n"),
                  std::invalid_argument);
  CHECK_THROWS_AS(ExperimentConfig::from_file("/nonexistent/sarm.cfg"),
                  std::runtime_error);
}

TEST_CASE("method selects which learners run") {
  ExperimentConfig cfg = ExperimentConfig::from_text("method = flat\n");
  CHECK(cfg.method_flat);
  CHECK_FALSE(cfg.method_hier);
  cfg = ExperimentConfig::from_text("method = hier\n");
  CHECK_FALSE(cfg.method_flat);
  CHECK(cfg.method_hier);
}

TEST_CASE("action inference on the three-phase maze") {
  const KeyMaze env = golden_env();
  const StateActionTrajectory t = infer_actions({1, 2, 3, 7, 27}, env);
  CHECK(t.actions == std::vector<Action>{KeyMaze::kRight, KeyMaze::kRight,
                                         KeyMaze::kDown, KeyMaze::kPress});
  CHECK_THROWS_AS(infer_actions({1, 11}, env), std::invalid_argument);
}

TEST_CASE("golden pipeline reproduces the canonical structures") {
  const PipelineResult r = run_golden();
  REQUIRE(r.ok());
  CHECK(r.transactions.size() == 6);
  CHECK(r.subgoals == std::vector<StateId>{7, 27, 34, 54});
  REQUIRE(r.rules.size() == 1);
  CHECK(r.rules[0].sequence() == std::vector<StateId>{7, 27, 34, 54});
  CHECK(r.exits == std::vector<Exit>{{7, KeyMaze::kPress},
                                     {34, KeyMaze::kPress}});
  REQUIRE(r.hierarchy.has_value());
  CHECK(r.hierarchy->subtasks.size() == 3);
}

TEST_CASE("visit matrix counts states per cell and serializes") {
  const auto cell_of = [](StateId s) {
    return Cell{static_cast<int>((s - 1) % 2), static_cast<int>((s - 1) / 2)};
  };
  const VisitMatrix m =
      emit_visit_matrix({{1, 2, 1}, {4, 1}}, 2, 2, cell_of);
  CHECK(m.total() == 5);
  CHECK(m.at(0, 0) == 3);  // state 1
  CHECK(m.at(1, 0) == 1);  // state 2
  CHECK(m.at(1, 1) == 1);  // state 4
  CHECK(m.to_csv() == "3,1\n0,1\n");
  CHECK(m.to_pgm() == "P2\n2 2\n3\n3 1\n0 1\n");
}

TEST_CASE("experiment pipeline end to end on a small maze") {
  const ExperimentConfig cfg = ExperimentConfig::from_text(kExperimentText);
  TempDir dir;
  const PipelineResult r = run_pipeline(cfg, dir.path);
  REQUIRE_MESSAGE(r.ok(), r.message);
  CHECK_FALSE(r.mined.empty());
  CHECK_FALSE(r.rules.empty());
  CHECK(r.exits.size() == 2);
  REQUIRE(r.hierarchy.has_value());
  CHECK(r.hierarchy->subtasks.size() == 3);
  CHECK(r.options.size() == 2);
  CHECK(r.flat_curves.size() == 4);
  CHECK(r.hier_curves.size() == 4);

  for (const char* name :
       {"transactions.csv", "rules.csv", "hst.txt", "hierarchy.txt",
        "hierarchy.adj", "visits.csv", "visits.pgm", "curves.csv",
        "stats.txt"}) {
    CHECK_MESSAGE(fs::exists(dir.path / name), name);
  }
  std::ifstream stats(dir.path / "stats.txt");
  std::string first_line;
  std::getline(stats, first_line);
  CHECK(first_line == "status=ok");
}

TEST_CASE("pipeline runs are deterministic per seed") {
  ExperimentConfig cfg = ExperimentConfig::from_text(kExperimentText);
  cfg.episodes = 200;
  const PipelineResult a = run_pipeline(cfg);
  const PipelineResult b = run_pipeline(cfg);
  REQUIRE(a.ok());
  REQUIRE(b.ok());
  REQUIRE(a.rules.size() == b.rules.size());
  for (std::size_t i = 0; i < a.rules.size(); ++i) {
    CHECK(a.rules[i].sequence() == b.rules[i].sequence());
  }
  REQUIRE(a.flat_curves.size() == b.flat_curves.size());
  for (std::size_t i = 0; i < a.flat_curves.size(); ++i) {
    CHECK(a.flat_curves[i].rewards == b.flat_curves[i].rewards);
  }
  for (std::size_t i = 0; i < a.hier_curves.size(); ++i) {
    CHECK(a.hier_curves[i].rewards == b.hier_curves[i].rewards);
  }
}

TEST_CASE("stop_after truncates the pipeline") {
  ExperimentConfig cfg = ExperimentConfig::from_text(kExperimentText);
  cfg.episodes = 200;
  const PipelineResult trained =
      run_pipeline(cfg, {}, PipelineStage::learning);
  CHECK(trained.ok());
  CHECK_FALSE(trained.mined.empty());
  CHECK(trained.rules.empty());
  CHECK_FALSE(trained.hierarchy.has_value());

  const PipelineResult mined = run_pipeline(cfg, {}, PipelineStage::mining);
  CHECK(mined.ok());
  CHECK_FALSE(mined.subgoals.empty());
  CHECK_FALSE(mined.hierarchy.has_value());

  const PipelineResult built = run_pipeline(cfg, {}, PipelineStage::hst);
  CHECK(built.ok());
  CHECK(built.hierarchy.has_value());
  CHECK(built.options.empty());
  CHECK(built.hier_curves.empty());
}

TEST_CASE("unreachable goal fails at the learning stage with a status") {
  ExperimentConfig cfg;
  cfg.env = "key_maze";
  cfg.map_text = "S#T\n";
  cfg.runs = 1;
  cfg.episodes = 10;
  cfg.max_steps = 30;
  TempDir dir;
  const PipelineResult r = run_pipeline(cfg, dir.path);
  CHECK_FALSE(r.ok());
  CHECK(r.failed_stage == PipelineStage::learning);
  CHECK_FALSE(r.message.empty());
  std::ifstream stats(dir.path / "stats.txt");
  std::string first_line;
  std::getline(stats, first_line);
  CHECK(first_line == "status=learning");
}

TEST_CASE("unknown env name is rejected") {
  ExperimentConfig cfg;
  cfg.env = "pole";
  const PipelineResult r = run_pipeline(cfg);
  CHECK_FALSE(r.ok());
  CHECK(r.failed_stage == PipelineStage::learning);
}
