#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sarm/harness.hpp"
#include "sarm/hst.hpp"

using namespace sarm;

namespace {

// Letter items for the worked structure-tree trace: a=1 ... e=5.
constexpr StateId A = 1, B = 2, C = 3, D = 4, E = 5;

SequentialRule make_rule(std::vector<StateId> seq, double conf = 1.0,
                         double support = 1.0) {
  SequentialRule r;
  r.consequent = seq.back();
  seq.pop_back();
  r.premise = std::move(seq);
  r.confidence = conf;
  r.support = support;
  r.order_frequency = 1;
  return r;
}

std::vector<StateActionTrajectory> golden_mined() {
  const KeyMaze env = golden_env();
  std::vector<StateActionTrajectory> mined;
  for (const auto& t : golden_trajectories()) {
    mined.push_back(infer_actions(t, env));
  }
  return mined;
}

}  // namespace

TEST_CASE("worked trace: bcde, dbce, acde give the 8-node two-branch tree") {
  // Confidence ordering pins the canonical insertion order.
  auto root = hst_construct({make_rule({B, C, D, E}, 0.9),
                             make_rule({D, B, C, E}, 0.8),
                             make_rule({A, C, D, E}, 0.7)});
  CHECK(hst_node_count(*root) == 8);

  // Single child of the root: e (every rule ends in e).
  REQUIRE(root->children.size() == 1);
  const HSTNode* e = root->find_child(E);
  REQUIRE(e);
  // Branch at e: the first rule's d-path and the second rule's c-path.
  REQUIRE(e->children.size() == 2);
  const HSTNode* d = e->find_child(D);
  const HSTNode* c2 = e->find_child(C);
  REQUIRE(d);
  REQUIRE(c2);
  // Branch at c (under e-d): b from rule 1 and a from rule 3.
  const HSTNode* c1 = d->find_child(C);
  REQUIRE(c1);
  REQUIRE(c1->children.size() == 2);
  CHECK(c1->find_child(B));
  CHECK(c1->find_child(A));
  CHECK(c1->find_child(B)->rule_terminal);
  CHECK(c1->find_child(A)->rule_terminal);
  // Rule 2's tail b-d under its own c branch.
  const HSTNode* b2 = c2->find_child(B);
  REQUIRE(b2);
  CHECK(b2->find_child(D));
  CHECK(b2->find_child(D)->rule_terminal);
}

TEST_CASE("insertion is idempotent") {
  const SequentialRule r1 = make_rule({B, C, D, E}, 0.9);
  const SequentialRule r2 = make_rule({D, B, C, E}, 0.8);
  auto once = hst_construct({r1, r2});
  auto twice = hst_construct({r1, r2, r1, r2, r1});
  CHECK(hst_node_count(*once) == hst_node_count(*twice));
  CHECK(hst_equal(*once, *twice));

  // Re-inserting into an existing tree changes nothing either.
  const std::size_t before = hst_node_count(*once);
  hst_insert(*once, r1);
  CHECK(hst_node_count(*once) == before);
}

TEST_CASE("single rule gives a single chain, consequent first") {
  auto root = hst_construct({make_rule({A, B, C})});
  CHECK(hst_node_count(*root) == 3);
  REQUIRE(root->children.size() == 1);
  const HSTNode* n = root->children.front().get();
  CHECK(n->subgoal == C);
  REQUIRE(n->children.size() == 1);
  CHECK(n->children.front()->subgoal == B);
  REQUIRE(n->children.front()->children.size() == 1);
  CHECK(n->children.front()->children.front()->subgoal == A);
}

TEST_CASE("node confidence keeps the maximum over inserted rules") {
  auto root = hst_construct({make_rule({A, C}, 0.6), make_rule({B, C}, 0.9)});
  CHECK(root->find_child(C)->confidence == doctest::Approx(0.9));
  CHECK(root->find_child(C)->find_child(A)->confidence == doctest::Approx(0.6));
}

TEST_CASE("golden exits: majority press actions, consecutive collapse") {
  const auto exits = extract_exits({7, 27, 34, 54}, golden_mined());
  REQUIRE(exits.size() == 2);
  CHECK(exits[0] == Exit{7, KeyMaze::kPress});
  CHECK(exits[1] == Exit{34, KeyMaze::kPress});
}

TEST_CASE("exit action is the majority over trajectories, ties lowest id") {
  // Subgoal 5 first visited with action 1 twice, action 3 once.
  std::vector<StateActionTrajectory> trajs{
      {{4, 5, 6}, {0, 1}},
      {{5, 6}, {1}},
      {{5, 9}, {3}},
  };
  const auto exits = extract_exits({5}, trajs);
  REQUIRE(exits.size() == 1);
  CHECK(exits[0] == Exit{5, 1});
}

TEST_CASE("adjacent subgoal clustering groups close states") {
  const std::vector<std::vector<StateId>> trajs{
      {1, 10, 11, 5, 20}, {2, 10, 11, 6, 20}, {10, 11, 3, 20}};
  const auto clusters = cluster_adjacent_subgoals({10, 11, 20}, trajs, 1);
  REQUIRE(clusters.size() == 2);
  // 10 and 11 are always one step apart; the representative occurs first.
  CHECK(clusters[0] == std::vector<StateId>{10, 11});
  CHECK(clusters[1] == std::vector<StateId>{20});

  // Window 0 disables clustering.
  CHECK(cluster_adjacent_subgoals({10, 11, 20}, trajs, 0).size() == 3);
}

TEST_CASE("golden hierarchy: three contiguous 20-state regions") {
  const KeyMaze env = golden_env();
  const auto mined = golden_mined();
  const auto exits = extract_exits({7, 27, 34, 54}, mined);
  const TaskHierarchy h = build_hierarchy(exits, mined, &env);

  REQUIRE(h.subtasks.size() == 3);
  CHECK(h.root_id == 2);
  for (int i = 0; i < 3; ++i) {
    const Subtask& t = h.subtasks[i];
    REQUIRE(t.states.size() == 20);
    for (StateId s = 1; s <= 20; ++s) {
      CHECK(t.contains(s + static_cast<StateId>(i) * 20));
    }
  }
  CHECK(h.subtasks[0].exits == std::vector<Exit>{{7, KeyMaze::kPress}});
  CHECK(h.subtasks[1].exits == std::vector<Exit>{{34, KeyMaze::kPress}});
  CHECK(h.subtasks[2].exits.empty());
  CHECK(h.subtasks[0].children.empty());
  CHECK(h.subtasks[1].children == std::vector<int>{0});
  CHECK(h.subtasks[2].children == std::vector<int>{1});
  CHECK(h.region_of(15) == 0);
  CHECK(h.region_of(25) == 1);
  CHECK(h.region_of(60) == 2);
}

TEST_CASE("trajectory-only hierarchy covers exactly the visited states") {
  const auto mined = golden_mined();
  const auto exits = extract_exits({7, 27, 34, 54}, mined);
  const TaskHierarchy h = build_hierarchy(exits, mined, nullptr);
  REQUIRE(h.subtasks.size() == 3);
  // Region 0 holds only the visited phase-0 states.
  for (StateId s : h.subtasks[0].states) CHECK(s <= 20);
  CHECK(h.subtasks[0].contains(7));
  CHECK_FALSE(h.subtasks[0].contains(4));  // never visited
  CHECK(h.subtasks[1].contains(27));
  CHECK(h.subtasks[2].contains(54));
}

TEST_CASE("build_hierarchy rejects an empty exit list") {
  CHECK_THROWS_AS(build_hierarchy({}, golden_mined(), nullptr),
                  std::invalid_argument);
}

TEST_CASE("every golden trajectory is consistent with its hierarchy") {
  const KeyMaze env = golden_env();
  const auto mined = golden_mined();
  const auto exits = extract_exits({7, 27, 34, 54}, mined);
  const TaskHierarchy h = build_hierarchy(exits, mined, &env);
  for (const auto& traj : mined) {
    const ConsistencyReport report = check_consistency(h, traj);
    CHECK(report.consistent);
    CHECK(report.reason.empty());
  }
}

TEST_CASE("consistency violations are localized and explained") {
  const KeyMaze env = golden_env();
  const auto mined = golden_mined();
  const auto exits = extract_exits({7, 27, 34, 54}, mined);
  const TaskHierarchy h = build_hierarchy(exits, mined, &env);

  SUBCASE("trajectory ending before the exits fire") {
    StateActionTrajectory cut;
    cut.states = {1, 2, 3};
    cut.actions = {KeyMaze::kRight, KeyMaze::kRight};
    const auto report = check_consistency(h, cut);
    CHECK_FALSE(report.consistent);
    CHECK(report.segment == 0);
  }
  SUBCASE("state outside the segment's region") {
    StateActionTrajectory bad = mined[0];
    bad.states[1] = 45;  // phase-2 state inside the phase-0 segment
    const auto report = check_consistency(h, bad);
    CHECK_FALSE(report.consistent);
    CHECK(report.reason.find("45") != std::string::npos);
  }
  SUBCASE("revisiting the exit state without firing it") {
    StateActionTrajectory bad;
    // Walks through s7 with a movement action first, then exits properly.
    bad.states = {3, 7, 3, 7, 27, 31, 35, 34, 54, 58, 57};
    bad.actions = infer_actions(bad.states, env).actions;
    const auto report = check_consistency(h, bad);
    CHECK_FALSE(report.consistent);
  }
}

TEST_CASE("renderings are stable and machine-readable") {
  const KeyMaze env = golden_env();
  const auto mined = golden_mined();
  const auto exits = extract_exits({7, 27, 34, 54}, mined);
  const TaskHierarchy h = build_hierarchy(exits, mined, &env);
  CHECK(hierarchy_adjacency(h) ==
        "0|7|7,4|\n"
        "1|34|34,4|0\n"
        "2|||1\n");
  const std::string text = hierarchy_render(h);
  CHECK(text.find("T2") != std::string::npos);
  CHECK(text.find("exit=(s7,a4)") != std::string::npos);

  auto hst = hst_construct({make_rule({7, 27, 34, 54})});
  CHECK(hst_render(*hst) == "R\n  s54\n    s34\n      s27\n        s7*\n");
}
