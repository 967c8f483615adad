#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>

#include "sarm/grid.hpp"
#include "sarm/key_maze.hpp"
#include "sarm/taxi.hpp"

using namespace sarm;

namespace {

const char* kSmallMap =
    "S..#\n"
    ".#1.\n"
    "..2T\n";

double total_probability(const std::vector<std::pair<StateId, double>>& dist) {
  double sum = 0.0;
  for (const auto& [s, p] : dist) sum += p;
  return sum;
}

}  // namespace

TEST_CASE("grid map parses glyphs and renders back") {
  const GridMap map = GridMap::parse(kSmallMap);
  CHECK(map.width() == 4);
  CHECK(map.height() == 3);
  CHECK(map.cell_count() == 12);
  CHECK(map.wall({3, 0}));
  CHECK(map.wall({1, 1}));
  CHECK_FALSE(map.wall({0, 0}));
  CHECK(map.start_candidates() == std::vector<Cell>{{0, 0}});
  CHECK(map.goal_candidates() == std::vector<Cell>{{3, 2}});
  REQUIRE(map.subgoals().size() == 2);
  CHECK(map.subgoal_label({2, 1}) == '1');
  CHECK(map.subgoal_label({2, 2}) == '2');
  CHECK(map.subgoal_label({0, 0}) == '\0');
  CHECK(map.render() == kSmallMap);
}

TEST_CASE("cell indexing is 1-based row-major including walls") {
  const GridMap map = GridMap::parse(kSmallMap);
  CHECK(map.cell_index({0, 0}) == 1);
  CHECK(map.cell_index({3, 0}) == 4);
  CHECK(map.cell_index({2, 1}) == 7);
  CHECK(map.cell_at(7) == Cell{2, 1});
  for (int i = 1; i <= map.cell_count(); ++i) {
    CHECK(map.cell_index(map.cell_at(i)) == i);
  }
}

TEST_CASE("open grid has no walls or labels") {
  const GridMap map = GridMap::open_grid(3, 2);
  CHECK(map.cell_count() == 6);
  CHECK(map.open_cells().size() == 6);
  CHECK(map.subgoals().empty());
}

TEST_CASE("set_subgoal labels a cell after parsing") {
  GridMap map = GridMap::open_grid(3, 3);
  map.set_subgoal('a', {1, 1});
  CHECK(map.subgoal_label({1, 1}) == 'a');
  REQUIRE(map.subgoals().size() == 1);
  CHECK(map.subgoals().front().cell == Cell{1, 1});
}

TEST_CASE("progress spec: chain and tree advancement") {
  const ProgressSpec chain = ProgressSpec::chain({'1', '2'});
  CHECK(chain.levels() == 2);
  CHECK(chain.advances(0, '1'));
  CHECK_FALSE(chain.advances(0, '2'));
  CHECK(chain.advances(1, '2'));
  CHECK_FALSE(chain.advances(2, '2'));

  const ProgressSpec tree = ProgressSpec::tree({{'1', '4'}, {'2', '4'}});
  CHECK(tree.levels() == 2);
  CHECK(tree.advances(0, '1'));
  CHECK(tree.advances(0, '2'));
  CHECK_FALSE(tree.advances(0, '4'));
  CHECK(tree.advances(1, '4'));
  CHECK_THROWS_AS(ProgressSpec::tree({{'1'}, {'2', '3'}}),
                  std::invalid_argument);
}

TEST_CASE("key maze state codec covers cells x progress levels") {
  const KeyMaze env(GridMap::parse(kSmallMap), ProgressSpec::chain({'1', '2'}),
                    {0, 0}, {3, 2}, 0.2);
  CHECK(env.state_count() == 36);  // 12 cells x 3 levels
  CHECK(env.action_count() == 5);
  CHECK(env.encode_state({2, 1}, 0) == 7);
  CHECK(env.encode_state({2, 1}, 1) == 19);
  CHECK(env.decode_state(19) == std::pair<Cell, int>{{2, 1}, 1});
  CHECK_THROWS_AS(env.decode_state(0), std::out_of_range);
  CHECK_THROWS_AS(env.decode_state(37), std::out_of_range);
}

TEST_CASE("key maze movement distribution: slip shared across directions") {
  const KeyMaze env(GridMap::open_grid(3, 3), ProgressSpec::chain({}), {1, 1},
                    {2, 2}, 0.2);
  const auto dist = env.transition_distribution(env.encode_state({1, 1}, 0),
                                                KeyMaze::kRight);
  CHECK(total_probability(dist) == doctest::Approx(1.0));
  std::map<StateId, double> by_state(dist.begin(), dist.end());
  CHECK(by_state[env.encode_state({2, 1}, 0)] == doctest::Approx(0.85));
  CHECK(by_state[env.encode_state({0, 1}, 0)] == doctest::Approx(0.05));
  CHECK(by_state[env.encode_state({1, 0}, 0)] == doctest::Approx(0.05));
  CHECK(by_state[env.encode_state({1, 2}, 0)] == doctest::Approx(0.05));
}

TEST_CASE("key maze walls and borders bounce back, merging probability") {
  const KeyMaze env(GridMap::parse(kSmallMap), ProgressSpec::chain({'1', '2'}),
                    {0, 0}, {3, 2}, 0.2);
  // From (0,0): up and left bounce, right is open, down is open.
  const auto dist =
      env.transition_distribution(env.encode_state({0, 0}, 0), KeyMaze::kUp);
  std::map<StateId, double> by_state(dist.begin(), dist.end());
  CHECK(by_state[env.encode_state({0, 0}, 0)] == doctest::Approx(0.90));
  CHECK(by_state[env.encode_state({1, 0}, 0)] == doctest::Approx(0.05));
  CHECK(by_state[env.encode_state({0, 1}, 0)] == doctest::Approx(0.05));
}

TEST_CASE("key maze press semantics: order, rewards, terminal") {
  const KeyMaze env(GridMap::parse(kSmallMap), ProgressSpec::chain({'1', '2'}),
                    {0, 0}, {3, 2}, 0.0);
  const StateId at_sg1 = env.encode_state({2, 1}, 0);
  const StateId at_sg2 = env.encode_state({2, 2}, 0);
  const StateId goal_full = env.encode_state({3, 2}, 2);

  SUBCASE("pressing the right key advances one level, reward 0") {
    const auto dist = env.transition_distribution(at_sg1, KeyMaze::kPress);
    REQUIRE(dist.size() == 1);
    CHECK(dist.front().first == env.encode_state({2, 1}, 1));
    CHECK(env.reward(at_sg1, KeyMaze::kPress, dist.front().first) == 0.0);
    CHECK_FALSE(env.terminal(at_sg1, KeyMaze::kPress, dist.front().first));
  }
  SUBCASE("pressing out of order stays, reward 0 at a subgoal place") {
    const auto dist = env.transition_distribution(at_sg2, KeyMaze::kPress);
    REQUIRE(dist.size() == 1);
    CHECK(dist.front().first == at_sg2);
    CHECK(env.reward(at_sg2, KeyMaze::kPress, at_sg2) == 0.0);
  }
  SUBCASE("pressing on a plain cell costs -10") {
    const StateId plain = env.encode_state({0, 0}, 0);
    CHECK(env.reward(plain, KeyMaze::kPress, plain) == -10.0);
  }
  SUBCASE("pressing at the goal with full progress pays +10 and terminates") {
    CHECK(env.reward(goal_full, KeyMaze::kPress, goal_full) == 10.0);
    CHECK(env.terminal(goal_full, KeyMaze::kPress, goal_full));
    // Without full progress the goal press is just a bad press.
    const StateId goal_early = env.encode_state({3, 2}, 1);
    CHECK(env.reward(goal_early, KeyMaze::kPress, goal_early) == -10.0);
    CHECK_FALSE(env.terminal(goal_early, KeyMaze::kPress, goal_early));
  }
  SUBCASE("movement costs -1") {
    const StateId s = env.encode_state({0, 0}, 0);
    CHECK(env.reward(s, KeyMaze::kRight, env.encode_state({1, 0}, 0)) == -1.0);
  }
}

TEST_CASE("goal-only scheme: four actions, +10 on entering the goal") {
  const KeyMaze env(GridMap::open_grid(3, 1), ProgressSpec::chain({}), {0, 0},
                    {2, 0}, 0.0, KeyMaze::RewardScheme::goal_only);
  CHECK(env.action_count() == 4);
  const StateId s1 = env.encode_state({1, 0}, 0);
  const StateId s2 = env.encode_state({2, 0}, 0);
  CHECK(env.reward(s1, KeyMaze::kRight, s2) == 10.0);
  CHECK(env.terminal(s1, KeyMaze::kRight, s2));
  CHECK(env.reward(env.encode_state({0, 0}, 0), KeyMaze::kRight, s1) == 0.0);
}

TEST_CASE("taxi geometry: 500 states, landmarks, walls") {
  const Taxi env(0, 3, 0.0);
  CHECK(env.state_count() == 500);
  CHECK(env.size() == 5);
  CHECK(env.landmark(0) == Cell{0, 0});
  CHECK(env.landmark(1) == Cell{4, 0});
  CHECK(env.landmark(2) == Cell{0, 4});
  CHECK(env.landmark(3) == Cell{3, 4});

  // The wall east of (1,0) blocks east/west movement across it.
  const StateId s10 = env.encode_state({{1, 0}, 0, 3});
  auto dist = env.transition_distribution(s10, Taxi::kEast);
  REQUIRE(dist.size() == 1);
  CHECK(env.decode_state(dist.front().first).taxi == Cell{1, 0});
  const StateId s20 = env.encode_state({{2, 0}, 0, 3});
  dist = env.transition_distribution(s20, Taxi::kWest);
  REQUIRE(dist.size() == 1);
  CHECK(env.decode_state(dist.front().first).taxi == Cell{2, 0});
  // No wall between (2,1) and (3,1).
  const StateId s21 = env.encode_state({{2, 1}, 0, 3});
  dist = env.transition_distribution(s21, Taxi::kEast);
  CHECK(env.decode_state(dist.front().first).taxi == Cell{3, 1});
}

TEST_CASE("taxi pickup and putdown semantics") {
  const Taxi env(1, 2, 0.0);
  const StateId at_pickup = env.encode_state({{4, 0}, 1, 2});
  SUBCASE("good pickup moves the passenger into the taxi at cost -1") {
    const auto dist = env.transition_distribution(at_pickup, Taxi::kPickUp);
    REQUIRE(dist.size() == 1);
    CHECK(env.decode_state(dist.front().first).passenger == Taxi::kInTaxi);
    CHECK(env.reward(at_pickup, Taxi::kPickUp, dist.front().first) == -1.0);
  }
  SUBCASE("wrong-place pickup costs -10 and does nothing") {
    const StateId away = env.encode_state({{2, 2}, 1, 2});
    const auto dist = env.transition_distribution(away, Taxi::kPickUp);
    CHECK(dist.front().first == away);
    CHECK(env.reward(away, Taxi::kPickUp, away) == -10.0);
  }
  SUBCASE("delivery pays +20 and terminates") {
    const StateId loaded = env.encode_state({{0, 4}, Taxi::kInTaxi, 2});
    const auto dist = env.transition_distribution(loaded, Taxi::kPutDown);
    CHECK(env.decode_state(dist.front().first).passenger == 2);
    CHECK(env.reward(loaded, Taxi::kPutDown, dist.front().first) == 20.0);
    CHECK(env.terminal(loaded, Taxi::kPutDown, dist.front().first));
  }
  SUBCASE("wrong-place putdown costs -10") {
    const StateId loaded = env.encode_state({{2, 2}, Taxi::kInTaxi, 2});
    const auto dist = env.transition_distribution(loaded, Taxi::kPutDown);
    CHECK(dist.front().first == loaded);
    CHECK(env.reward(loaded, Taxi::kPutDown, loaded) == -10.0);
  }
}

TEST_CASE("taxi slip applies only to movement") {
  const Taxi env(0, 1, 0.2);
  const StateId mid = env.encode_state({{2, 2}, 0, 1});
  const auto dist = env.transition_distribution(mid, Taxi::kNorth);
  CHECK(total_probability(dist) == doctest::Approx(1.0));
  CHECK(dist.size() == 4);
  CHECK(env.transition_distribution(mid, Taxi::kPickUp).size() == 1);
}

TEST_CASE("taxi initial state uses the configured pickup and destination") {
  const Taxi env(2, 1, 0.2);
  Rng rng(5);
  for (int i = 0; i < 20; ++i) {
    const Taxi::State st = env.decode_state(env.initial_state(rng));
    CHECK(st.passenger == 2);
    CHECK(st.destination == 1);
    CHECK(st.taxi.x >= 0);
    CHECK(st.taxi.x < 5);
  }
}

TEST_CASE("scaled taxi multiplies the layout") {
  const Taxi env(0, 1, 0.0, 4);
  CHECK(env.size() == 20);
  CHECK(env.state_count() == 400 * 20);
  CHECK(env.landmark(1) == Cell{16, 0});
  CHECK(env.landmark(3) == Cell{12, 16});
}

TEST_CASE("environment constructor validation") {
  CHECK_THROWS_AS(KeyMaze(GridMap::parse(kSmallMap), ProgressSpec::chain({}),
                          {3, 0}, {3, 2}),
                  std::invalid_argument);  // start on a wall
  CHECK_THROWS_AS(Taxi(0, 4), std::invalid_argument);
  CHECK_THROWS_AS(Taxi(0, 1, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(Taxi(0, 1, 0.2, 0), std::invalid_argument);
}
