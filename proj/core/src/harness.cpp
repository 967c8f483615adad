#include "sarm/harness.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <stdexcept>

#include "sarm/hst.hpp"
#include "sarm/miner.hpp"

namespace sarm {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  std::uint64_t h = seed * 0x9E3779B97F4A7C15ull + a * 0x100000001B3ull + b;
  h ^= h >> 33;
  h *= 0xFF51AFD7ED558CCDull;
  h ^= h >> 33;
  return h;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_text(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string line;
  bool in_map = false;
  while (std::getline(in, line)) {
    if (in_map) {
      if (trim(line) == "endmap") {
        in_map = false;
      } else {
        cfg.map_text += line;
        cfg.map_text += '\n';
      }
      continue;
    }
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (t == "map:") {
      in_map = true;
      cfg.map_text.clear();
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config: expected key=value, got '" + t + "'");
    }
    const std::string key = trim(t.substr(0, eq));
    const std::string val = trim(t.substr(eq + 1));
    try {
      if (key == "env") {
        cfg.env = val;
      } else if (key == "order") {
        cfg.orders.emplace_back(val.begin(), val.end());
      } else if (key == "minsup") {
        cfg.minsup = std::stod(val);
      } else if (key == "minconf") {
        cfg.minconf = std::stod(val);
      } else if (key == "runs") {
        cfg.runs = std::stoi(val);
      } else if (key == "episodes") {
        cfg.episodes = std::stoi(val);
      } else if (key == "hrl_episodes") {
        cfg.hrl_episodes = std::stoi(val);
      } else if (key == "option_episodes") {
        cfg.option_episodes = std::stoi(val);
      } else if (key == "max_steps") {
        cfg.max_steps = std::stoi(val);
      } else if (key == "top_k") {
        cfg.top_k = std::stoi(val);
      } else if (key == "cluster_window") {
        cfg.cluster_window = std::stoi(val);
      } else if (key == "seed") {
        cfg.seed = std::stoull(val);
      } else if (key == "alpha") {
        cfg.alpha = std::stod(val);
      } else if (key == "gamma") {
        cfg.gamma = std::stod(val);
      } else if (key == "epsilon") {
        cfg.epsilon = std::stod(val);
      } else if (key == "slip") {
        cfg.slip = std::stod(val);
      } else if (key == "taxi_scale") {
        cfg.taxi_scale = std::stoi(val);
      } else if (key == "method") {
        cfg.method_flat = val == "flat" || val == "both";
        cfg.method_hier = val == "hier" || val == "both";
        if (!cfg.method_flat && !cfg.method_hier) {
          throw std::invalid_argument("config: method must be flat|hier|both");
        }
      } else {
        throw std::invalid_argument("config: unknown key '" + key + "'");
      }
    } catch (const std::invalid_argument&) {
      throw;
    } catch (const std::exception&) {
      throw std::invalid_argument("config: bad value for '" + key + "': " + val);
    }
  }
  if (in_map) throw std::invalid_argument("config: map block without endmap");
  return cfg;
}

ExperimentConfig ExperimentConfig::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("config: cannot open " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_text(buf.str());
}

std::string to_string(PipelineStage stage) {
  switch (stage) {
    case PipelineStage::ok: return "ok";
    case PipelineStage::learning: return "learning";
    case PipelineStage::mining: return "mining";
    case PipelineStage::hst: return "hst";
    case PipelineStage::options: return "options";
    case PipelineStage::execution: return "execution";
  }
  return "unknown";
}

std::uint64_t VisitMatrix::total() const {
  std::uint64_t sum = 0;
  for (auto c : counts) sum += c;
  return sum;
}

std::string VisitMatrix::to_csv() const {
  std::ostringstream out;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      if (x) out << ',';
      out << at(x, y);
    }
    out << '\n';
  }
  return out.str();
}

std::string VisitMatrix::to_pgm() const {
  std::uint64_t max_count = 1;
  for (auto c : counts) max_count = std::max(max_count, c);
  const std::uint64_t maxval = std::min<std::uint64_t>(max_count, 65535);
  std::ostringstream out;
  out << "P2\n" << width << ' ' << height << '\n' << maxval << '\n';
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      if (x) out << ' ';
      out << at(x, y) * maxval / max_count;
    }
    out << '\n';
  }
  return out.str();
}

VisitMatrix emit_visit_matrix(const std::vector<std::vector<StateId>>& trajs,
                              int width, int height,
                              const std::function<Cell(StateId)>& cell_of) {
  VisitMatrix m;
  m.width = width;
  m.height = height;
  m.counts.assign(static_cast<std::size_t>(width) * height, 0);
  for (const auto& traj : trajs) {
    for (StateId s : traj) {
      const Cell c = cell_of(s);
      if (c.x >= 0 && c.x < width && c.y >= 0 && c.y < height) {
        ++m.counts[static_cast<std::size_t>(c.y) * width + c.x];
      }
    }
  }
  return m;
}

namespace {

// Per-run environment plus the projections the artifacts need.
struct RunEnv {
  std::unique_ptr<Env> env;
  std::function<Cell(StateId)> cell_of;
  int grid_width = 0;
  int grid_height = 0;
  std::unique_ptr<DomainSpec> spec;  // factored decode, if meaningful
};

ProgressSpec progress_from(const ExperimentConfig& cfg, const GridMap& map) {
  if (cfg.orders.size() > 1) return ProgressSpec::tree(cfg.orders);
  if (cfg.orders.size() == 1) return ProgressSpec::chain(cfg.orders.front());
  // Default: chain over the map's subgoal labels in label order.
  std::vector<char> labels;
  for (const auto& sg : map.subgoals()) labels.push_back(sg.label);
  std::sort(labels.begin(), labels.end());
  return ProgressSpec::chain(std::move(labels));
}

RunEnv make_run_env(const ExperimentConfig& cfg, int run) {
  RunEnv re;
  if (cfg.env == "taxi") {
    const int pickup = (run / 4) % 4;
    const int dest = run % 4;
    auto taxi = std::make_unique<Taxi>(pickup, dest, cfg.slip, cfg.taxi_scale);
    re.grid_width = taxi->size();
    re.grid_height = taxi->size();
    re.spec = std::make_unique<DomainSpec>(taxi->domain());
    const Taxi* t = taxi.get();
    re.cell_of = [t](StateId s) { return t->decode_state(s).taxi; };
    re.env = std::move(taxi);
    return re;
  }
  if (cfg.env != "key_maze" && cfg.env != "goal_maze") {
    throw std::invalid_argument("config: unknown env '" + cfg.env + "'");
  }
  if (cfg.map_text.empty()) {
    throw std::invalid_argument("config: maze env needs a map block");
  }
  GridMap map = GridMap::parse(cfg.map_text);
  ProgressSpec progress = progress_from(cfg, map);

  // Runs cycle through seeded permutations of the start/goal candidate
  // pools (or any open non-subgoal cell), so consecutive runs are
  // guaranteed to vary and mined support reflects the task structure
  // rather than one particular route.
  std::vector<Cell> starts = map.start_candidates();
  std::vector<Cell> goals = map.goal_candidates();
  std::vector<Cell> open;
  for (Cell c : map.open_cells()) {
    if (map.subgoal_label(c) == '\0') open.push_back(c);
  }
  if (starts.empty()) starts = open;
  if (goals.empty()) goals = open;
  if (starts.empty() || goals.empty()) {
    throw std::invalid_argument("config: map has no usable start/goal cells");
  }
  Rng rng(mix_seed(cfg.seed, 0, 11));
  std::shuffle(starts.begin(), starts.end(), rng);
  std::shuffle(goals.begin(), goals.end(), rng);
  const std::size_t r = static_cast<std::size_t>(run);
  const Cell start = starts[r % starts.size()];
  Cell goal = goals[r % goals.size()];
  if (goal == start && goals.size() > 1) {
    goal = goals[(r + 1) % goals.size()];
  }
  const auto scheme = cfg.env == "goal_maze" ? KeyMaze::RewardScheme::goal_only
                                             : KeyMaze::RewardScheme::key_press;
  auto maze = std::make_unique<KeyMaze>(std::move(map), std::move(progress),
                                        start, goal, cfg.slip, scheme);
  re.grid_width = maze->map().width();
  re.grid_height = maze->map().height();
  // Maze ids are cell + cells * phase rather than a mixed-radix image, so
  // region variables fall back to the single synthetic MDP variable.
  const KeyMaze* m = maze.get();
  re.cell_of = [m](StateId s) { return m->decode_state(s).first; };
  re.env = std::move(maze);
  return re;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::string rules_csv(const std::vector<SequentialRule>& rules) {
  std::ostringstream out;
  out << "premise|consequent|support|confidence|order_freq\n";
  out << std::setprecision(10);
  for (const auto& r : rules) {
    for (std::size_t i = 0; i < r.premise.size(); ++i) {
      if (i) out << ' ';
      out << r.premise[i];
    }
    out << '|' << r.consequent << '|' << r.support << '|' << r.confidence << '|'
        << r.order_frequency << '\n';
  }
  return out.str();
}

std::string curves_csv(const std::vector<RunCurve>& flat,
                       const std::vector<RunCurve>& hier) {
  std::size_t episodes = 0;
  for (const auto& c : flat) episodes = std::max(episodes, c.steps.size());
  for (const auto& c : hier) episodes = std::max(episodes, c.steps.size());

  std::ostringstream out;
  out << "episode";
  for (std::size_t r = 0; r < flat.size(); ++r) {
    out << ",flat_steps_" << r << ",flat_reward_" << r;
  }
  for (std::size_t r = 0; r < hier.size(); ++r) {
    out << ",hier_steps_" << r << ",hier_reward_" << r;
  }
  if (!flat.empty()) out << ",flat_mean_steps,flat_mean_reward";
  if (!hier.empty()) out << ",hier_mean_steps,hier_mean_reward";
  out << '\n';

  auto mean_at = [](const std::vector<RunCurve>& curves, std::size_t ep,
                    bool steps) {
    double sum = 0.0;
    int n = 0;
    for (const auto& c : curves) {
      if (ep < c.steps.size()) {
        sum += steps ? c.steps[ep] : c.rewards[ep];
        ++n;
      }
    }
    return n ? sum / n : 0.0;
  };

  for (std::size_t ep = 0; ep < episodes; ++ep) {
    out << ep;
    for (const auto& c : flat) {
      out << ',' << (ep < c.steps.size() ? c.steps[ep] : 0) << ','
          << (ep < c.rewards.size() ? c.rewards[ep] : 0.0);
    }
    for (const auto& c : hier) {
      out << ',' << (ep < c.steps.size() ? c.steps[ep] : 0) << ','
          << (ep < c.rewards.size() ? c.rewards[ep] : 0.0);
    }
    if (!flat.empty()) {
      out << ',' << mean_at(flat, ep, true) << ',' << mean_at(flat, ep, false);
    }
    if (!hier.empty()) {
      out << ',' << mean_at(hier, ep, true) << ',' << mean_at(hier, ep, false);
    }
    out << '\n';
  }
  return out.str();
}

// Mean total reward of a run's final tenth of episodes.
double tail_mean(const RunCurve& c) {
  if (c.rewards.empty()) return 0.0;
  const std::size_t tail = std::max<std::size_t>(1, c.rewards.size() / 10);
  double sum = 0.0;
  for (std::size_t i = c.rewards.size() - tail; i < c.rewards.size(); ++i) {
    sum += c.rewards[i];
  }
  return sum / static_cast<double>(tail);
}

void write_artifacts(const PipelineResult& result,
                     const std::filesystem::path& out_dir,
                     const RunEnv* view) {
  std::filesystem::create_directories(out_dir);

  std::vector<std::vector<StateId>> state_seqs;
  for (const auto& t : result.mined) state_seqs.push_back(t.states);
  write_trajectories_csv(out_dir / "transactions.csv", state_seqs);
  write_text(out_dir / "rules.csv", rules_csv(result.rules));
  if (result.hst) write_text(out_dir / "hst.txt", hst_render(*result.hst));
  if (result.hierarchy) {
    write_text(out_dir / "hierarchy.txt", hierarchy_render(*result.hierarchy));
    write_text(out_dir / "hierarchy.adj",
               hierarchy_adjacency(*result.hierarchy));
  }
  if (view && view->grid_width > 0) {
    const VisitMatrix visits = emit_visit_matrix(
        state_seqs, view->grid_width, view->grid_height, view->cell_of);
    write_text(out_dir / "visits.csv", visits.to_csv());
    write_text(out_dir / "visits.pgm", visits.to_pgm());
  }
  write_text(out_dir / "curves.csv",
             curves_csv(result.flat_curves, result.hier_curves));

  std::ostringstream stats;
  stats << "status=" << to_string(result.failed_stage) << '\n';
  if (!result.message.empty()) stats << "message=" << result.message << '\n';
  stats << "transactions=" << result.transactions.size() << '\n'
        << "skipped_trajectories=" << result.skipped_trajectories << '\n'
        << "frequent_itemsets=" << result.frequents.size() << '\n'
        << "subgoals=" << result.subgoals.size() << '\n'
        << "rules=" << result.rules.size() << '\n'
        << "exits=" << result.exits.size() << '\n'
        << "options=" << result.options.size() << '\n';
  if (result.comparison) {
    stats << std::setprecision(10) << "welch_t=" << result.comparison->t << '\n'
          << "welch_df=" << result.comparison->df << '\n'
          << "welch_p=" << result.comparison->p << '\n';
  }
  write_text(out_dir / "stats.txt", stats.str());
}

}  // namespace

PipelineResult run_pipeline(const ExperimentConfig& config,
                            const std::filesystem::path& out_dir,
                            PipelineStage stop_after) {
  PipelineResult result;
  std::vector<RunEnv> envs;
  auto finish = [&](PipelineStage stage, const std::string& message) {
    result.failed_stage = stage;
    result.message = message;
    if (!out_dir.empty()) {
      write_artifacts(result, out_dir, envs.empty() ? nullptr : &envs.front());
    }
    return result;
  };

  // Stage 1: flat training across runs; the best episodes feed the miner.
  std::vector<std::vector<StateId>> state_seqs;
  try {
    for (int r = 0; r < config.runs; ++r) {
      envs.push_back(make_run_env(config, r));
      LearnerParams params{config.alpha, config.gamma, config.epsilon,
                           config.episodes, config.max_steps,
                           mix_seed(config.seed, static_cast<std::uint64_t>(r), 1)};
      TrainResult trained = train(*envs.back().env, params);
      RunCurve curve;
      for (const auto& ep : trained.episodes) {
        curve.steps.push_back(ep.steps());
        curve.rewards.push_back(ep.total_reward);
      }
      result.flat_curves.push_back(std::move(curve));
      for (const auto& ep : select_successful(trained.episodes,
                                              static_cast<std::size_t>(config.top_k))) {
        result.mined.push_back({ep.states, ep.actions});
        state_seqs.push_back(ep.states);
      }
    }
  } catch (const std::exception& e) {
    return finish(PipelineStage::learning, e.what());
  }
  if (result.mined.empty()) {
    return finish(PipelineStage::learning, "no successful trajectories to mine");
  }
  if (stop_after == PipelineStage::learning) {
    return finish(PipelineStage::ok, "");
  }

  // Stage 2: frequent itemsets and sequential rules.
  try {
    result.transactions =
        trajectories_to_transactions(state_seqs, &result.skipped_trajectories);
    result.frequents = fp_growth(result.transactions, config.minsup);
    for (const auto& f : result.frequents) {
      if (f.items.size() == 1) result.subgoals.push_back(f.items.front());
    }
    if (config.cluster_window > 0) {
      std::vector<StateId> reps;
      for (const auto& cluster : cluster_adjacent_subgoals(
               result.subgoals, state_seqs, config.cluster_window)) {
        reps.push_back(cluster.front());
      }
      result.subgoals = std::move(reps);
    }
    result.rules =
        generate_rules(result.frequents, result.transactions, config.minconf);
  } catch (const std::exception& e) {
    return finish(PipelineStage::mining, e.what());
  }
  if (result.subgoals.empty()) {
    return finish(PipelineStage::mining, "no frequent states at this minsup");
  }
  if (stop_after == PipelineStage::mining) {
    return finish(PipelineStage::ok, "");
  }

  // Stage 3: structure tree, exits, subtask hierarchy.
  try {
    result.hst = hst_construct(result.rules);
    // Exits come from the states the rules retained (the maximal chains);
    // without rules fall back to the frequent singletons.
    std::vector<StateId> exit_candidates;
    if (!result.rules.empty()) {
      std::set<StateId> in_rules;
      for (const auto& r : result.rules) {
        for (StateId s : r.sequence()) in_rules.insert(s);
      }
      exit_candidates.assign(in_rules.begin(), in_rules.end());
    } else {
      exit_candidates = result.subgoals;
    }
    result.exits = extract_exits(exit_candidates, result.mined);
    if (result.exits.empty()) {
      return finish(PipelineStage::hst, "no exits derivable from the rules");
    }
    result.hierarchy = build_hierarchy(result.exits, result.mined,
                                       envs.front().env.get(),
                                       envs.front().spec.get());
  } catch (const std::exception& e) {
    return finish(PipelineStage::hst, e.what());
  }

  if (stop_after == PipelineStage::hst || !config.method_hier) {
    return finish(PipelineStage::ok, "");
  }

  // Stage 4: one option per exit-bearing subtask, deepest first.
  try {
    for (const auto& task : result.hierarchy->subtasks) {
      if (task.exits.empty() || task.states.empty()) continue;
      LearnerParams params{config.alpha, config.gamma, config.epsilon,
                           config.option_episodes, config.max_steps,
                           mix_seed(config.seed,
                                    static_cast<std::uint64_t>(task.id), 2)};
      OptionLearnResult learned =
          learn_option(*envs.front().env, task, params);
      double conf = 0.0;
      for (const auto& r : result.rules) {
        for (StateId s : r.sequence()) {
          if (task.subgoal && s == *task.subgoal) {
            conf = std::max(conf, r.confidence);
          }
        }
      }
      learned.policy.confidence = conf;
      result.options.push_back(std::move(learned.policy));
    }
  } catch (const std::exception& e) {
    return finish(PipelineStage::options, e.what());
  }

  // Stage 5: hierarchical execution per run, same envs as the baseline.
  try {
    const int episodes =
        config.hrl_episodes > 0 ? config.hrl_episodes : config.episodes;
    for (int r = 0; r < config.runs; ++r) {
      LearnerParams params{config.alpha, config.gamma, config.epsilon,
                           episodes, config.max_steps,
                           mix_seed(config.seed, static_cast<std::uint64_t>(r), 3)};
      std::vector<EpisodeRecord> records;
      smdp_train(*envs[r].env, result.options, params, &records);
      RunCurve curve;
      for (const auto& ep : records) {
        curve.steps.push_back(ep.steps());
        curve.rewards.push_back(ep.total_reward);
      }
      result.hier_curves.push_back(std::move(curve));
    }
  } catch (const std::exception& e) {
    return finish(PipelineStage::execution, e.what());
  }

  if (config.method_flat && config.runs >= 2) {
    std::vector<double> flat_tail, hier_tail;
    for (const auto& c : result.flat_curves) flat_tail.push_back(tail_mean(c));
    for (const auto& c : result.hier_curves) hier_tail.push_back(tail_mean(c));
    try {
      result.comparison = welch_t_test(flat_tail, hier_tail);
    } catch (const std::invalid_argument&) {
      // Degenerate samples (e.g. identical rewards); no comparison emitted.
    }
  }
  return finish(PipelineStage::ok, "");
}

// ---- Golden three-phase fixture ----

std::vector<std::vector<StateId>> golden_trajectories() {
  return {
      {1, 2, 3, 7, 27, 31, 35, 34, 54, 58, 57},
      {1, 5, 6, 7, 27, 31, 30, 34, 54, 53, 57},
      {3, 7, 27, 26, 30, 34, 54, 55, 56, 60, 59},
      {3, 7, 27, 31, 35, 34, 54, 58, 59},
      {12, 8, 7, 27, 26, 30, 34, 54, 58, 59},
      {12, 11, 7, 27, 26, 30, 31, 35, 34, 54, 58, 59},
  };
}

KeyMaze golden_env() {
  GridMap map = GridMap::open_grid(4, 5);
  map.set_subgoal('1', map.cell_at(7));
  map.set_subgoal('2', map.cell_at(14));
  return KeyMaze(std::move(map), ProgressSpec::chain({'1', '2'}),
                 /*start=*/{0, 0}, /*goal=*/{0, 4}, /*slip=*/0.2);
}

StateActionTrajectory infer_actions(const std::vector<StateId>& states,
                                    const KeyMaze& env) {
  StateActionTrajectory traj;
  traj.states = states;
  for (std::size_t i = 0; i + 1 < states.size(); ++i) {
    const auto [cell, level] = env.decode_state(states[i]);
    const auto [next_cell, next_level] = env.decode_state(states[i + 1]);
    Action a = -1;
    if (next_level != level) {
      a = KeyMaze::kPress;
    } else if (next_cell.x == cell.x + 1 && next_cell.y == cell.y) {
      a = KeyMaze::kRight;
    } else if (next_cell.x == cell.x - 1 && next_cell.y == cell.y) {
      a = KeyMaze::kLeft;
    } else if (next_cell.x == cell.x && next_cell.y == cell.y + 1) {
      a = KeyMaze::kDown;
    } else if (next_cell.x == cell.x && next_cell.y == cell.y - 1) {
      a = KeyMaze::kUp;
    } else {
      throw std::invalid_argument("infer_actions: states " +
                                  std::to_string(states[i]) + " -> " +
                                  std::to_string(states[i + 1]) +
                                  " are not one action apart");
    }
    traj.actions.push_back(a);
  }
  return traj;
}

PipelineResult run_golden(const std::filesystem::path& out_dir) {
  PipelineResult result;
  const KeyMaze env = golden_env();
  const std::vector<std::vector<StateId>> trajs = golden_trajectories();
  for (const auto& t : trajs) result.mined.push_back(infer_actions(t, env));

  result.transactions =
      trajectories_to_transactions(trajs, &result.skipped_trajectories);
  result.frequents = fp_growth(result.transactions, 1.0);
  for (const auto& f : result.frequents) {
    if (f.items.size() == 1) result.subgoals.push_back(f.items.front());
  }
  result.rules = generate_rules(result.frequents, result.transactions, 1.0);
  result.hst = hst_construct(result.rules);
  result.exits = extract_exits(result.subgoals, result.mined);
  result.hierarchy = build_hierarchy(result.exits, result.mined, &env);

  if (!out_dir.empty()) {
    RunEnv view;
    view.grid_width = env.map().width();
    view.grid_height = env.map().height();
    view.cell_of = [&env](StateId s) { return env.decode_state(s).first; };
    write_artifacts(result, out_dir, &view);
  }
  return result;
}

}  // namespace sarm
