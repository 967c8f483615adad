#include "sarm/miner.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace sarm {

namespace {

// Smallest integer count c with c/N >= minsup.
std::uint32_t min_count_for(double minsup, std::size_t n) {
  const double raw = minsup * static_cast<double>(n);
  auto c = static_cast<std::uint32_t>(std::ceil(raw - 1e-9));
  return std::max<std::uint32_t>(c, 1);
}

}  // namespace

bool Transaction::contains_all(const std::vector<StateId>& set) const {
  for (StateId item : set) {
    if (!contains(item)) return false;
  }
  return true;
}

std::vector<Transaction> trajectories_to_transactions(
    const std::vector<std::vector<StateId>>& trajectories,
    std::size_t* skipped) {
  std::vector<Transaction> out;
  std::size_t skip = 0;
  for (std::size_t idx = 0; idx < trajectories.size(); ++idx) {
    const auto& traj = trajectories[idx];
    if (traj.empty()) {
      ++skip;
      continue;
    }
    Transaction t;
    t.source_id = static_cast<int>(idx);  // index in the input list
    for (std::size_t i = 0; i < traj.size(); ++i) {
      if (t.first_occurrence.emplace(traj[i], static_cast<int>(i)).second) {
        t.items.push_back(traj[i]);
      }
    }
    std::sort(t.items.begin(), t.items.end());
    out.push_back(std::move(t));
  }
  if (skipped) *skipped = skip;
  return out;
}

FPTree::FPTree(const std::vector<Transaction>& transactions,
               std::uint32_t min_count) {
  std::vector<WeightedItems> weighted;
  weighted.reserve(transactions.size());
  for (const auto& t : transactions) weighted.push_back({t.items, 1});
  build(weighted, min_count);
}

FPTree::FPTree(const std::vector<WeightedItems>& weighted,
               std::uint32_t min_count) {
  build(weighted, min_count);
}

void FPTree::build(const std::vector<WeightedItems>& weighted,
                   std::uint32_t min_count) {
  root_ = std::make_unique<Node>();
  std::unordered_map<StateId, std::uint32_t> counts;
  for (const auto& [items, w] : weighted) {
    for (StateId item : items) counts[item] += w;
  }
  for (const auto& [item, c] : counts) {
    if (c >= min_count) supports_[item] = c;
  }
  for (const auto& [item, c] : supports_) order_.push_back(item);
  std::sort(order_.begin(), order_.end(), [&](StateId a, StateId b) {
    const auto sa = supports_.at(a), sb = supports_.at(b);
    return sa != sb ? sa > sb : a < b;
  });
  std::unordered_map<StateId, std::size_t> rank;
  for (std::size_t i = 0; i < order_.size(); ++i) rank[order_[i]] = i;

  for (const auto& [items, w] : weighted) {
    std::vector<StateId> kept;
    for (StateId item : items) {
      if (supports_.count(item)) kept.push_back(item);
    }
    std::sort(kept.begin(), kept.end(), [&](StateId a, StateId b) {
      return rank.at(a) < rank.at(b);
    });
    if (!kept.empty()) insert(kept, w);
  }
}

void FPTree::insert(const std::vector<StateId>& items, std::uint32_t weight) {
  Node* cur = root_.get();
  for (StateId item : items) {
    Node* child = nullptr;
    for (const auto& c : cur->children) {
      if (c->item == item) {
        child = c.get();
        break;
      }
    }
    if (!child) {
      auto node = std::make_unique<Node>();
      node->item = item;
      node->parent = cur;
      child = node.get();
      cur->children.push_back(std::move(node));
      if (auto it = tails_.find(item); it != tails_.end()) {
        it->second->next_same_item = child;
        it->second = child;
      } else {
        headers_[item] = child;
        tails_[item] = child;
      }
    }
    child->count += weight;
    cur = child;
  }
}

std::uint32_t FPTree::item_support(StateId item) const {
  auto it = supports_.find(item);
  return it == supports_.end() ? 0 : it->second;
}

const FPTree::Node* FPTree::header(StateId item) const {
  auto it = headers_.find(item);
  return it == headers_.end() ? nullptr : it->second;
}

bool FPTree::single_path() const {
  const Node* cur = root_.get();
  while (!cur->children.empty()) {
    if (cur->children.size() > 1) return false;
    cur = cur->children.front().get();
  }
  return true;
}

namespace {

void mine(const FPTree& tree, const std::vector<StateId>& suffix,
          std::uint32_t min_count, std::size_t n_transactions,
          std::vector<FrequentItemset>& out) {
  const auto& order = tree.item_order();
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const StateId item = *it;
    const std::uint32_t support = tree.item_support(item);

    FrequentItemset fs;
    fs.items = suffix;
    fs.items.push_back(item);
    std::sort(fs.items.begin(), fs.items.end());
    fs.count = support;
    fs.support = static_cast<double>(support) / n_transactions;
    out.push_back(fs);

    // Conditional pattern base: prefix paths above every occurrence.
    std::vector<FPTree::WeightedItems> base;
    for (const FPTree::Node* node = tree.header(item); node;
         node = node->next_same_item) {
      std::vector<StateId> path;
      for (const FPTree::Node* p = node->parent; p && p->parent; p = p->parent) {
        path.push_back(p->item);
      }
      if (!path.empty()) base.push_back({std::move(path), node->count});
    }
    if (base.empty()) continue;
    FPTree conditional(base, min_count);
    if (!conditional.empty()) {
      mine(conditional, fs.items, min_count, n_transactions, out);
    }
  }
}

}  // namespace

std::vector<FrequentItemset> fp_growth(
    const std::vector<Transaction>& transactions, double minsup) {
  if (minsup <= 0.0 || minsup > 1.0) {
    throw std::invalid_argument("fp_growth: minsup outside (0,1]");
  }
  std::vector<FrequentItemset> out;
  if (transactions.empty()) return out;
  const std::uint32_t min_count = min_count_for(minsup, transactions.size());
  FPTree tree(transactions, min_count);
  mine(tree, {}, min_count, transactions.size(), out);
  std::sort(out.begin(), out.end(),
            [](const FrequentItemset& a, const FrequentItemset& b) {
              if (a.items.size() != b.items.size()) {
                return a.items.size() < b.items.size();
              }
              return a.items < b.items;
            });
  return out;
}

std::vector<StateId> SequentialRule::sequence() const {
  std::vector<StateId> seq = premise;
  seq.push_back(consequent);
  return seq;
}

namespace {

// Bitset over the frequent-item index space.
using ItemMask = std::vector<std::uint64_t>;

bool is_subset(const ItemMask& a, const ItemMask& b) {
  for (std::size_t w = 0; w < a.size(); ++w) {
    if ((a[w] & ~b[w]) != 0) return false;
  }
  return true;
}

}  // namespace

std::vector<SequentialRule> generate_rules(
    const std::vector<FrequentItemset>& frequents,
    const std::vector<Transaction>& transactions, double minconf) {
  std::vector<SequentialRule> rules;
  if (frequents.empty() || transactions.empty()) return rules;
  const std::size_t n = transactions.size();

  std::unordered_map<StateId, std::size_t> item_index;
  for (const auto& fs : frequents) {
    for (StateId item : fs.items) {
      item_index.emplace(item, item_index.size());
    }
  }
  const std::size_t words = (item_index.size() + 63) / 64;
  auto mask_of = [&](const std::vector<StateId>& items) {
    ItemMask m(words, 0);
    for (StateId item : items) {
      const std::size_t i = item_index.at(item);
      m[i / 64] |= std::uint64_t{1} << (i % 64);
    }
    return m;
  };

  // Maximal frequent itemsets: walk sizes descending, keep itemsets not
  // contained in an already-kept one.
  std::vector<std::size_t> by_size(frequents.size());
  for (std::size_t i = 0; i < by_size.size(); ++i) by_size[i] = i;
  std::stable_sort(by_size.begin(), by_size.end(),
                   [&](std::size_t a, std::size_t b) {
                     return frequents[a].items.size() > frequents[b].items.size();
                   });
  std::vector<std::size_t> maximal;
  std::vector<ItemMask> maximal_masks;
  for (std::size_t i : by_size) {
    ItemMask m = mask_of(frequents[i].items);
    bool covered = false;
    for (const auto& mm : maximal_masks) {
      if (is_subset(m, mm)) {
        covered = true;
        break;
      }
    }
    if (!covered) {
      maximal.push_back(i);
      maximal_masks.push_back(std::move(m));
    }
  }

  auto count_containing = [&](const std::vector<StateId>& items) {
    std::uint32_t c = 0;
    for (const auto& t : transactions) {
      if (t.contains_all(items)) ++c;
    }
    return c;
  };

  for (std::size_t i : maximal) {
    const FrequentItemset& fs = frequents[i];
    if (fs.items.size() < 2) continue;

    std::map<std::vector<StateId>, std::uint32_t> orderings;
    for (const auto& t : transactions) {
      if (!t.contains_all(fs.items)) continue;
      std::vector<StateId> seq = fs.items;
      std::sort(seq.begin(), seq.end(), [&](StateId a, StateId b) {
        return t.first_occurrence.at(a) < t.first_occurrence.at(b);
      });
      orderings[seq] += 1;
    }

    for (const auto& [seq, freq] : orderings) {
      SequentialRule rule;
      rule.consequent = seq.back();
      rule.premise.assign(seq.begin(), seq.end() - 1);
      std::vector<StateId> premise_set = rule.premise;
      std::sort(premise_set.begin(), premise_set.end());
      const std::uint32_t premise_count = count_containing(premise_set);
      rule.support = fs.support;
      rule.confidence =
          static_cast<double>(fs.count) / static_cast<double>(premise_count);
      rule.order_frequency = freq;
      if (rule.confidence + 1e-12 >= minconf) rules.push_back(std::move(rule));
    }
  }

  std::sort(rules.begin(), rules.end(),
            [](const SequentialRule& a, const SequentialRule& b) {
              if (a.confidence != b.confidence) return a.confidence > b.confidence;
              if (a.support != b.support) return a.support > b.support;
              if (a.order_frequency != b.order_frequency) {
                return a.order_frequency > b.order_frequency;
              }
              return a.sequence() < b.sequence();
            });
  return rules;
}

std::uint64_t candidate_rule_count(unsigned d) {
  if (d < 1) throw std::invalid_argument("candidate_rule_count: d must be >= 1");
  if (d > 40) throw std::overflow_error("candidate_rule_count: d too large");
  std::uint64_t pow3 = 1, pow2 = 1;
  for (unsigned i = 0; i < d; ++i) pow3 *= 3;
  for (unsigned i = 0; i < d + 1; ++i) pow2 *= 2;
  return pow3 - pow2 + 1;
}

void write_trajectories_csv(const std::filesystem::path& path,
                            const std::vector<std::vector<StateId>>& trajs) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  for (const auto& traj : trajs) {
    for (std::size_t i = 0; i < traj.size(); ++i) {
      if (i) out << ',';
      out << traj[i];
    }
    out << '\n';
  }
}

std::vector<std::vector<StateId>> read_trajectories_csv(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<std::vector<StateId>> trajs;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<StateId> traj;
    std::stringstream row(line);
    std::string field;
    while (std::getline(row, field, ',')) {
      traj.push_back(std::stoull(field));
    }
    trajs.push_back(std::move(traj));
  }
  return trajs;
}

}  // namespace sarm
