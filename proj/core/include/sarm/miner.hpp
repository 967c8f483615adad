#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <unordered_map>
#include <vector>

#include "sarm/codec.hpp"

namespace sarm {

// One trajectory's distinct visited states plus the timestep of each
// state's first visit.
struct Transaction {
  std::vector<StateId> items;  // sorted ascending
  std::unordered_map<StateId, int> first_occurrence;
  int source_id = 0;

  bool contains(StateId item) const {
    return first_occurrence.count(item) != 0;
  }
  bool contains_all(const std::vector<StateId>& set) const;
};

/// Deduplicates each trajectory into a transaction keeping first-visit
/// timesteps; empty trajectories are skipped (counted in *skipped).
std::vector<Transaction> trajectories_to_transactions(
    const std::vector<std::vector<StateId>>& trajectories,
    std::size_t* skipped = nullptr);

struct FrequentItemset {
  std::vector<StateId> items;  // sorted ascending
  std::uint32_t count = 0;     // supporting transactions
  double support = 0.0;        // count / N
};

// Prefix-tree compression of the transactions, items ordered by descending
// support (ties by ascending id). Header chains link equal items.
class FPTree {
 public:
  struct Node {
    StateId item = 0;
    std::uint32_t count = 0;
    Node* parent = nullptr;
    std::vector<std::unique_ptr<Node>> children;
    Node* next_same_item = nullptr;
  };

  using WeightedItems = std::pair<std::vector<StateId>, std::uint32_t>;

  FPTree(const std::vector<Transaction>& transactions, std::uint32_t min_count);
  FPTree(const std::vector<WeightedItems>& weighted, std::uint32_t min_count);

  const Node* root() const { return root_.get(); }
  bool empty() const { return root_->children.empty(); }
  /// Frequent items, descending support (ties ascending id).
  const std::vector<StateId>& item_order() const { return order_; }
  std::uint32_t item_support(StateId item) const;
  const Node* header(StateId item) const;
  /// True when the tree is one single path from the root.
  bool single_path() const;

 private:
  void build(const std::vector<WeightedItems>& weighted,
             std::uint32_t min_count);
  void insert(const std::vector<StateId>& items, std::uint32_t weight);

  std::unique_ptr<Node> root_;
  std::vector<StateId> order_;
  std::unordered_map<StateId, std::uint32_t> supports_;
  std::unordered_map<StateId, Node*> headers_;
  std::unordered_map<StateId, Node*> tails_;
};

/// Exactly the itemsets with support >= minsup (inclusive), mined with
/// FP-growth. Output is deterministic: itemsets sorted by (size, items).
std::vector<FrequentItemset> fp_growth(
    const std::vector<Transaction>& transactions, double minsup);

// Ordered premise subgoal sequence -> single consequent subgoal.
struct SequentialRule {
  std::vector<StateId> premise;  // in first-occurrence order
  StateId consequent = 0;
  double support = 0.0;
  double confidence = 0.0;
  std::uint32_t order_frequency = 0;

  std::vector<StateId> sequence() const;  // premise then consequent
};

/// Rules from the maximal frequent itemsets only, single-item consequent,
/// confidence >= minconf, one rule per observed first-occurrence ordering.
std::vector<SequentialRule> generate_rules(
    const std::vector<FrequentItemset>& frequents,
    const std::vector<Transaction>& transactions, double minconf);

/// Number of candidate association rules over d items with unconstrained
/// disjoint premise/consequent: 3^d - 2^(d+1) + 1.
std::uint64_t candidate_rule_count(unsigned d);

// Transactions CSV: one line per trajectory, comma-separated state ids in
// visit order.
void write_trajectories_csv(const std::filesystem::path& path,
                            const std::vector<std::vector<StateId>>& trajs);
std::vector<std::vector<StateId>> read_trajectories_csv(
    const std::filesystem::path& path);

}  // namespace sarm
