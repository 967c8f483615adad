#pragma once

#include <cstdint>
#include <vector>

namespace sarm {

/// Single-integer image of a factored state. Ids are 1-based.
using StateId = std::uint64_t;

/// Vector of 1-based value indices, one per state variable.
using FactoredState = std::vector<std::uint64_t>;

// Cardinalities of the discrete state variables of a factored MDP.
// The product of cardinalities must fit in a 64-bit unsigned integer.
class DomainSpec {
 public:
  explicit DomainSpec(std::vector<std::uint64_t> cardinalities);

  std::size_t variable_count() const { return cards_.size(); }
  std::uint64_t cardinality(std::size_t i) const { return cards_.at(i); }
  const std::vector<std::uint64_t>& cardinalities() const { return cards_; }

  /// Product of all cardinalities: the number of distinct encoded states.
  std::uint64_t state_count() const { return total_; }

  /// Smallest / largest id in the image of encode().
  StateId min_id() const { return min_id_; }
  StateId max_id() const { return min_id_ + total_ - 1; }

 private:
  std::vector<std::uint64_t> cards_;
  std::uint64_t total_;
  StateId min_id_;
};

/// Mixed-radix map from a factored state to a single id:
///   L = R_1 + sum_{i>=2} R_i * prod_{j<i} card_j, digits 1-based.
/// Throws std::out_of_range naming the offending variable on bad digits.
StateId encode(const DomainSpec& spec, const FactoredState& x);

/// Exact inverse of encode(). Throws std::out_of_range if `id` is outside
/// the image of encode() for `spec`.
FactoredState decode(const DomainSpec& spec, StateId id);

}  // namespace sarm
