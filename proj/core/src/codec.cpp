#include "sarm/codec.hpp"

#include <limits>
#include <stdexcept>
#include <string>

namespace sarm {

DomainSpec::DomainSpec(std::vector<std::uint64_t> cardinalities)
    : cards_(std::move(cardinalities)) {
  if (cards_.empty()) {
    throw std::invalid_argument("DomainSpec: at least one variable required");
  }
  total_ = 1;
  for (std::size_t i = 0; i < cards_.size(); ++i) {
    if (cards_[i] == 0) {
      throw std::invalid_argument("DomainSpec: cardinality of variable " +
                                  std::to_string(i) + " must be >= 1");
    }
    if (total_ > std::numeric_limits<std::uint64_t>::max() / cards_[i]) {
      throw std::overflow_error("DomainSpec: state space exceeds 64-bit range");
    }
    total_ *= cards_[i];
  }
  // All digits at their minimum (1).
  std::uint64_t prefix = 1;
  min_id_ = 0;
  for (std::size_t i = 0; i < cards_.size(); ++i) {
    min_id_ += prefix;
    prefix *= cards_[i];
  }
}

StateId encode(const DomainSpec& spec, const FactoredState& x) {
  if (x.size() != spec.variable_count()) {
    throw std::invalid_argument("encode: digit count does not match spec");
  }
  StateId id = 0;
  std::uint64_t prefix = 1;  // empty product
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < 1 || x[i] > spec.cardinality(i)) {
      throw std::out_of_range("encode: variable " + std::to_string(i) +
                              " index " + std::to_string(x[i]) +
                              " outside [1, " +
                              std::to_string(spec.cardinality(i)) + "]");
    }
    id += x[i] * prefix;
    prefix *= spec.cardinality(i);
  }
  return id;
}

FactoredState decode(const DomainSpec& spec, StateId id) {
  if (id < spec.min_id() || id > spec.max_id()) {
    throw std::out_of_range("decode: id " + std::to_string(id) +
                            " outside the image of encode");
  }
  const std::size_t n = spec.variable_count();
  std::vector<std::uint64_t> prefix(n, 1);
  for (std::size_t i = 1; i < n; ++i) {
    prefix[i] = prefix[i - 1] * spec.cardinality(i - 1);
  }
  // Minimum value the digits below position i can contribute (all at 1).
  std::vector<std::uint64_t> min_below(n, 0);
  for (std::size_t i = 1; i < n; ++i) {
    min_below[i] = min_below[i - 1] + prefix[i - 1];
  }
  FactoredState digits(n);
  std::uint64_t rest = id;
  // Division loop runs from the most significant digit down to the second
  // one; with 1-based digits the remainder must stay large enough to cover
  // the lower digits' minimum, otherwise the quotient borrows one step.
  for (std::size_t i = n; i-- > 1;) {
    std::uint64_t r = rest / prefix[i];
    rest = rest % prefix[i];
    while (rest < min_below[i] && r > 0) {
      r -= 1;
      rest += prefix[i];
    }
    digits[i] = r;
  }
  digits[0] = rest;
  for (std::size_t i = 0; i < n; ++i) {
    if (digits[i] < 1 || digits[i] > spec.cardinality(i)) {
      throw std::out_of_range("decode: id " + std::to_string(id) +
                              " outside the image of encode");
    }
  }
  return digits;
}

}  // namespace sarm
