#include "sarm/taxi.hpp"

#include <map>
#include <stdexcept>

namespace sarm {

namespace {

DomainSpec make_spec(int size) {
  return DomainSpec({static_cast<std::uint64_t>(size) * size, 5, 4});
}

}  // namespace

Taxi::Taxi(int pickup, int destination, double slip, int scale)
    : size_(5 * scale),
      scale_(scale),
      pickup_(pickup),
      dest_(destination),
      slip_(slip),
      spec_(make_spec(5 * scale)) {
  if (scale < 1) throw std::invalid_argument("Taxi: scale must be >= 1");
  if (pickup < 0 || pickup > 3 || destination < 0 || destination > 3) {
    throw std::invalid_argument("Taxi: landmark index outside 0..3");
  }
  if (slip_ < 0.0 || slip_ > 1.0) {
    throw std::invalid_argument("Taxi: slip outside [0,1]");
  }
  // 5x5 layout: R(0,0) G(4,0) Y(0,4) B(3,4), scaled uniformly.
  const Cell base[4] = {{0, 0}, {4, 0}, {0, 4}, {3, 4}};
  for (int i = 0; i < 4; ++i) {
    landmarks_[i] = {base[i].x * scale, base[i].y * scale};
  }
  // Vertical wall segments of the 5x5 layout (west-side cell, row).
  const Cell vw[6] = {{1, 0}, {1, 1}, {0, 3}, {0, 4}, {2, 3}, {2, 4}};
  for (const Cell& w : vw) {
    for (int dy = 0; dy < scale; ++dy) {
      vwalls_.push_back({w.x * scale + scale - 1, w.y * scale + dy});
    }
  }
}

StateId Taxi::state_count() const { return spec_.state_count(); }

StateId Taxi::max_state_id() const { return spec_.max_id(); }

StateId Taxi::encode_state(const State& st) const {
  const std::uint64_t cell =
      static_cast<std::uint64_t>(st.taxi.y) * size_ + st.taxi.x + 1;
  return encode(spec_, {cell, static_cast<std::uint64_t>(st.passenger) + 1,
                        static_cast<std::uint64_t>(st.destination) + 1});
}

Taxi::State Taxi::decode_state(StateId s) const {
  const FactoredState d = decode(spec_, s);
  State st;
  st.taxi = {static_cast<int>((d[0] - 1) % size_),
             static_cast<int>((d[0] - 1) / size_)};
  st.passenger = static_cast<int>(d[1]) - 1;
  st.destination = static_cast<int>(d[2]) - 1;
  return st;
}

bool Taxi::blocked(Cell c, Action dir) const {
  if (dir == kEast) {
    for (const Cell& w : vwalls_)
      if (w == c) return true;
  } else if (dir == kWest) {
    for (const Cell& w : vwalls_)
      if (w.x == c.x - 1 && w.y == c.y) return true;
  }
  return false;
}

Cell Taxi::move_target(Cell c, Action dir) const {
  Cell t = c;
  switch (dir) {
    case kNorth: t.y -= 1; break;
    case kSouth: t.y += 1; break;
    case kEast: t.x += 1; break;
    case kWest: t.x -= 1; break;
    default: throw std::invalid_argument("Taxi: bad movement action");
  }
  if (t.x < 0 || t.x >= size_ || t.y < 0 || t.y >= size_) return c;
  if (blocked(c, dir)) return c;
  return t;
}

std::vector<std::pair<StateId, double>> Taxi::transition_distribution(
    StateId s, Action a) const {
  if (a < 0 || a >= action_count()) {
    throw std::invalid_argument("Taxi: invalid action id " + std::to_string(a));
  }
  State st = decode_state(s);
  if (a == kPickUp) {
    if (st.passenger != kInTaxi && st.taxi == landmarks_[st.passenger]) {
      st.passenger = kInTaxi;
    }
    return {{encode_state(st), 1.0}};
  }
  if (a == kPutDown) {
    if (st.passenger == kInTaxi && st.taxi == landmarks_[st.destination]) {
      st.passenger = st.destination;
    }
    return {{encode_state(st), 1.0}};
  }
  std::map<StateId, double> acc;
  for (Action dir = 0; dir < 4; ++dir) {
    const double p = (dir == a ? 1.0 - slip_ : 0.0) + slip_ / 4.0;
    if (p <= 0.0) continue;
    State n = st;
    n.taxi = move_target(st.taxi, dir);
    acc[encode_state(n)] += p;
  }
  return {acc.begin(), acc.end()};
}

double Taxi::reward(StateId s, Action a, StateId next) const {
  const State st = decode_state(s);
  if (a == kPickUp) {
    const bool ok = st.passenger != kInTaxi && st.taxi == landmarks_[st.passenger];
    return ok ? -1.0 : -10.0;
  }
  if (a == kPutDown) {
    return terminal(s, a, next) ? 20.0 : -10.0;
  }
  return -1.0;
}

bool Taxi::terminal(StateId s, Action a, StateId /*next*/) const {
  if (a != kPutDown) return false;
  const State st = decode_state(s);
  return st.passenger == kInTaxi && st.taxi == landmarks_[st.destination];
}

StateId Taxi::initial_state(Rng& rng) const {
  std::uniform_int_distribution<int> cell(0, size_ * size_ - 1);
  const int c = cell(rng);
  State st;
  st.taxi = {c % size_, c / size_};
  st.passenger = pickup_;
  st.destination = dest_;
  return encode_state(st);
}

}  // namespace sarm
