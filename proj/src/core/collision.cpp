#include <algorithm>
#include <numeric>

#include "leolora/errors.hpp"
#include "leolora/sim_engine.hpp"

namespace leolora::sim {

namespace {

bool same_domain(const Attempt& a, const Attempt& b) {
  return a.receiver == b.receiver && a.channel == b.channel && a.spreading_factor == b.spreading_factor;
}

}  // namespace

std::vector<bool> resolve_collisions(std::span<const Attempt> attempts) {
  std::vector<std::size_t> order(attempts.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return attempts[a].start < attempts[b].start;
  });
  CollisionDomain domain;
  std::vector<std::uint64_t> ids(attempts.size());
  for (std::size_t i : order) ids[i] = domain.add(attempts[i]);
  std::vector<bool> ok(attempts.size());
  for (std::size_t i = 0; i < attempts.size(); ++i) ok[i] = !domain.collided(ids[i]);
  return ok;
}

std::uint64_t CollisionDomain::add(const Attempt& a) {
  if (!live_.empty() && a.start < live_.back().attempt.start) {
    throw ContractError("CollisionDomain: attempts must be added in start order");
  }
  const std::uint64_t id = collided_.size();
  collided_.push_back(0);
  for (const auto& e : live_) {
    if (same_domain(e.attempt, a) && e.attempt.start + e.attempt.airtime > a.start) {
      collided_[e.id] = 1;
      collided_[id] = 1;
    }
  }
  live_.push_back({a, id});
  return id;
}

bool CollisionDomain::collided(std::uint64_t id) const {
  if (id >= collided_.size()) throw ContractError("CollisionDomain: unknown attempt id");
  return collided_[id] != 0;
}

void CollisionDomain::prune(double t) {
  std::erase_if(live_, [t](const Entry& e) { return e.attempt.start + e.attempt.airtime <= t; });
}

}  // namespace leolora::sim
