#pragma once

#include <cstdint>
#include <unordered_map>
#include <variant>
#include <vector>

#include "netlisna/graph.hpp"
#include "netlisna/pattern.hpp"

namespace netlisna {

struct HomogeneousPoisson {
  double rate = 1.0;  // events per unit length
};

/// Per-edge rates; edges without an entry get rate 0.
struct InhomogeneousPoisson {
  std::unordered_map<EdgeId, double> rates;
};

/// Every edge rate of a replicate is scaled by one shared factor
/// exp(sd * Z - sd^2 / 2), Z standard normal, so the factor has mean 1.
struct DoublyStochastic {
  double base_rate = 1.0;
  double log_sd = 0.5;
};

struct SimSpec {
  std::variant<HomogeneousPoisson, InhomogeneousPoisson, DoublyStochastic> model = HomogeneousPoisson{};
  std::size_t replicates = 1;
  std::uint64_t seed = 0;
};

struct Simulation {
  SnappedPattern pattern;     // exact per-edge counts, replicates 0..R-1
  std::vector<Event> events;  // uniform positions along each edge, replicate-major
};

/// Per replicate r and edge e: N ~ Poisson(rate_e(r) * length(e)), placed
/// uniformly along the segment. Replicate r draws from the stream seeded by
/// (seed, r). Throws ContractError for negative rates, unknown edges or R < 1.
Simulation simulate(const SpatialNetwork& net, const SimSpec& spec);

}  // namespace netlisna
