#include "netlisna/sim.hpp"

#include <cmath>
#include <random>

#include "netlisna/errors.hpp"
#include "netlisna/parallel.hpp"
#include "netlisna/random.hpp"

namespace netlisna {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_rate(double rate) {
  if (!std::isfinite(rate) || rate < 0.0) throw ContractError("rates must be finite and nonnegative");
}

}  // namespace

Simulation simulate(const SpatialNetwork& net, const SimSpec& spec) {
  if (spec.replicates < 1) throw ContractError("simulation needs at least one replicate");
  const auto edges = net.edges();

  std::vector<double> base(edges.size(), 0.0);
  double log_sd = 0.0;
  std::visit(Overloaded{
                 [&](const HomogeneousPoisson& m) {
                   require_rate(m.rate);
                   std::fill(base.begin(), base.end(), m.rate);
                 },
                 [&](const InhomogeneousPoisson& m) {
                   for (const auto& [e, rate] : m.rates) {
                     require_rate(rate);
                     if (!net.has_edge(e)) throw ContractError("rate given for an unknown edge");
                     base[net.edge_index(e)] = rate;
                   }
                 },
                 [&](const DoublyStochastic& m) {
                   require_rate(m.base_rate);
                   if (!std::isfinite(m.log_sd) || m.log_sd < 0.0) {
                     throw ContractError("log-normal factor sd must be nonnegative");
                   }
                   std::fill(base.begin(), base.end(), m.base_rate);
                   log_sd = m.log_sd;
                 },
             },
             spec.model);
  const bool shared_factor = std::holds_alternative<DoublyStochastic>(spec.model);

  std::vector<std::vector<std::int64_t>> counts(spec.replicates, std::vector<std::int64_t>(edges.size(), 0));
  std::vector<std::vector<Event>> per_replicate(spec.replicates);
  detail::parallel_for(spec.replicates, [&](std::size_t r) {
    auto rng = make_stream(spec.seed, r);
    double factor = 1.0;
    if (shared_factor) {
      std::normal_distribution<double> normal(0.0, 1.0);
      factor = std::exp(log_sd * normal(rng) - 0.5 * log_sd * log_sd);
    }
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::size_t ei = 0; ei < edges.size(); ++ei) {
      const double mean = base[ei] * factor * edges[ei].length;
      if (mean <= 0.0) continue;
      std::poisson_distribution<std::int64_t> poisson(mean);
      const std::int64_t n = poisson(rng);
      counts[r][ei] = n;
      const auto& a = net.vertex(edges[ei].tail);
      const auto& b = net.vertex(edges[ei].head);
      for (std::int64_t k = 0; k < n; ++k) {
        const double t = unit(rng);
        per_replicate[r].push_back({a.x + t * (b.x - a.x), a.y + t * (b.y - a.y), static_cast<Replicate>(r), {}});
      }
    }
  }, 1);

  std::vector<Replicate> ids(spec.replicates);
  for (std::size_t r = 0; r < spec.replicates; ++r) ids[r] = static_cast<Replicate>(r);
  Simulation out{SnappedPattern(net, std::move(ids), std::move(counts)), {}};
  for (auto& evs : per_replicate) {
    out.events.insert(out.events.end(), std::make_move_iterator(evs.begin()), std::make_move_iterator(evs.end()));
  }
  return out;
}

}  // namespace netlisna
