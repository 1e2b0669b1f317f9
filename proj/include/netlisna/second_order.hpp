#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "netlisna/graph.hpp"
#include "netlisna/intensity.hpp"
#include "netlisna/pattern.hpp"

namespace netlisna {

struct EdgeEntity {
  EdgeId edge;
  EdgeFilter filter;
};

struct NodeSetEntity {
  VertexId vertex;
  IncidentSelector selector;
};

struct PathEntity {
  Path path;
  PathVariant variant = PathVariant::full;
};

/// A network entity resolved to the edge set its counting measure covers.
struct EntityRef {
  std::variant<EdgeEntity, NodeSetEntity, PathEntity> kind;
  std::string label;
  std::vector<EdgeId> edges;  // sorted ascending, nonempty
  double total_length = 0.0;
};

EntityRef edge_entity(const SpatialNetwork& net, EdgeId e, EdgeFilter filter = {});
/// Throws UndefinedValueError when the selected incident set is empty.
EntityRef node_set_entity(const SpatialNetwork& net, VertexId v, IncidentSelector sel);
/// minus_terminal gives the ancestors of the terminus, minus_origin the
/// descendants of the origin; both need a direction-preserving path with at
/// least two edges.
EntityRef path_entity(const SpatialNetwork& net, Path path, PathVariant variant = PathVariant::full);

/// Parses a textual entity spec:
///   edge 5 | edge 5 in v3 | edge 5 out v3
///   nach(v2) | pa(v2) | ch(v2) | fam(v2) | all(v2) | nach+ch(v2)
///   path v1..v7 | path v1,v4,v7 | dpath v1..v7 | dpath v1,v2,v3
///   anch(dpath v1..v7) | dech(dpath v1..v7)
/// `v` prefixes are optional. `..` picks the shortest path (undirected
/// traversal for `path`, direction-preserving for `dpath`). Throws
/// ContractError on syntax errors, LookupError on unknown ids and
/// UndefinedValueError on empty edge sets.
EntityRef resolve(const SpatialNetwork& net, std::string_view spec);

struct SecondOrderResult {
  double lambda2 = 0.0;
  double gamma = 0.0;
  std::vector<std::pair<double, double>> per_replicate;  // (N_r(a)/l(a), N_r(b)/l(b))
  std::size_t n_replicates = 0;
  bool degenerate = false;  // single replicate: gamma forced to 0
};

/// Replicate-based second-order intensity and covariance density for a pair
/// of entities with disjoint edge sets:
///   lambda2 = mean_r N_r(a) N_r(b) / (l(a) l(b))
///   gamma   = mean_r (N_r(a)/l(a) - mean_a)(N_r(b)/l(b) - mean_b)
/// Throws ContractError when the edge sets overlap.
SecondOrderResult second_order(const SnappedPattern& p, const EntityRef& a, const EntityRef& b);

struct LagSecondOrderResult {
  int lag = 0;
  double lambda2 = 0.0;
  double gamma = 0.0;
  std::size_t pair_count = 0;  // ordered edge pairs at this lag
  std::size_t n_replicates = 0;
};

/// Edge lag: minimum hop distance from an endpoint of the first edge to an
/// endpoint of the second.
std::vector<std::vector<int>> edge_lags(const SpatialNetwork& net, Traversal mode);

/// Pseudostationary estimate pooling all ordered edge pairs at lag k:
///   lambda2(k) = mean over pairs and replicates of N(e) N(e') / (l l')
///   gamma(k)   = lambda2(k) - (mean edge intensity)^2
/// Throws ContractError for k < 1 and UndefinedValueError when no pair exists.
LagSecondOrderResult lag_second_order(const SnappedPattern& p, int k, Traversal mode = Traversal::undirected);

}  // namespace netlisna
