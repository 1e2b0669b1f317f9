#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "netlisna/graph.hpp"
#include "netlisna/pattern.hpp"

namespace netlisna {

// All estimators are plug-in count/length ratios. The replicate argument
// selects one replicate; nullopt averages over every replicate of the pattern.
using ReplicateSel = std::optional<Replicate>;

enum class EdgeRole : std::uint8_t { any, in, out };

/// Optional role check for an edge relative to a vertex: `in` requires an arc
/// with head `vertex`, `out` an arc with tail `vertex`.
struct EdgeFilter {
  EdgeRole role = EdgeRole::any;
  VertexId vertex{};

  static EdgeFilter any() { return {}; }
  static EdgeFilter in(VertexId v) { return {EdgeRole::in, v}; }
  static EdgeFilter out(VertexId v) { return {EdgeRole::out, v}; }
};

/// Throws ContractError when `e` does not play the filtered role.
void check_edge_role(const SpatialNetwork& net, const EdgeInterval& e, EdgeFilter filter);

/// N(e) / length(e).
double edge_intensity(const SnappedPattern& p, EdgeId e, EdgeFilter filter = {}, ReplicateSel r = {});

/// Average of edge intensities over the selected incident edges, divided by
/// the matching degree. `sel` must be neighborhood, parents or children.
/// Throws UndefinedValueError when the selected set is empty.
double node_mean_intensity(const SnappedPattern& p, VertexId v, IncidentSelector sel, ReplicateSel r = {});

/// Total count over total length of the selected incident edge set. Any
/// selector combination is accepted. Throws UndefinedValueError when empty.
double pooled_set_intensity(const SnappedPattern& p, VertexId v, IncidentSelector sel, ReplicateSel r = {});

/// Mean edge intensity over all incident edges of any orientation, divided by
/// the mixed-graph degree. Throws UndefinedValueError for isolated vertices.
double cg_node_intensity(const SnappedPattern& p, VertexId v, ReplicateSel r = {});

enum class PathIntensity : std::uint8_t { mean, pooled, ancestors, descendants };

/// mean: average per-edge intensity along the path; pooled: total count over
/// total length; ancestors / descendants: pooled over the path minus its
/// final / first edge (direction-preserving paths only).
double path_intensity(const SnappedPattern& p, const Path& path, PathIntensity variant = PathIntensity::pooled,
                      ReplicateSel r = {});

/// Pooled intensity over an arbitrary nonempty edge set.
double edge_set_intensity(const SnappedPattern& p, std::span<const EdgeId> edges, ReplicateSel r = {});

enum class IntensityLevel : std::uint8_t {
  edge,
  node_mean,
  parent_mean,
  children_mean,
  neighborhood,
  parents,
  children,
  family,
  cg_node,
  path_mean,
  path_pooled,
  ancestors,
  descendants,
};

std::string_view to_string(IntensityLevel level);
/// Throws ContractError for an unknown name.
IntensityLevel parse_intensity_level(std::string_view name);
bool is_node_level(IntensityLevel level);
bool is_path_level(IntensityLevel level);

struct FieldOptions {
  ReplicateSel replicate;
  std::vector<Path> paths;  // path levels: one value per path, keyed by position
};

/// One intensity per entity: edge ids, vertex ids, or path positions. Node
/// levels omit vertices whose selected edge set is empty.
struct IntensityField {
  IntensityLevel level = IntensityLevel::edge;
  ReplicateSel replicate;
  std::vector<std::int64_t> entity_ids;
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
};

IntensityField field(const SnappedPattern& p, IntensityLevel level, const FieldOptions& options = {});

}  // namespace netlisna
