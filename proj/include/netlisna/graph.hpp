#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "netlisna/types.hpp"

namespace netlisna {

struct Vertex {
  VertexId id;
  double x = 0.0;
  double y = 0.0;
};

/// Edge as supplied by a caller. An absent length is replaced by the
/// Euclidean distance between the endpoints.
struct EdgeSpec {
  EdgeId id;
  VertexId tail;
  VertexId head;
  Orientation orientation = Orientation::undirected;
  std::optional<double> length;
};

struct EdgeInterval {
  EdgeId id;
  VertexId tail;
  VertexId head;
  Orientation orientation = Orientation::undirected;
  double length = 0.0;

  bool directed() const { return orientation == Orientation::directed; }
};

/// Bit set over the three classes of edges incident to a vertex.
struct IncidentSelector {
  enum Bits : std::uint8_t { kUndirected = 1, kIn = 2, kOut = 4 };
  std::uint8_t mask = kUndirected;

  static constexpr IncidentSelector neighborhood() { return {kUndirected}; }
  static constexpr IncidentSelector parents() { return {kIn}; }
  static constexpr IncidentSelector children() { return {kOut}; }
  static constexpr IncidentSelector family() { return {kIn | kOut}; }
  static constexpr IncidentSelector all() { return {kUndirected | kIn | kOut}; }

  constexpr bool has(Bits b) const { return (mask & b) != 0; }
  friend constexpr bool operator==(IncidentSelector, IncidentSelector) = default;
};

/// Immutable geometric graph. Copies share the same underlying storage, so a
/// copy is cheap and `same_as` compares identity rather than content.
class SpatialNetwork {
 public:
  /// Validates and indexes the input. Throws InputError on duplicate ids,
  /// dangling endpoints, self-loops, repeated vertex pairs, nonpositive or
  /// non-finite lengths and coordinates.
  SpatialNetwork(std::vector<Vertex> vertices, std::vector<EdgeSpec> edges);

  std::span<const Vertex> vertices() const;
  std::span<const EdgeInterval> edges() const;
  std::size_t vertex_count() const;
  std::size_t edge_count() const;
  NetworkKind kind() const;

  bool has_vertex(VertexId v) const;
  bool has_edge(EdgeId e) const;

  // Index lookups throw LookupError for unknown ids.
  std::size_t vertex_index(VertexId v) const;
  std::size_t edge_index(EdgeId e) const;
  const Vertex& vertex(VertexId v) const;
  const EdgeInterval& edge(EdgeId e) const;

  /// Edge indices incident to the vertex at `vertex_index`, ascending by edge id.
  std::span<const std::size_t> incident(std::size_t vertex_index) const;

  /// Edge joining the unordered pair, if any.
  std::optional<EdgeId> edge_between(VertexId a, VertexId b) const;

  double total_length() const;
  bool same_as(const SpatialNetwork& other) const { return impl_ == other.impl_; }

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
};

std::string_view to_string(NetworkKind kind);

// Structural queries. Every vertex-taking function throws LookupError for an
// unknown id. Returned id sets are sorted ascending.

std::vector<VertexId> neighbors(const SpatialNetwork& net, VertexId v);
std::vector<VertexId> parents(const SpatialNetwork& net, VertexId v);
std::vector<VertexId> children(const SpatialNetwork& net, VertexId v);
std::vector<VertexId> family(const SpatialNetwork& net, VertexId v);

std::size_t degree(const SpatialNetwork& net, VertexId v);
std::size_t in_degree(const SpatialNetwork& net, VertexId v);
std::size_t out_degree(const SpatialNetwork& net, VertexId v);
/// Number of incident edges of any orientation.
std::size_t cg_degree(const SpatialNetwork& net, VertexId v);
double mean_cg_degree(const SpatialNetwork& net);

/// Incident edges of `v` in the selected classes, ascending by edge id.
std::vector<EdgeId> incident_edges(const SpatialNetwork& net, VertexId v, IncidentSelector sel);

/// Whether `e` may be walked starting from its endpoint `from`.
bool traversable_from(const EdgeInterval& e, VertexId from, Traversal mode);

/// Hop distances from one source vertex index to every vertex index, -1 for
/// unreachable. Search stops beyond `max_depth` hops when given.
std::vector<int> hop_distances_from(const SpatialNetwork& net, std::size_t source_index,
                                    Traversal mode, std::optional<int> max_depth = {});

/// Minimum edge count from u to v; nullopt when unreachable.
std::optional<int> hop_distance(const SpatialNetwork& net, VertexId u, VertexId v, Traversal mode);

enum class PathKind : std::uint8_t { undirected_traversal, direction_preserving };

struct Path {
  std::vector<VertexId> vertices;
  std::vector<EdgeId> edges;
  PathKind kind = PathKind::undirected_traversal;

  VertexId origin() const { return vertices.front(); }
  VertexId terminus() const { return vertices.back(); }
  std::size_t hops() const { return edges.size(); }
};

/// Builds a path through the given vertex sequence. The kind is
/// direction-preserving exactly when every edge is an arc walked tail to head.
/// Throws ContractError for repeated vertices or non-adjacent neighbours.
Path make_path(const SpatialNetwork& net, std::span<const VertexId> vertices);

/// Throws ContractError if the path violates any path invariant.
void validate_path(const SpatialNetwork& net, const Path& path);

/// A path realizing hop_distance(u, v, mode). Among equal-length paths the
/// lexicographically smallest vertex-id sequence wins. Throws NoPathError when
/// unreachable and ContractError when u == v.
Path shortest_path(const SpatialNetwork& net, VertexId u, VertexId v, Traversal mode);

/// Path edges minus the final edge. Requires a direction-preserving path.
std::vector<EdgeId> ancestors_edge_set(const SpatialNetwork& net, const Path& path);
/// Path edges minus the first edge. Requires a direction-preserving path.
std::vector<EdgeId> descendants_edge_set(const SpatialNetwork& net, const Path& path);

}  // namespace netlisna
