#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "netlisna/graph.hpp"

namespace netlisna {

struct Event {
  double x = 0.0;
  double y = 0.0;
  Replicate replicate = 0;
  std::optional<std::string> mark;

  friend bool operator==(const Event&, const Event&) = default;
};

struct SnapRecord {
  std::size_t event_index = 0;
  std::optional<EdgeId> edge;  // nearest edge, even when rejected by the cutoff
  double distance = 0.0;
  bool accepted = false;
  double snapped_x = 0.0;  // projection onto the nearest edge
  double snapped_y = 0.0;
};

/// Per-replicate edge counts over one network. Replicate ids are kept sorted
/// and need not be contiguous.
class SnappedPattern {
 public:
  /// `counts[r][i]` is the count of replicate `replicates[r]` on the edge at
  /// index `i` of `net`. Throws ContractError on shape mismatch, duplicate
  /// replicate ids or negative counts.
  SnappedPattern(SpatialNetwork net, std::vector<Replicate> replicates,
                 std::vector<std::vector<std::int64_t>> counts, std::vector<SnapRecord> report = {});

  /// A pattern with no events for the given replicates (default: {0}).
  static SnappedPattern empty(SpatialNetwork net, std::vector<Replicate> replicates = {0});

  const SpatialNetwork& network() const { return net_; }
  const std::vector<Replicate>& replicates() const { return replicates_; }
  std::size_t replicate_count() const { return replicates_.size(); }
  /// Position of a replicate id; throws LookupError if absent.
  std::size_t replicate_position(Replicate r) const;

  std::int64_t count_at(std::size_t replicate_pos, std::size_t edge_index) const {
    return counts_[replicate_pos][edge_index];
  }
  std::span<const std::int64_t> counts(std::size_t replicate_pos) const { return counts_.at(replicate_pos); }

  std::int64_t total() const { return total_; }
  std::int64_t total(Replicate r) const;
  const std::vector<SnapRecord>& snap_report() const { return report_; }

  /// Count of edge `edge_index` averaged over replicates, or for one replicate.
  double mean_count(std::size_t edge_index, std::optional<Replicate> r = std::nullopt) const;

 private:
  SpatialNetwork net_;
  std::vector<Replicate> replicates_;
  std::vector<std::vector<std::int64_t>> counts_;
  std::vector<SnapRecord> report_;
  std::int64_t total_ = 0;
};

/// Euclidean distance from (x, y) to the segment of `e`, with the clamped
/// projection parameter t in [0, 1] measured from the tail.
struct SegmentProjection {
  double distance = 0.0;
  double t = 0.0;
  double x = 0.0;
  double y = 0.0;
};
SegmentProjection project_onto_edge(const SpatialNetwork& net, const EdgeInterval& e, double x, double y);

/// Assigns every event to the edge minimizing point-to-segment distance,
/// ties going to the smaller edge id. A positive `max_snap_distance` rejects
/// events farther than it from every edge; 0 disables the cutoff.
/// Replicates are the distinct replicate ids of the input ({0} if empty).
/// Throws ContractError for an empty network or negative cutoff.
SnappedPattern snap(const SpatialNetwork& net, std::span<const Event> events, double max_snap_distance = 0.0);

struct CountLength {
  std::int64_t count = 0;
  double length = 0.0;
};

enum class PathVariant : std::uint8_t { full, minus_terminal, minus_origin };

std::int64_t count_edge(const SnappedPattern& p, EdgeId e, Replicate r = 0);

/// Count and total length over the selected incident edge set of `v`.
CountLength count_incident(const SnappedPattern& p, VertexId v, IncidentSelector sel, Replicate r = 0);

/// Count and total length over a path's edges. The minus_* variants drop the
/// final (ancestors of the terminus) or first (descendants of the origin) edge.
CountLength count_path(const SnappedPattern& p, const Path& path, PathVariant variant = PathVariant::full,
                       Replicate r = 0);

/// Edge set selected by a path variant, in path order. Throws ContractError
/// for an invalid path.
std::vector<EdgeId> path_edge_set(const SpatialNetwork& net, const Path& path, PathVariant variant);

}  // namespace netlisna
