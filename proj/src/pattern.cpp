#include "netlisna/pattern.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

#include "netlisna/errors.hpp"
#include "netlisna/parallel.hpp"

namespace netlisna {

SnappedPattern::SnappedPattern(SpatialNetwork net, std::vector<Replicate> replicates,
                               std::vector<std::vector<std::int64_t>> counts, std::vector<SnapRecord> report)
    : net_(std::move(net)), report_(std::move(report)) {
  if (replicates.empty()) throw ContractError("a pattern needs at least one replicate");
  if (counts.size() != replicates.size()) throw ContractError("one count row per replicate required");
  std::vector<std::size_t> order(replicates.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return replicates[a] < replicates[b]; });
  for (std::size_t k = 0; k < order.size(); ++k) {
    const auto& row = counts[order[k]];
    if (row.size() != net_.edge_count()) throw ContractError("count row length must equal edge count");
    if (k > 0 && replicates[order[k]] == replicates_.back()) throw ContractError("duplicate replicate id");
    for (auto c : row) {
      if (c < 0) throw ContractError("counts must be nonnegative");
      total_ += c;
    }
    replicates_.push_back(replicates[order[k]]);
    counts_.push_back(row);
  }
}

SnappedPattern SnappedPattern::empty(SpatialNetwork net, std::vector<Replicate> replicates) {
  std::vector<std::vector<std::int64_t>> counts(replicates.size(),
                                                std::vector<std::int64_t>(net.edge_count(), 0));
  return SnappedPattern(std::move(net), std::move(replicates), std::move(counts));
}

std::size_t SnappedPattern::replicate_position(Replicate r) const {
  auto it = std::lower_bound(replicates_.begin(), replicates_.end(), r);
  if (it == replicates_.end() || *it != r) {
    std::ostringstream msg;
    msg << "unknown replicate " << r;
    throw LookupError(msg.str());
  }
  return static_cast<std::size_t>(it - replicates_.begin());
}

std::int64_t SnappedPattern::total(Replicate r) const {
  const auto& row = counts_[replicate_position(r)];
  return std::accumulate(row.begin(), row.end(), std::int64_t{0});
}

double SnappedPattern::mean_count(std::size_t edge_index, std::optional<Replicate> r) const {
  if (r) return static_cast<double>(counts_[replicate_position(*r)].at(edge_index));
  double s = 0.0;
  for (const auto& row : counts_) s += static_cast<double>(row.at(edge_index));
  return s / static_cast<double>(counts_.size());
}

SegmentProjection project_onto_edge(const SpatialNetwork& net, const EdgeInterval& e, double x, double y) {
  const auto& a = net.vertex(e.tail);
  const auto& b = net.vertex(e.head);
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  double t = 0.0;
  if (len2 > 0.0) t = std::clamp(((x - a.x) * dx + (y - a.y) * dy) / len2, 0.0, 1.0);
  SegmentProjection p;
  p.t = t;
  // Exact endpoints when clamped so that vertex snaps reproduce bit-for-bit.
  p.x = t == 0.0 ? a.x : (t == 1.0 ? b.x : a.x + t * dx);
  p.y = t == 0.0 ? a.y : (t == 1.0 ? b.y : a.y + t * dy);
  p.distance = std::hypot(x - p.x, y - p.y);
  return p;
}

namespace {

// Uniform bucket grid over segment bounding boxes.
class SegmentGrid {
 public:
  explicit SegmentGrid(const SpatialNetwork& net) : net_(net) {
    double max_x = -std::numeric_limits<double>::infinity();
    double max_y = max_x;
    min_x_ = std::numeric_limits<double>::infinity();
    min_y_ = min_x_;
    for (const auto& v : net.vertices()) {
      min_x_ = std::min(min_x_, v.x);
      min_y_ = std::min(min_y_, v.y);
      max_x = std::max(max_x, v.x);
      max_y = std::max(max_y, v.y);
    }
    const double extent = std::max({max_x - min_x_, max_y - min_y_, 1e-9});
    const double per_side = std::clamp(std::sqrt(static_cast<double>(net.edge_count())), 1.0, 1024.0);
    cell_ = extent / per_side;
    nx_ = static_cast<std::size_t>((max_x - min_x_) / cell_) + 1;
    ny_ = static_cast<std::size_t>((max_y - min_y_) / cell_) + 1;
    cells_.resize(nx_ * ny_);
    const auto edges = net.edges();
    for (std::size_t ei = 0; ei < edges.size(); ++ei) {
      const auto& a = net.vertex(edges[ei].tail);
      const auto& b = net.vertex(edges[ei].head);
      const auto x0 = cell_x(std::min(a.x, b.x));
      const auto x1 = cell_x(std::max(a.x, b.x));
      const auto y0 = cell_y(std::min(a.y, b.y));
      const auto y1 = cell_y(std::max(a.y, b.y));
      for (auto cy = y0; cy <= y1; ++cy) {
        for (auto cx = x0; cx <= x1; ++cx) cells_[cy * nx_ + cx].push_back(ei);
      }
    }
  }

  struct Hit {
    std::size_t edge_index = 0;
    SegmentProjection proj;
  };

  Hit nearest(double x, double y) const {
    const double qx = std::clamp(x, min_x_, min_x_ + static_cast<double>(nx_) * cell_);
    const double qy = std::clamp(y, min_y_, min_y_ + static_cast<double>(ny_) * cell_);
    const double outside = std::hypot(x - qx, y - qy);
    const auto cx = static_cast<std::ptrdiff_t>(cell_x(qx));
    const auto cy = static_cast<std::ptrdiff_t>(cell_y(qy));
    const auto max_ring = static_cast<std::ptrdiff_t>(std::max(nx_, ny_));
    const auto edges = net_.edges();

    bool found = false;
    Hit best;
    auto consider = [&](std::size_t ei) {
      const auto proj = project_onto_edge(net_, edges[ei], x, y);
      const bool better = !found || proj.distance < best.proj.distance ||
                          (proj.distance == best.proj.distance && edges[ei].id < edges[best.edge_index].id);
      if (better) {
        best = {ei, proj};
        found = true;
      }
    };
    for (std::ptrdiff_t ring = 0; ring <= max_ring; ++ring) {
      for (std::ptrdiff_t gy = cy - ring; gy <= cy + ring; ++gy) {
        if (gy < 0 || gy >= static_cast<std::ptrdiff_t>(ny_)) continue;
        const bool edge_row = gy == cy - ring || gy == cy + ring;
        for (std::ptrdiff_t gx = cx - ring; gx <= cx + ring; ++gx) {
          if (gx < 0 || gx >= static_cast<std::ptrdiff_t>(nx_)) continue;
          if (!edge_row && gx != cx - ring && gx != cx + ring) continue;
          for (std::size_t ei : cells_[static_cast<std::size_t>(gy) * nx_ + static_cast<std::size_t>(gx)]) {
            consider(ei);
          }
        }
      }
      // Anything in later rings lies at least this far away.
      const double bound = static_cast<double>(ring) * cell_ - outside;
      if (found && bound > best.proj.distance) break;
    }
    return best;
  }

 private:
  std::size_t cell_x(double x) const {
    return std::min(nx_ - 1, static_cast<std::size_t>(std::max(0.0, (x - min_x_) / cell_)));
  }
  std::size_t cell_y(double y) const {
    return std::min(ny_ - 1, static_cast<std::size_t>(std::max(0.0, (y - min_y_) / cell_)));
  }

  const SpatialNetwork& net_;
  double min_x_ = 0.0;
  double min_y_ = 0.0;
  double cell_ = 1.0;
  std::size_t nx_ = 1;
  std::size_t ny_ = 1;
  std::vector<std::vector<std::size_t>> cells_;
};

}  // namespace

SnappedPattern snap(const SpatialNetwork& net, std::span<const Event> events, double max_snap_distance) {
  if (net.edge_count() == 0) throw ContractError("cannot snap onto a network without edges");
  if (!(max_snap_distance >= 0.0)) throw ContractError("max_snap_distance must be >= 0");

  std::set<Replicate> replicate_set;
  for (std::size_t i = 0; i < events.size(); ++i) {
    if (!std::isfinite(events[i].x) || !std::isfinite(events[i].y)) {
      std::ostringstream msg;
      msg << "event " << i << ": coordinates must be finite";
      throw InputError(msg.str());
    }
    replicate_set.insert(events[i].replicate);
  }
  if (replicate_set.empty()) replicate_set.insert(0);
  std::vector<Replicate> replicates(replicate_set.begin(), replicate_set.end());

  const SegmentGrid grid(net);
  std::vector<SnapRecord> report(events.size());
  detail::parallel_for(events.size(), [&](std::size_t i) {
    const auto hit = grid.nearest(events[i].x, events[i].y);
    auto& rec = report[i];
    rec.event_index = i;
    rec.edge = net.edges()[hit.edge_index].id;
    rec.distance = hit.proj.distance;
    rec.snapped_x = hit.proj.x;
    rec.snapped_y = hit.proj.y;
    rec.accepted = max_snap_distance == 0.0 || hit.proj.distance <= max_snap_distance;
  }, 256);

  std::vector<std::vector<std::int64_t>> counts(replicates.size(),
                                                std::vector<std::int64_t>(net.edge_count(), 0));
  for (std::size_t i = 0; i < events.size(); ++i) {
    if (!report[i].accepted) continue;
    const auto r = static_cast<std::size_t>(
        std::lower_bound(replicates.begin(), replicates.end(), events[i].replicate) - replicates.begin());
    ++counts[r][net.edge_index(*report[i].edge)];
  }
  return SnappedPattern(net, std::move(replicates), std::move(counts), std::move(report));
}

std::int64_t count_edge(const SnappedPattern& p, EdgeId e, Replicate r) {
  return p.count_at(p.replicate_position(r), p.network().edge_index(e));
}

namespace {

CountLength sum_edges(const SnappedPattern& p, std::span<const EdgeId> edges, Replicate r) {
  const std::size_t rp = p.replicate_position(r);
  CountLength out;
  for (EdgeId e : edges) {
    const std::size_t ei = p.network().edge_index(e);
    out.count += p.count_at(rp, ei);
    out.length += p.network().edges()[ei].length;
  }
  return out;
}

}  // namespace

CountLength count_incident(const SnappedPattern& p, VertexId v, IncidentSelector sel, Replicate r) {
  return sum_edges(p, incident_edges(p.network(), v, sel), r);
}

std::vector<EdgeId> path_edge_set(const SpatialNetwork& net, const Path& path, PathVariant variant) {
  validate_path(net, path);
  switch (variant) {
    case PathVariant::full:
      return path.edges;
    case PathVariant::minus_terminal:
      return {path.edges.begin(), path.edges.end() - 1};
    case PathVariant::minus_origin:
      return {path.edges.begin() + 1, path.edges.end()};
  }
  return {};
}

CountLength count_path(const SnappedPattern& p, const Path& path, PathVariant variant, Replicate r) {
  return sum_edges(p, path_edge_set(p.network(), path, variant), r);
}

}  // namespace netlisna
