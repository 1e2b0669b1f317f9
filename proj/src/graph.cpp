#include "netlisna/graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>

#include "netlisna/errors.hpp"

namespace netlisna {

namespace {

struct PairHash {
  std::size_t operator()(const std::pair<std::int64_t, std::int64_t>& p) const noexcept {
    const auto a = static_cast<std::uint64_t>(p.first);
    const auto b = static_cast<std::uint64_t>(p.second);
    return static_cast<std::size_t>(a * 0x9E3779B97F4A7C15ULL ^ b);
  }
};

std::pair<std::int64_t, std::int64_t> unordered_pair(VertexId a, VertexId b) {
  return a.value < b.value ? std::pair{a.value, b.value} : std::pair{b.value, a.value};
}

}  // namespace

struct SpatialNetwork::Impl {
  std::vector<Vertex> vertices;
  std::vector<EdgeInterval> edges;
  std::unordered_map<VertexId, std::size_t> vertex_lookup;
  std::unordered_map<EdgeId, std::size_t> edge_lookup;
  std::unordered_map<std::pair<std::int64_t, std::int64_t>, std::size_t, PairHash> pair_lookup;
  std::vector<std::vector<std::size_t>> incident;
  NetworkKind kind = NetworkKind::undirected;
  double total_length = 0.0;
};

SpatialNetwork::SpatialNetwork(std::vector<Vertex> vertices, std::vector<EdgeSpec> edges) {
  auto impl = std::make_shared<Impl>();

  std::sort(vertices.begin(), vertices.end(),
            [](const Vertex& a, const Vertex& b) { return a.id < b.id; });
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    const auto& v = vertices[i];
    if (!std::isfinite(v.x) || !std::isfinite(v.y)) {
      std::ostringstream msg;
      msg << "vertex " << v.id << ": coordinates must be finite";
      throw InputError(msg.str());
    }
    if (!impl->vertex_lookup.emplace(v.id, i).second) {
      std::ostringstream msg;
      msg << "duplicate vertex id " << v.id;
      throw InputError(msg.str());
    }
  }
  impl->vertices = std::move(vertices);

  std::sort(edges.begin(), edges.end(),
            [](const EdgeSpec& a, const EdgeSpec& b) { return a.id < b.id; });
  impl->edges.reserve(edges.size());
  impl->incident.resize(impl->vertices.size());
  bool any_directed = false;
  bool any_undirected = false;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const auto& spec = edges[i];
    auto fail = [&](std::string_view what) {
      std::ostringstream msg;
      msg << "edge " << spec.id << ": " << what;
      throw InputError(msg.str());
    };
    if (!impl->edge_lookup.emplace(spec.id, i).second) fail("duplicate edge id");
    auto tail = impl->vertex_lookup.find(spec.tail);
    auto head = impl->vertex_lookup.find(spec.head);
    if (tail == impl->vertex_lookup.end()) fail("unknown tail vertex");
    if (head == impl->vertex_lookup.end()) fail("unknown head vertex");
    if (spec.tail == spec.head) fail("self-loop");
    if (!impl->pair_lookup.emplace(unordered_pair(spec.tail, spec.head), i).second) {
      fail("vertex pair already joined by another edge");
    }
    double length = 0.0;
    if (spec.length) {
      length = *spec.length;
      if (!std::isfinite(length) || length <= 0.0) fail("length must be positive and finite");
    } else {
      const auto& a = impl->vertices[tail->second];
      const auto& b = impl->vertices[head->second];
      length = std::hypot(a.x - b.x, a.y - b.y);
      if (length <= 0.0) fail("endpoints coincide; explicit length required");
    }
    impl->edges.push_back({spec.id, spec.tail, spec.head, spec.orientation, length});
    impl->incident[tail->second].push_back(i);
    impl->incident[head->second].push_back(i);
    impl->total_length += length;
    (spec.orientation == Orientation::directed ? any_directed : any_undirected) = true;
  }
  if (any_directed && any_undirected) {
    impl->kind = NetworkKind::partially_directed;
  } else if (any_directed) {
    impl->kind = NetworkKind::directed;
  }
  impl_ = std::move(impl);
}

std::span<const Vertex> SpatialNetwork::vertices() const { return impl_->vertices; }
std::span<const EdgeInterval> SpatialNetwork::edges() const { return impl_->edges; }
std::size_t SpatialNetwork::vertex_count() const { return impl_->vertices.size(); }
std::size_t SpatialNetwork::edge_count() const { return impl_->edges.size(); }
NetworkKind SpatialNetwork::kind() const { return impl_->kind; }
double SpatialNetwork::total_length() const { return impl_->total_length; }

bool SpatialNetwork::has_vertex(VertexId v) const { return impl_->vertex_lookup.contains(v); }
bool SpatialNetwork::has_edge(EdgeId e) const { return impl_->edge_lookup.contains(e); }

std::size_t SpatialNetwork::vertex_index(VertexId v) const {
  auto it = impl_->vertex_lookup.find(v);
  if (it == impl_->vertex_lookup.end()) {
    std::ostringstream msg;
    msg << "unknown vertex " << v;
    throw LookupError(msg.str());
  }
  return it->second;
}

std::size_t SpatialNetwork::edge_index(EdgeId e) const {
  auto it = impl_->edge_lookup.find(e);
  if (it == impl_->edge_lookup.end()) {
    std::ostringstream msg;
    msg << "unknown edge " << e;
    throw LookupError(msg.str());
  }
  return it->second;
}

const Vertex& SpatialNetwork::vertex(VertexId v) const { return impl_->vertices[vertex_index(v)]; }
const EdgeInterval& SpatialNetwork::edge(EdgeId e) const { return impl_->edges[edge_index(e)]; }

std::span<const std::size_t> SpatialNetwork::incident(std::size_t vertex_index) const {
  return impl_->incident.at(vertex_index);
}

std::optional<EdgeId> SpatialNetwork::edge_between(VertexId a, VertexId b) const {
  auto it = impl_->pair_lookup.find(unordered_pair(a, b));
  if (it == impl_->pair_lookup.end()) return std::nullopt;
  return impl_->edges[it->second].id;
}

std::string_view to_string(NetworkKind kind) {
  switch (kind) {
    case NetworkKind::undirected:
      return "undirected";
    case NetworkKind::directed:
      return "directed";
    case NetworkKind::partially_directed:
      return "partially_directed";
  }
  return "unknown";
}

namespace {

VertexId other_end(const EdgeInterval& e, VertexId v) { return e.tail == v ? e.head : e.tail; }

// Partner vertices of v over incident edges in the selected classes.
std::vector<VertexId> partners(const SpatialNetwork& net, VertexId v, IncidentSelector sel) {
  std::vector<VertexId> out;
  for (std::size_t ei : net.incident(net.vertex_index(v))) {
    const auto& e = net.edges()[ei];
    const bool take = e.directed() ? (e.head == v ? sel.has(IncidentSelector::kIn)
                                                  : sel.has(IncidentSelector::kOut))
                                   : sel.has(IncidentSelector::kUndirected);
    if (take) out.push_back(other_end(e, v));
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

std::vector<VertexId> neighbors(const SpatialNetwork& net, VertexId v) {
  return partners(net, v, IncidentSelector::neighborhood());
}
std::vector<VertexId> parents(const SpatialNetwork& net, VertexId v) {
  return partners(net, v, IncidentSelector::parents());
}
std::vector<VertexId> children(const SpatialNetwork& net, VertexId v) {
  return partners(net, v, IncidentSelector::children());
}
std::vector<VertexId> family(const SpatialNetwork& net, VertexId v) {
  return partners(net, v, IncidentSelector::family());
}

std::size_t degree(const SpatialNetwork& net, VertexId v) { return neighbors(net, v).size(); }
std::size_t in_degree(const SpatialNetwork& net, VertexId v) { return parents(net, v).size(); }
std::size_t out_degree(const SpatialNetwork& net, VertexId v) { return children(net, v).size(); }
std::size_t cg_degree(const SpatialNetwork& net, VertexId v) {
  return net.incident(net.vertex_index(v)).size();
}

double mean_cg_degree(const SpatialNetwork& net) {
  if (net.vertex_count() == 0) return 0.0;
  return 2.0 * static_cast<double>(net.edge_count()) / static_cast<double>(net.vertex_count());
}

std::vector<EdgeId> incident_edges(const SpatialNetwork& net, VertexId v, IncidentSelector sel) {
  std::vector<EdgeId> out;
  for (std::size_t ei : net.incident(net.vertex_index(v))) {
    const auto& e = net.edges()[ei];
    const bool take = e.directed() ? (e.head == v ? sel.has(IncidentSelector::kIn)
                                                  : sel.has(IncidentSelector::kOut))
                                   : sel.has(IncidentSelector::kUndirected);
    if (take) out.push_back(e.id);
  }
  return out;
}

bool traversable_from(const EdgeInterval& e, VertexId from, Traversal mode) {
  if (mode == Traversal::undirected || !e.directed()) return true;
  return e.tail == from;
}

std::vector<int> hop_distances_from(const SpatialNetwork& net, std::size_t source_index,
                                    Traversal mode, std::optional<int> max_depth) {
  std::vector<int> dist(net.vertex_count(), -1);
  dist.at(source_index) = 0;
  std::deque<std::size_t> queue{source_index};
  const auto vertices = net.vertices();
  const auto edges = net.edges();
  while (!queue.empty()) {
    const std::size_t cur = queue.front();
    queue.pop_front();
    if (max_depth && dist[cur] >= *max_depth) continue;
    const VertexId cur_id = vertices[cur].id;
    for (std::size_t ei : net.incident(cur)) {
      const auto& e = edges[ei];
      if (!traversable_from(e, cur_id, mode)) continue;
      const std::size_t next = net.vertex_index(other_end(e, cur_id));
      if (dist[next] < 0) {
        dist[next] = dist[cur] + 1;
        queue.push_back(next);
      }
    }
  }
  return dist;
}

std::optional<int> hop_distance(const SpatialNetwork& net, VertexId u, VertexId v, Traversal mode) {
  const std::size_t target = net.vertex_index(v);
  const auto dist = hop_distances_from(net, net.vertex_index(u), mode);
  if (dist[target] < 0) return std::nullopt;
  return dist[target];
}

Path make_path(const SpatialNetwork& net, std::span<const VertexId> vertices) {
  if (vertices.size() < 2) throw ContractError("a path needs at least two vertices");
  Path path;
  path.vertices.assign(vertices.begin(), vertices.end());
  bool preserving = true;
  for (std::size_t i = 0; i + 1 < vertices.size(); ++i) {
    (void)net.vertex_index(vertices[i]);
    (void)net.vertex_index(vertices[i + 1]);
    auto e = net.edge_between(vertices[i], vertices[i + 1]);
    if (!e) {
      std::ostringstream msg;
      msg << "vertices " << vertices[i] << " and " << vertices[i + 1] << " are not adjacent";
      throw ContractError(msg.str());
    }
    const auto& edge = net.edge(*e);
    preserving = preserving && edge.directed() && edge.tail == vertices[i];
    path.edges.push_back(*e);
  }
  path.kind = preserving ? PathKind::direction_preserving : PathKind::undirected_traversal;
  validate_path(net, path);
  return path;
}

void validate_path(const SpatialNetwork& net, const Path& path) {
  if (path.vertices.size() < 2 || path.edges.size() + 1 != path.vertices.size()) {
    throw ContractError("path must list n >= 2 vertices and n - 1 edges");
  }
  std::vector<VertexId> sorted = path.vertices;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw ContractError("path vertices must be distinct");
  }
  for (std::size_t i = 0; i < path.edges.size(); ++i) {
    if (!net.has_edge(path.edges[i])) throw ContractError("path references an unknown edge");
    const auto& e = net.edge(path.edges[i]);
    const VertexId a = path.vertices[i];
    const VertexId b = path.vertices[i + 1];
    const bool joins = (e.tail == a && e.head == b) || (e.tail == b && e.head == a);
    if (!joins) throw ContractError("consecutive path vertices are not joined by the listed edge");
    if (path.kind == PathKind::direction_preserving && !(e.directed() && e.tail == a)) {
      throw ContractError("direction-preserving path walks an undirected edge or against an arc");
    }
  }
}

Path shortest_path(const SpatialNetwork& net, VertexId u, VertexId v, Traversal mode) {
  if (u == v) throw ContractError("shortest_path requires distinct endpoints");
  const std::size_t source = net.vertex_index(u);
  const std::size_t target = net.vertex_index(v);

  // Distances to the target over reversed traversability, so that a greedy
  // walk from the source can pick the smallest admissible next vertex.
  std::vector<int> to_target(net.vertex_count(), -1);
  to_target[target] = 0;
  std::deque<std::size_t> queue{target};
  const auto vertices = net.vertices();
  const auto edges = net.edges();
  while (!queue.empty()) {
    const std::size_t cur = queue.front();
    queue.pop_front();
    const VertexId cur_id = vertices[cur].id;
    for (std::size_t ei : net.incident(cur)) {
      const auto& e = edges[ei];
      const VertexId prev_id = other_end(e, cur_id);
      if (!traversable_from(e, prev_id, mode)) continue;
      const std::size_t prev = net.vertex_index(prev_id);
      if (to_target[prev] < 0) {
        to_target[prev] = to_target[cur] + 1;
        queue.push_back(prev);
      }
    }
  }
  if (to_target[source] < 0) {
    std::ostringstream msg;
    msg << "no path from " << u << " to " << v;
    throw NoPathError(msg.str());
  }

  std::vector<VertexId> walk{u};
  std::size_t cur = source;
  while (cur != target) {
    const VertexId cur_id = vertices[cur].id;
    std::optional<VertexId> best;
    for (std::size_t ei : net.incident(cur)) {
      const auto& e = edges[ei];
      if (!traversable_from(e, cur_id, mode)) continue;
      const VertexId next_id = other_end(e, cur_id);
      if (to_target[net.vertex_index(next_id)] != to_target[cur] - 1) continue;
      if (!best || next_id < *best) best = next_id;
    }
    walk.push_back(*best);
    cur = net.vertex_index(*best);
  }
  return make_path(net, walk);
}

namespace {

void require_direction_preserving(const SpatialNetwork& net, const Path& path) {
  validate_path(net, path);
  if (path.kind != PathKind::direction_preserving) {
    throw ContractError("ancestor/descendant sets require a direction-preserving path");
  }
}

}  // namespace

std::vector<EdgeId> ancestors_edge_set(const SpatialNetwork& net, const Path& path) {
  require_direction_preserving(net, path);
  return {path.edges.begin(), path.edges.end() - 1};
}

std::vector<EdgeId> descendants_edge_set(const SpatialNetwork& net, const Path& path) {
  require_direction_preserving(net, path);
  return {path.edges.begin() + 1, path.edges.end()};
}

}  // namespace netlisna
