#include "netlisna/intensity.hpp"

#include <array>
#include <sstream>
#include <string>
#include <utility>

#include "netlisna/errors.hpp"

namespace netlisna {

void check_edge_role(const SpatialNetwork& net, const EdgeInterval& e, EdgeFilter filter) {
  if (filter.role == EdgeRole::any) return;
  (void)net.vertex_index(filter.vertex);
  const bool ok = e.directed() &&
                  (filter.role == EdgeRole::in ? e.head == filter.vertex : e.tail == filter.vertex);
  if (!ok) {
    std::ostringstream msg;
    msg << "edge " << e.id << " is not an " << (filter.role == EdgeRole::in ? "in" : "out")
        << "-arc of vertex " << filter.vertex;
    throw ContractError(msg.str());
  }
}

namespace {

double edge_value(const SnappedPattern& p, std::size_t edge_index, ReplicateSel r) {
  return p.mean_count(edge_index, r) / p.network().edges()[edge_index].length;
}

}  // namespace

double edge_intensity(const SnappedPattern& p, EdgeId e, EdgeFilter filter, ReplicateSel r) {
  const auto& net = p.network();
  const std::size_t ei = net.edge_index(e);
  check_edge_role(net, net.edges()[ei], filter);
  return edge_value(p, ei, r);
}

double edge_set_intensity(const SnappedPattern& p, std::span<const EdgeId> edges, ReplicateSel r) {
  if (edges.empty()) throw UndefinedValueError("intensity over an empty edge set is undefined");
  double count = 0.0;
  double length = 0.0;
  for (EdgeId e : edges) {
    const std::size_t ei = p.network().edge_index(e);
    count += p.mean_count(ei, r);
    length += p.network().edges()[ei].length;
  }
  return count / length;
}

double node_mean_intensity(const SnappedPattern& p, VertexId v, IncidentSelector sel, ReplicateSel r) {
  if (sel != IncidentSelector::neighborhood() && sel != IncidentSelector::parents() &&
      sel != IncidentSelector::children()) {
    throw ContractError("node mean intensity selects neighbors, parents or children");
  }
  const auto edges = incident_edges(p.network(), v, sel);
  if (edges.empty()) {
    std::ostringstream msg;
    msg << "vertex " << v << " has no edges in the selected set";
    throw UndefinedValueError(msg.str());
  }
  double s = 0.0;
  for (EdgeId e : edges) s += edge_value(p, p.network().edge_index(e), r);
  return s / static_cast<double>(edges.size());
}

double pooled_set_intensity(const SnappedPattern& p, VertexId v, IncidentSelector sel, ReplicateSel r) {
  const auto edges = incident_edges(p.network(), v, sel);
  if (edges.empty()) {
    std::ostringstream msg;
    msg << "vertex " << v << " has no edges in the selected set";
    throw UndefinedValueError(msg.str());
  }
  return edge_set_intensity(p, edges, r);
}

double cg_node_intensity(const SnappedPattern& p, VertexId v, ReplicateSel r) {
  const auto& net = p.network();
  const auto incident = net.incident(net.vertex_index(v));
  if (incident.empty()) {
    std::ostringstream msg;
    msg << "vertex " << v << " is isolated";
    throw UndefinedValueError(msg.str());
  }
  double s = 0.0;
  for (std::size_t ei : incident) s += edge_value(p, ei, r);
  return s / static_cast<double>(incident.size());
}

double path_intensity(const SnappedPattern& p, const Path& path, PathIntensity variant, ReplicateSel r) {
  const auto& net = p.network();
  validate_path(net, path);
  switch (variant) {
    case PathIntensity::mean: {
      double s = 0.0;
      for (EdgeId e : path.edges) s += edge_value(p, net.edge_index(e), r);
      return s / static_cast<double>(path.edges.size());
    }
    case PathIntensity::pooled:
      return edge_set_intensity(p, path.edges, r);
    case PathIntensity::ancestors:
      return edge_set_intensity(p, ancestors_edge_set(net, path), r);
    case PathIntensity::descendants:
      return edge_set_intensity(p, descendants_edge_set(net, path), r);
  }
  throw ContractError("unknown path intensity variant");
}

namespace {

constexpr std::array<std::pair<IntensityLevel, std::string_view>, 13> kLevelNames{{
    {IntensityLevel::edge, "edge"},
    {IntensityLevel::node_mean, "node_mean"},
    {IntensityLevel::parent_mean, "parent_mean"},
    {IntensityLevel::children_mean, "children_mean"},
    {IntensityLevel::neighborhood, "neighborhood"},
    {IntensityLevel::parents, "parents"},
    {IntensityLevel::children, "children"},
    {IntensityLevel::family, "family"},
    {IntensityLevel::cg_node, "cg_node"},
    {IntensityLevel::path_mean, "path_mean"},
    {IntensityLevel::path_pooled, "path_pooled"},
    {IntensityLevel::ancestors, "ancestors"},
    {IntensityLevel::descendants, "descendants"},
}};

}  // namespace

std::string_view to_string(IntensityLevel level) {
  for (const auto& [l, name] : kLevelNames) {
    if (l == level) return name;
  }
  return "unknown";
}

IntensityLevel parse_intensity_level(std::string_view name) {
  for (const auto& [l, n] : kLevelNames) {
    if (n == name) return l;
  }
  throw ContractError("unknown intensity level '" + std::string(name) + "'");
}

bool is_node_level(IntensityLevel level) {
  return level != IntensityLevel::edge && !is_path_level(level);
}

bool is_path_level(IntensityLevel level) {
  return level == IntensityLevel::path_mean || level == IntensityLevel::path_pooled ||
         level == IntensityLevel::ancestors || level == IntensityLevel::descendants;
}

IntensityField field(const SnappedPattern& p, IntensityLevel level, const FieldOptions& options) {
  const auto& net = p.network();
  const ReplicateSel r = options.replicate;
  if (r) (void)p.replicate_position(*r);
  IntensityField out;
  out.level = level;
  out.replicate = r;

  if (level == IntensityLevel::edge) {
    for (std::size_t ei = 0; ei < net.edge_count(); ++ei) {
      out.entity_ids.push_back(net.edges()[ei].id.value);
      out.values.push_back(edge_value(p, ei, r));
    }
    return out;
  }

  if (is_path_level(level)) {
    const PathIntensity variant = level == IntensityLevel::path_mean     ? PathIntensity::mean
                                  : level == IntensityLevel::path_pooled ? PathIntensity::pooled
                                  : level == IntensityLevel::ancestors   ? PathIntensity::ancestors
                                                                         : PathIntensity::descendants;
    for (std::size_t i = 0; i < options.paths.size(); ++i) {
      out.entity_ids.push_back(static_cast<std::int64_t>(i));
      out.values.push_back(path_intensity(p, options.paths[i], variant, r));
    }
    return out;
  }

  for (const auto& v : net.vertices()) {
    std::optional<double> value;
    auto guarded = [&](auto&& fn) {
      try {
        value = fn();
      } catch (const UndefinedValueError&) {
        value.reset();
      }
    };
    switch (level) {
      case IntensityLevel::node_mean:
        guarded([&] { return node_mean_intensity(p, v.id, IncidentSelector::neighborhood(), r); });
        break;
      case IntensityLevel::parent_mean:
        guarded([&] { return node_mean_intensity(p, v.id, IncidentSelector::parents(), r); });
        break;
      case IntensityLevel::children_mean:
        guarded([&] { return node_mean_intensity(p, v.id, IncidentSelector::children(), r); });
        break;
      case IntensityLevel::neighborhood:
        guarded([&] { return pooled_set_intensity(p, v.id, IncidentSelector::neighborhood(), r); });
        break;
      case IntensityLevel::parents:
        guarded([&] { return pooled_set_intensity(p, v.id, IncidentSelector::parents(), r); });
        break;
      case IntensityLevel::children:
        guarded([&] { return pooled_set_intensity(p, v.id, IncidentSelector::children(), r); });
        break;
      case IntensityLevel::family:
        guarded([&] { return pooled_set_intensity(p, v.id, IncidentSelector::family(), r); });
        break;
      case IntensityLevel::cg_node:
        guarded([&] { return cg_node_intensity(p, v.id, r); });
        break;
      default:
        break;
    }
    if (value) {
      out.entity_ids.push_back(v.id.value);
      out.values.push_back(*value);
    }
  }
  return out;
}

}  // namespace netlisna
