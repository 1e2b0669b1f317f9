#include "netlisna/second_order.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <limits>
#include <sstream>

#include "netlisna/errors.hpp"

namespace netlisna {

namespace {

EntityRef finish(const SpatialNetwork& net, EntityRef ref) {
  std::sort(ref.edges.begin(), ref.edges.end());
  if (ref.edges.empty()) throw UndefinedValueError("entity '" + ref.label + "' covers no edges");
  if (std::adjacent_find(ref.edges.begin(), ref.edges.end()) != ref.edges.end()) {
    throw ContractError("entity '" + ref.label + "' lists an edge twice");
  }
  ref.total_length = 0.0;
  for (EdgeId e : ref.edges) ref.total_length += net.edge(e).length;
  return ref;
}

std::string selector_name(IncidentSelector sel) {
  if (sel == IncidentSelector::family()) return "fam";
  if (sel == IncidentSelector::all()) return "all";
  std::string out;
  auto add = [&](std::string_view s) {
    if (!out.empty()) out += '+';
    out += s;
  };
  if (sel.has(IncidentSelector::kUndirected)) add("nach");
  if (sel.has(IncidentSelector::kIn)) add("pa");
  if (sel.has(IncidentSelector::kOut)) add("ch");
  return out;
}

std::string path_label(const Path& path) {
  std::ostringstream s;
  s << (path.kind == PathKind::direction_preserving ? "dpath " : "path ");
  for (std::size_t i = 0; i < path.vertices.size(); ++i) s << (i ? "," : "") << 'v' << path.vertices[i];
  return s.str();
}

}  // namespace

EntityRef edge_entity(const SpatialNetwork& net, EdgeId e, EdgeFilter filter) {
  check_edge_role(net, net.edge(e), filter);
  EntityRef ref;
  ref.kind = EdgeEntity{e, filter};
  std::ostringstream label;
  label << "edge " << e;
  if (filter.role != EdgeRole::any) {
    label << (filter.role == EdgeRole::in ? " in v" : " out v") << filter.vertex;
  }
  ref.label = label.str();
  ref.edges = {e};
  return finish(net, std::move(ref));
}

EntityRef node_set_entity(const SpatialNetwork& net, VertexId v, IncidentSelector sel) {
  EntityRef ref;
  ref.kind = NodeSetEntity{v, sel};
  std::ostringstream label;
  label << selector_name(sel) << "(v" << v << ")";
  ref.label = label.str();
  ref.edges = incident_edges(net, v, sel);
  return finish(net, std::move(ref));
}

EntityRef path_entity(const SpatialNetwork& net, Path path, PathVariant variant) {
  validate_path(net, path);
  EntityRef ref;
  switch (variant) {
    case PathVariant::full:
      ref.label = path_label(path);
      ref.edges = path.edges;
      break;
    case PathVariant::minus_terminal:
      ref.label = "anch(" + path_label(path) + ")";
      ref.edges = ancestors_edge_set(net, path);
      break;
    case PathVariant::minus_origin:
      ref.label = "dech(" + path_label(path) + ")";
      ref.edges = descendants_edge_set(net, path);
      break;
  }
  ref.kind = PathEntity{std::move(path), variant};
  return finish(net, std::move(ref));
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

[[noreturn]] void syntax(std::string_view spec, std::string_view why) {
  throw ContractError("cannot parse entity '" + std::string(spec) + "': " + std::string(why));
}

std::int64_t parse_id(std::string_view spec, std::string_view tok, char prefix) {
  tok = trim(tok);
  if (!tok.empty() && (tok.front() == prefix || tok.front() == std::toupper(prefix))) tok.remove_prefix(1);
  if (!tok.empty() && tok.front() == '_') tok.remove_prefix(1);
  std::int64_t value = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (tok.empty() || ec != std::errc() || ptr != tok.data() + tok.size()) syntax(spec, "bad id '" + std::string(tok) + "'");
  return value;
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

Path parse_path(const SpatialNetwork& net, std::string_view spec, std::string_view text) {
  text = trim(text);
  bool directed = false;
  if (text.starts_with("dpath")) {
    directed = true;
    text.remove_prefix(5);
  } else if (text.starts_with("path")) {
    text.remove_prefix(4);
  } else {
    syntax(spec, "expected 'path' or 'dpath'");
  }
  text = trim(text);
  Path path;
  if (auto dots = text.find(".."); dots != std::string_view::npos) {
    const VertexId from{parse_id(spec, text.substr(0, dots), 'v')};
    const VertexId to{parse_id(spec, text.substr(dots + 2), 'v')};
    path = shortest_path(net, from, to, directed ? Traversal::direction_preserving : Traversal::undirected);
  } else {
    std::vector<VertexId> vertices;
    std::size_t start = 0;
    while (start <= text.size()) {
      const std::size_t comma = text.find(',', start);
      const auto tok = text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
      vertices.emplace_back(parse_id(spec, tok, 'v'));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    path = make_path(net, vertices);
  }
  if (directed && path.kind != PathKind::direction_preserving) {
    throw ContractError("'" + std::string(spec) + "' is not a direction-preserving path");
  }
  return path;
}

IncidentSelector parse_selector(std::string_view spec, std::string_view names) {
  IncidentSelector sel{0};
  std::size_t start = 0;
  while (start <= names.size()) {
    const std::size_t plus = names.find('+', start);
    const auto name = trim(names.substr(start, plus == std::string_view::npos ? std::string_view::npos : plus - start));
    if (name == "nach" || name == "nb" || name == "neighborhood") {
      sel.mask |= IncidentSelector::kUndirected;
    } else if (name == "pa" || name == "parents") {
      sel.mask |= IncidentSelector::kIn;
    } else if (name == "ch" || name == "child" || name == "children") {
      sel.mask |= IncidentSelector::kOut;
    } else if (name == "fam" || name == "family") {
      sel.mask |= IncidentSelector::kIn | IncidentSelector::kOut;
    } else if (name == "all") {
      sel.mask |= IncidentSelector::all().mask;
    } else {
      syntax(spec, "unknown set '" + std::string(name) + "'");
    }
    if (plus == std::string_view::npos) break;
    start = plus + 1;
  }
  return sel;
}

}  // namespace

EntityRef resolve(const SpatialNetwork& net, std::string_view spec) {
  const std::string_view text = trim(spec);
  if (text.empty()) syntax(spec, "empty");

  if (text.starts_with("edge")) {
    const auto toks = split_ws(text.substr(4));
    if (toks.size() != 1 && toks.size() != 3) syntax(spec, "expected 'edge <id> [in|out <vertex>]'");
    const EdgeId e{parse_id(spec, toks[0], 'e')};
    EdgeFilter filter;
    if (toks.size() == 3) {
      const VertexId v{parse_id(spec, toks[2], 'v')};
      if (toks[1] == "in") {
        filter = EdgeFilter::in(v);
      } else if (toks[1] == "out") {
        filter = EdgeFilter::out(v);
      } else {
        syntax(spec, "edge role must be 'in' or 'out'");
      }
    }
    return edge_entity(net, e, filter);
  }

  if (text.starts_with("path") || text.starts_with("dpath")) {
    return path_entity(net, parse_path(net, spec, text));
  }

  const auto open = text.find('(');
  if (open == std::string_view::npos || text.back() != ')') syntax(spec, "unrecognized form");
  const auto head = trim(text.substr(0, open));
  const auto inner = trim(text.substr(open + 1, text.size() - open - 2));
  if (head == "anch" || head == "dech") {
    auto path = parse_path(net, spec, inner);
    return path_entity(net, std::move(path), head == "anch" ? PathVariant::minus_terminal : PathVariant::minus_origin);
  }
  return node_set_entity(net, VertexId{parse_id(spec, inner, 'v')}, parse_selector(spec, head));
}

SecondOrderResult second_order(const SnappedPattern& p, const EntityRef& a, const EntityRef& b) {
  const auto& net = p.network();
  std::vector<EdgeId> overlap;
  std::set_intersection(a.edges.begin(), a.edges.end(), b.edges.begin(), b.edges.end(),
                        std::back_inserter(overlap));
  if (!overlap.empty()) {
    std::ostringstream msg;
    msg << "entities '" << a.label << "' and '" << b.label << "' share edge " << overlap.front();
    throw ContractError(msg.str());
  }
  if (a.edges.empty() || b.edges.empty()) throw UndefinedValueError("entity covers no edges");

  auto indices = [&](const EntityRef& ref) {
    std::vector<std::size_t> out;
    for (EdgeId e : ref.edges) out.push_back(net.edge_index(e));
    return out;
  };
  const auto ia = indices(a);
  const auto ib = indices(b);

  SecondOrderResult res;
  res.n_replicates = p.replicate_count();
  const double R = static_cast<double>(res.n_replicates);
  double mean_a = 0.0;
  double mean_b = 0.0;
  for (std::size_t r = 0; r < res.n_replicates; ++r) {
    std::int64_t na = 0;
    std::int64_t nb = 0;
    for (auto ei : ia) na += p.count_at(r, ei);
    for (auto ei : ib) nb += p.count_at(r, ei);
    const double xa = static_cast<double>(na) / a.total_length;
    const double xb = static_cast<double>(nb) / b.total_length;
    res.per_replicate.emplace_back(xa, xb);
    res.lambda2 += xa * xb;
    mean_a += xa;
    mean_b += xb;
  }
  res.lambda2 /= R;
  mean_a /= R;
  mean_b /= R;
  if (res.n_replicates == 1) {
    res.degenerate = true;
    res.gamma = 0.0;
    return res;
  }
  for (const auto& [xa, xb] : res.per_replicate) res.gamma += (xa - mean_a) * (xb - mean_b);
  res.gamma /= R;
  return res;
}

std::vector<std::vector<int>> edge_lags(const SpatialNetwork& net, Traversal mode) {
  const std::size_t n = net.vertex_count();
  std::vector<std::vector<int>> dist(n);
  for (std::size_t i = 0; i < n; ++i) dist[i] = hop_distances_from(net, i, mode);

  const auto edges = net.edges();
  const std::size_t m = edges.size();
  std::vector<std::vector<int>> lag(m, std::vector<int>(m, -1));
  for (std::size_t a = 0; a < m; ++a) {
    const std::size_t a_ends[2] = {net.vertex_index(edges[a].tail), net.vertex_index(edges[a].head)};
    for (std::size_t b = 0; b < m; ++b) {
      const std::size_t b_ends[2] = {net.vertex_index(edges[b].tail), net.vertex_index(edges[b].head)};
      int best = -1;
      for (auto u : a_ends) {
        for (auto v : b_ends) {
          const int d = dist[u][v];
          if (d >= 0 && (best < 0 || d < best)) best = d;
        }
      }
      lag[a][b] = best;
    }
  }
  return lag;
}

LagSecondOrderResult lag_second_order(const SnappedPattern& p, int k, Traversal mode) {
  if (k < 1) throw ContractError("lag must be >= 1");
  const auto& net = p.network();
  const auto lags = edge_lags(net, mode);
  const std::size_t m = net.edge_count();
  const std::size_t R = p.replicate_count();
  const auto edges = net.edges();

  LagSecondOrderResult res;
  res.lag = k;
  res.n_replicates = R;
  double sum_products = 0.0;
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = 0; b < m; ++b) {
      if (a == b || lags[a][b] != k) continue;
      ++res.pair_count;
      for (std::size_t r = 0; r < R; ++r) {
        sum_products += (static_cast<double>(p.count_at(r, a)) / edges[a].length) *
                        (static_cast<double>(p.count_at(r, b)) / edges[b].length);
      }
    }
  }
  if (res.pair_count == 0) {
    std::ostringstream msg;
    msg << "no edge pairs at lag " << k;
    throw UndefinedValueError(msg.str());
  }
  res.lambda2 = sum_products / static_cast<double>(res.pair_count * R);

  double mean_intensity = 0.0;
  for (std::size_t r = 0; r < R; ++r) {
    for (std::size_t e = 0; e < m; ++e) mean_intensity += static_cast<double>(p.count_at(r, e)) / edges[e].length;
  }
  mean_intensity /= static_cast<double>(m * R);
  res.gamma = res.lambda2 - mean_intensity * mean_intensity;
  return res;
}

}  // namespace netlisna
