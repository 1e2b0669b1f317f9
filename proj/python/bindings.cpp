#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>
#include <string>

#include "netlisna/autocorr.hpp"
#include "netlisna/cli.hpp"
#include "netlisna/errors.hpp"
#include "netlisna/graph.hpp"
#include "netlisna/intensity.hpp"
#include "netlisna/io.hpp"
#include "netlisna/pattern.hpp"
#include "netlisna/second_order.hpp"
#include "netlisna/sim.hpp"
#include "netlisna/weights.hpp"

namespace py = pybind11;
using namespace netlisna;

// Vertex and edge ids cross the boundary as plain Python ints.
namespace pybind11::detail {
template <class Tag>
struct type_caster<netlisna::Id<Tag>> {
  PYBIND11_TYPE_CASTER(netlisna::Id<Tag>, const_name("int"));
  bool load(handle src, bool convert) {
    make_caster<std::int64_t> inner;
    if (!inner.load(src, convert)) return false;
    value = netlisna::Id<Tag>{cast_op<std::int64_t>(inner)};
    return true;
  }
  static handle cast(netlisna::Id<Tag> id, return_value_policy, handle) { return PyLong_FromLongLong(id.value); }
};
}  // namespace pybind11::detail

namespace {

Traversal traversal_of(const std::string& s) {
  if (s == "undirected") return Traversal::undirected;
  if (s == "direction-preserving" || s == "direction_preserving") return Traversal::direction_preserving;
  throw ContractError("unknown traversal mode '" + s + "'");
}

AdjacencyFlavor flavor_of(const std::string& s) {
  if (s == "partial") return AdjacencyFlavor::partial;
  if (s == "cumulative") return AdjacencyFlavor::cumulative;
  throw ContractError("unknown adjacency flavor '" + s + "'");
}

GlobalStatistic global_of(const std::string& s) {
  if (s == "moran") return GlobalStatistic::moran;
  if (s == "geary") return GlobalStatistic::geary;
  if (s == "getis") return GlobalStatistic::getis;
  if (s == "rho" || s == "autocorrelation") return GlobalStatistic::autocorrelation;
  throw ContractError("unknown statistic '" + s + "'");
}

LocalStatistic local_of(const std::string& s) {
  if (s == "moran") return LocalStatistic::moran;
  if (s == "geary") return LocalStatistic::geary;
  if (s == "getis") return LocalStatistic::getis;
  throw ContractError("unknown local statistic '" + s + "'");
}

std::vector<Event> events_of(const std::vector<py::tuple>& rows) {
  std::vector<Event> out;
  out.reserve(rows.size());
  for (const auto& t : rows) {
    if (t.size() < 2 || t.size() > 3) throw ContractError("events are (x, y) or (x, y, replicate) tuples");
    Event e;
    e.x = t[0].cast<double>();
    e.y = t[1].cast<double>();
    if (t.size() == 3) e.replicate = t[2].cast<Replicate>();
    out.push_back(e);
  }
  return out;
}

py::dict result_dict(const AutocorrResult& r) {
  py::dict d;
  d["statistic"] = r.statistic;
  d["null_mean"] = r.null_mean;
  d["null_sd"] = r.null_sd;
  d["p_value"] = r.p_value;
  d["permutations"] = r.permutations;
  d["seed"] = r.seed;
  d["lag"] = r.lag;
  return d;
}

}  // namespace

PYBIND11_MODULE(_netlisna, m) {
  m.doc() = "Intensity and local indicators of association for point patterns on spatial networks";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<LookupError>(m, "LookupError", base);
  py::register_exception<ContractError>(m, "ContractError", base);
  py::register_exception<NoPathError>(m, "NoPathError", base);
  py::register_exception<UndefinedValueError>(m, "UndefinedValueError", base);
  py::register_exception<InputError>(m, "InputError", base);

  py::class_<SpatialNetwork>(m, "Network")
      .def_property_readonly("vertex_count", &SpatialNetwork::vertex_count)
      .def_property_readonly("edge_count", &SpatialNetwork::edge_count)
      .def_property_readonly("kind", [](const SpatialNetwork& n) { return std::string(to_string(n.kind())); })
      .def_property_readonly("vertex_ids",
                             [](const SpatialNetwork& n) {
                               std::vector<VertexId> out;
                               for (const auto& v : n.vertices()) out.push_back(v.id);
                               return out;
                             })
      .def_property_readonly("edge_ids",
                             [](const SpatialNetwork& n) {
                               std::vector<EdgeId> out;
                               for (const auto& e : n.edges()) out.push_back(e.id);
                               return out;
                             })
      .def("edge_length", [](const SpatialNetwork& n, EdgeId e) { return n.edge(e).length; })
      .def("summary", &summary_line)
      .def("neighbors", [](const SpatialNetwork& n, VertexId v) { return neighbors(n, v); })
      .def("parents", [](const SpatialNetwork& n, VertexId v) { return parents(n, v); })
      .def("children", [](const SpatialNetwork& n, VertexId v) { return children(n, v); })
      .def("family", [](const SpatialNetwork& n, VertexId v) { return family(n, v); })
      .def(
          "hop_distance",
          [](const SpatialNetwork& n, VertexId u, VertexId v, const std::string& mode) {
            return hop_distance(n, u, v, traversal_of(mode));
          },
          py::arg("u"), py::arg("v"), py::arg("mode") = "undirected")
      .def(
          "shortest_path",
          [](const SpatialNetwork& n, VertexId u, VertexId v, const std::string& mode) {
            return shortest_path(n, u, v, traversal_of(mode)).vertices;
          },
          py::arg("u"), py::arg("v"), py::arg("mode") = "undirected");

  m.def("load_network", [](const std::string& nodes, const std::string& edges) { return load_network(nodes, edges); },
        py::arg("nodes"), py::arg("edges"));
  m.def(
      "parse_network",
      [](const std::string& nodes_csv, const std::string& edges_csv) { return parse_network(nodes_csv, edges_csv); },
      py::arg("nodes_csv"), py::arg("edges_csv"));

  py::class_<SnappedPattern>(m, "Pattern")
      .def_property_readonly("replicates", &SnappedPattern::replicates)
      .def_property_readonly("network", &SnappedPattern::network)
      .def("total", [](const SnappedPattern& p, std::optional<Replicate> r) { return r ? p.total(*r) : p.total(); },
           py::arg("replicate") = py::none())
      .def("count", [](const SnappedPattern& p, EdgeId e, Replicate r) { return count_edge(p, e, r); },
           py::arg("edge"), py::arg("replicate") = 0)
      .def("snap_report", [](const SnappedPattern& p) {
        std::vector<py::tuple> out;
        for (const auto& r : p.snap_report()) {
          out.push_back(py::make_tuple(r.event_index, r.edge ? py::cast(r.edge->value) : py::none(), r.distance,
                                       r.accepted));
        }
        return out;
      });

  m.def(
      "snap",
      [](const SpatialNetwork& net, const std::vector<py::tuple>& events, double max_snap_distance) {
        return snap(net, events_of(events), max_snap_distance);
      },
      py::arg("network"), py::arg("events"), py::arg("max_snap_distance") = 0.0,
      "Snaps (x, y[, replicate]) tuples to their nearest edges.");

  m.def(
      "simulate",
      [](const SpatialNetwork& net, const std::string& model, double rate, std::optional<std::map<std::int64_t, double>> rates,
         double log_sd, std::size_t replicates, std::uint64_t seed) {
        SimSpec spec;
        spec.replicates = replicates;
        spec.seed = seed;
        if (model == "homogeneous") {
          spec.model = HomogeneousPoisson{rate};
        } else if (model == "inhomogeneous") {
          InhomogeneousPoisson ip;
          if (rates) {
            for (const auto& [e, r] : *rates) ip.rates[EdgeId{e}] = r;
          }
          spec.model = std::move(ip);
        } else if (model == "doubly-stochastic" || model == "doubly_stochastic") {
          spec.model = DoublyStochastic{rate, log_sd};
        } else {
          throw ContractError("unknown model '" + model + "'");
        }
        auto sim = simulate(net, spec);
        std::vector<py::tuple> events;
        for (const auto& e : sim.events) events.push_back(py::make_tuple(e.x, e.y, e.replicate));
        return py::make_tuple(std::move(sim.pattern), events);
      },
      py::arg("network"), py::arg("model") = "homogeneous", py::arg("rate") = 1.0, py::arg("rates") = py::none(),
      py::arg("log_sd") = 0.5, py::arg("replicates") = 1, py::arg("seed") = 0,
      "Returns (pattern, events) with events as (x, y, replicate) tuples.");

  m.def(
      "intensity",
      [](const SnappedPattern& p, const std::string& level, std::optional<Replicate> replicate,
         const std::vector<std::vector<std::int64_t>>& paths) {
        FieldOptions opt;
        opt.replicate = replicate;
        for (const auto& seq : paths) {
          std::vector<VertexId> vs;
          for (auto v : seq) vs.emplace_back(v);
          opt.paths.push_back(make_path(p.network(), vs));
        }
        const auto f = field(p, parse_intensity_level(level), opt);
        std::map<std::int64_t, double> out;
        for (std::size_t i = 0; i < f.size(); ++i) out[f.entity_ids[i]] = f.values[i];
        return out;
      },
      py::arg("pattern"), py::arg("level") = "edge", py::arg("replicate") = py::none(),
      py::arg("paths") = std::vector<std::vector<std::int64_t>>{},
      "Intensity field keyed by entity id (path position for path levels).");

  m.def("resolve", [](const SpatialNetwork& net, const std::string& spec) { return resolve(net, spec).edges; },
        py::arg("network"), py::arg("spec"), "Edge ids covered by an entity spec such as 'nach(v2)'.");

  m.def(
      "second_order",
      [](const SnappedPattern& p, const std::string& a, const std::string& b) {
        const auto r = second_order(p, resolve(p.network(), a), resolve(p.network(), b));
        py::dict d;
        d["lambda2"] = r.lambda2;
        d["gamma"] = r.gamma;
        d["n_replicates"] = r.n_replicates;
        d["degenerate"] = r.degenerate;
        return d;
      },
      py::arg("pattern"), py::arg("a"), py::arg("b"));

  m.def(
      "lag_second_order",
      [](const SnappedPattern& p, int k, const std::string& mode) {
        const auto r = lag_second_order(p, k, traversal_of(mode));
        py::dict d;
        d["lag"] = r.lag;
        d["lambda2"] = r.lambda2;
        d["gamma"] = r.gamma;
        d["pair_count"] = r.pair_count;
        return d;
      },
      py::arg("pattern"), py::arg("k"), py::arg("mode") = "undirected");

  py::class_<WeightMatrix>(m, "Weights")
      .def_property_readonly("vertex_ids", &WeightMatrix::vertex_index)
      .def_property_readonly("total", &WeightMatrix::total)
      .def("dense", [](const WeightMatrix& w) {
        const auto flat = w.dense();
        const std::size_t n = w.size();
        std::vector<std::vector<double>> out(n);
        for (std::size_t i = 0; i < n; ++i) out[i].assign(flat.begin() + i * n, flat.begin() + (i + 1) * n);
        return out;
      });

  m.def(
      "adjacency",
      [](const SpatialNetwork& net, int order, const std::string& flavor, const std::string& mode, bool row) {
        auto w = adjacency(net, order, flavor_of(flavor), traversal_of(mode));
        return row ? standardize(w) : w;
      },
      py::arg("network"), py::arg("order") = 1, py::arg("flavor") = "partial", py::arg("mode") = "undirected",
      py::arg("row_standardize") = false);

  py::class_<NodeField>(m, "NodeField")
      .def(py::init<std::vector<VertexId>, std::vector<double>>(), py::arg("vertices"), py::arg("values"))
      .def_property_readonly("vertices", &NodeField::vertices)
      .def_property_readonly("values", &NodeField::values)
      .def("conform", [](const NodeField& f, const WeightMatrix& w) { return conform(w, f); });

  m.def("node_field", [](const SnappedPattern& p, const std::string& level, std::optional<Replicate> replicate) {
    return NodeField::from(field(p, parse_intensity_level(level), FieldOptions{replicate, {}}));
  }, py::arg("pattern"), py::arg("level") = "cg_node", py::arg("replicate") = py::none());

  m.def("statistic", [](const std::string& stat, const NodeField& f, const WeightMatrix& w) {
    return global_statistic(global_of(stat), f, w);
  }, py::arg("stat"), py::arg("field"), py::arg("weights"));
  m.def("local_moran", [](const NodeField& f, const WeightMatrix& w) { return local_moran(f, w).values; });
  m.def(
      "local_geary",
      [](const NodeField& f, const WeightMatrix& w, bool literal) {
        return local_geary(f, w, literal ? LocalGearyForm::literal : LocalGearyForm::weighted);
      },
      py::arg("field"), py::arg("weights"), py::arg("literal") = false);
  m.def("local_getis", [](const NodeField& f, const WeightMatrix& w) { return getis_g_local(f, w); });
  m.def("moran_scatter", [](const NodeField& f, const WeightMatrix& w) {
    const auto s = moran_scatter(f, w);
    return py::make_tuple(s.slope, s.intercept);
  });
  m.def(
      "permutation_test",
      [](const std::string& stat, const NodeField& f, const WeightMatrix& w, std::size_t permutations,
         std::uint64_t seed) {
        AutocorrResult r;
        {
          py::gil_scoped_release release;
          r = permutation_test(global_of(stat), f, w, {permutations, seed});
        }
        return result_dict(r);
      },
      py::arg("stat"), py::arg("field"), py::arg("weights"), py::arg("permutations") = 999, py::arg("seed") = 0);
  m.def(
      "local_permutation_test",
      [](const std::string& stat, const NodeField& f, const WeightMatrix& w, std::size_t permutations,
         std::uint64_t seed) {
        const auto rows = local_permutation_test(local_of(stat), f, w, {permutations, seed});
        std::vector<py::dict> out;
        for (const auto& r : rows) {
          py::dict d;
          d["vertex"] = r.vertex.value;
          d["value"] = r.defined ? py::cast(r.value) : py::none();
          d["p_value"] = r.defined ? py::cast(r.p_value) : py::none();
          d["quadrant"] = std::string(to_string(r.quadrant));
          out.push_back(d);
        }
        return out;
      },
      py::arg("stat"), py::arg("field"), py::arg("weights"), py::arg("permutations") = 999, py::arg("seed") = 0);
  m.def(
      "correlogram",
      [](const NodeField& f, const SpatialNetwork& net, const std::string& stat, int max_lag,
         std::size_t permutations, std::uint64_t seed, const std::string& mode) {
        std::vector<py::dict> out;
        for (const auto& row : correlogram(f, net, global_of(stat), max_lag, {permutations, seed}, traversal_of(mode))) {
          py::dict d = row.present ? result_dict(row.result) : py::dict();
          d["lag"] = row.lag;
          d["present"] = row.present;
          d["p_bonferroni"] = row.p_bonferroni;
          out.push_back(d);
        }
        return out;
      },
      py::arg("field"), py::arg("network"), py::arg("stat") = "moran", py::arg("max_lag") = 8,
      py::arg("permutations") = 999, py::arg("seed") = 0, py::arg("mode") = "undirected");

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::vector<std::string> full{"netlisna"};
        full.insert(full.end(), args.begin(), args.end());
        std::vector<const char*> argv;
        for (const auto& a : full) argv.push_back(a.c_str());
        std::ostringstream out;
        std::ostringstream err;
        const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs a CLI command in-process; returns (exit_code, stdout, stderr).");
}
