#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "netlisna/autocorr.hpp"
#include "netlisna/graph.hpp"
#include "netlisna/intensity.hpp"
#include "netlisna/pattern.hpp"
#include "netlisna/second_order.hpp"
#include "netlisna/weights.hpp"

namespace netlisna {

/// Shortest decimal string that parses back to the identical double.
std::string format_double(double v);

// Input. Errors are InputError naming the source and 1-based line number.

/// Nodes CSV `id,x,y`; edges CSV `id,tail,head,directed[,length]` with
/// directed in {0,1} and an empty length meaning Euclidean.
SpatialNetwork parse_network(std::string_view nodes_csv, std::string_view edges_csv,
                             std::string_view nodes_name = "nodes", std::string_view edges_name = "edges");
SpatialNetwork load_network(const std::filesystem::path& nodes, const std::filesystem::path& edges);

/// "nodes=<V> edges=<E> kind=<kind> mean_cg_degree=<d>"
std::string summary_line(const SpatialNetwork& net);

/// Events CSV `x,y[,replicate][,mark]`; a missing replicate is 0.
std::vector<Event> parse_events(std::string_view csv, std::string_view name = "events");
std::vector<Event> load_events(const std::filesystem::path& path);

/// Canonical events CSV: header `x,y,replicate` plus `,mark` when any event
/// carries a mark.
void write_events(std::ostream& os, std::span<const Event> events);
void save_events(const std::filesystem::path& path, std::span<const Event> events);

/// Edge-id to rate table `edge,rate`.
std::vector<std::pair<EdgeId, double>> parse_edge_rates(std::string_view csv, std::string_view name = "rates");

// Output tables.

void write_snap_report(std::ostream& os, const SnappedPattern& p);
void write_intensity(std::ostream& os, const IntensityField& f);

struct PairRow {
  std::string a;
  std::string b;
  SecondOrderResult result;
};
void write_second_order(std::ostream& os, std::span<const PairRow> rows);
void write_lag_second_order(std::ostream& os, std::span<const LagSecondOrderResult> rows);

/// Dense matrix; header `vertex,<id>...`, one row per vertex.
void write_weights(std::ostream& os, const WeightMatrix& w);

struct ResultRow {
  std::string statistic;
  AutocorrResult result;
  double p_adjusted = 1.0;
};
void write_results(std::ostream& os, std::span<const ResultRow> rows);
void write_local(std::ostream& os, std::span<const LocalResult> rows);
void write_scatter(std::ostream& os, const MoranScatter& s);

/// FeatureCollection of Point features at vertex coordinates with
/// properties vertex, value, quadrant, p.
void write_geojson(std::ostream& os, const SpatialNetwork& net, std::span<const LocalResult> rows);

}  // namespace netlisna
