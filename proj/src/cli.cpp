#include "netlisna/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "netlisna/errors.hpp"
#include "netlisna/io.hpp"
#include "netlisna/second_order.hpp"
#include "netlisna/sim.hpp"

namespace netlisna {

std::filesystem::path output_dir(const RunConfig& config) {
  if (config.out_dir) return *config.out_dir;
  if (const char* env = std::getenv("NETLISNA_OUT"); env != nullptr && *env != '\0') return env;
  return ".";
}

namespace {

// Output tables are collected in memory and written only after the whole
// command succeeds.
class Outputs {
 public:
  explicit Outputs(std::string command) : command_(std::move(command)) {}

  std::ostream& table(const std::string& name, const std::string& ext = "csv") {
    const std::string file = command_ + "_" + name + "." + ext;
    if (!tables_.contains(file)) order_.push_back(file);
    return tables_[file];
  }

  void note(std::string text) { notes_.push_back(std::move(text)); }

  std::vector<std::string> write(const std::filesystem::path& dir, const std::vector<std::string>& invocation) const {
    std::filesystem::create_directories(dir);
    for (const auto& file : order_) put(dir / file, tables_.at(file).str());
    nlohmann::ordered_json manifest;
    manifest["command"] = command_;
    manifest["invocation"] = invocation;
    manifest["outputs"] = order_;
    manifest["notes"] = notes_;
    put(dir / (command_ + "_manifest.json"), manifest.dump(2) + "\n");
    return order_;
  }

  const std::vector<std::string>& notes() const { return notes_; }

 private:
  static void put(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write " + path.string());
    out << content;
    if (!out) throw InputError("failed writing " + path.string());
  }

  std::string command_;
  std::vector<std::string> order_;
  std::map<std::string, std::ostringstream> tables_;
  std::vector<std::string> notes_;
};

std::uint64_t require_seed(const RunConfig& c) {
  if (!c.seed) throw ContractError("command '" + c.command + "' is stochastic and needs --seed");
  return *c.seed;
}

void require_file(const std::filesystem::path& p, std::string_view flag) {
  if (p.empty()) throw ContractError("missing " + std::string(flag));
  if (!std::filesystem::is_regular_file(p)) throw InputError("file not found: " + p.string());
}

SpatialNetwork network_of(const RunConfig& c) {
  require_file(c.nodes, "--nodes");
  require_file(c.edges, "--edges");
  return load_network(c.nodes, c.edges);
}

SnappedPattern pattern_of(const RunConfig& c, const SpatialNetwork& net) {
  require_file(c.events, "--events");
  if (!(c.max_snap_distance >= 0.0)) throw ContractError("--max-snap must be nonnegative");
  const auto events = load_events(c.events);
  return snap(net, events, c.max_snap_distance);
}

std::vector<Path> paths_of(const RunConfig& c, const SpatialNetwork& net) {
  std::vector<Path> out;
  for (const auto& spec : c.paths) {
    const std::string text = spec.starts_with("path") || spec.starts_with("dpath") ? spec : "path " + spec;
    auto ref = resolve(net, text);
    out.push_back(std::get<PathEntity>(ref.kind).path);
  }
  return out;
}

NodeField node_field_of(const RunConfig& c, const SnappedPattern& p) {
  const auto level = parse_intensity_level(c.level);
  if (!is_node_level(level)) throw ContractError("--level must be a node-level intensity, got '" + c.level + "'");
  return NodeField::from(field(p, level, FieldOptions{c.replicate, {}}));
}

WeightMatrix weights_of(const RunConfig& c, const SpatialNetwork& net, const NodeField& f,
                        Standardization standardization) {
  if (c.order < 1) throw ContractError("--order must be >= 1");
  auto w = adjacency(net, c.order, c.flavor, c.mode);
  if (standardization == Standardization::row) w = standardize(w);
  return conform(w, f);
}

GlobalStatistic global_of(const std::string& name) {
  if (name == "moran") return GlobalStatistic::moran;
  if (name == "geary") return GlobalStatistic::geary;
  if (name == "getis") return GlobalStatistic::getis;
  if (name == "rho" || name == "autocorrelation") return GlobalStatistic::autocorrelation;
  throw ContractError("unknown statistic '" + name + "'");
}

std::optional<LocalStatistic> local_of(GlobalStatistic s) {
  switch (s) {
    case GlobalStatistic::moran:
      return LocalStatistic::moran;
    case GlobalStatistic::geary:
      return LocalStatistic::geary;
    case GlobalStatistic::getis:
      return LocalStatistic::getis;
    case GlobalStatistic::autocorrelation:
      return std::nullopt;
  }
  return std::nullopt;
}

std::vector<PairRow> evaluate_pairs(const RunConfig& c, const SnappedPattern& p, bool cross_hierarchical) {
  if (c.pair_a.size() != c.pair_b.size()) throw ContractError("--a and --b must be given the same number of times");
  std::vector<PairRow> rows;
  for (std::size_t i = 0; i < c.pair_a.size(); ++i) {
    const auto a = resolve(p.network(), c.pair_a[i]);
    const auto b = resolve(p.network(), c.pair_b[i]);
    if (cross_hierarchical) {
      const bool ea = std::holds_alternative<EdgeEntity>(a.kind);
      const bool eb = std::holds_alternative<EdgeEntity>(b.kind);
      if (ea == eb) {
        throw ContractError("lisna2 pairs a single edge with an entity set: '" + c.pair_a[i] + "' / '" +
                            c.pair_b[i] + "'");
      }
    }
    rows.push_back({c.pair_a[i], c.pair_b[i], second_order(p, a, b)});
  }
  return rows;
}

void cmd_summary(const RunConfig& c, Outputs& o, std::ostream& out) {
  const auto net = network_of(c);
  out << summary_line(net) << '\n';
  o.table("network") << "nodes,edges,kind,mean_cg_degree,total_length\n"
                     << net.vertex_count() << ',' << net.edge_count() << ',' << to_string(net.kind()) << ','
                     << format_double(mean_cg_degree(net)) << ',' << format_double(net.total_length()) << '\n';
}

void cmd_snap(const RunConfig& c, Outputs& o, std::ostream& out) {
  const auto net = network_of(c);
  out << summary_line(net) << '\n';
  const auto p = pattern_of(c, net);
  std::size_t accepted = 0;
  for (const auto& r : p.snap_report()) accepted += r.accepted ? 1 : 0;
  out << "events=" << p.snap_report().size() << " accepted=" << accepted
      << " rejected=" << p.snap_report().size() - accepted << '\n';
  write_snap_report(o.table("report"), p);
}

void cmd_simulate(const RunConfig& c, Outputs& o, std::ostream& out) {
  const auto net = network_of(c);
  out << summary_line(net) << '\n';
  SimSpec spec;
  spec.replicates = c.replicates;
  spec.seed = require_seed(c);
  switch (c.model) {
    case SimModel::homogeneous:
      spec.model = HomogeneousPoisson{c.rate};
      break;
    case SimModel::inhomogeneous: {
      require_file(c.rates, "--rates");
      std::ifstream in(c.rates, std::ios::binary);
      std::ostringstream text;
      text << in.rdbuf();
      InhomogeneousPoisson m;
      for (const auto& [e, r] : parse_edge_rates(text.str(), c.rates.string())) m.rates[e] = r;
      spec.model = std::move(m);
      break;
    }
    case SimModel::doubly_stochastic:
      spec.model = DoublyStochastic{c.rate, c.log_sd};
      break;
  }
  const auto sim = simulate(net, spec);
  out << "replicates=" << c.replicates << " events=" << sim.events.size() << '\n';
  write_events(o.table("events"), sim.events);
}

void cmd_intensity(const RunConfig& c, Outputs& o, std::ostream& out) {
  const auto net = network_of(c);
  out << summary_line(net) << '\n';
  const auto p = pattern_of(c, net);
  const auto level = parse_intensity_level(c.level);
  const auto f = field(p, level, FieldOptions{c.replicate, paths_of(c, net)});
  out << "level=" << to_string(level) << " entities=" << f.size() << '\n';
  write_intensity(o.table(std::string(to_string(level))), f);
}

void cmd_second_order(const RunConfig& c, Outputs& o, std::ostream& out) {
  const auto net = network_of(c);
  out << summary_line(net) << '\n';
  const auto p = pattern_of(c, net);
  if (c.pair_a.empty() && c.max_lag < 1) throw ContractError("second-order needs --a/--b pairs or --max-lag");
  if (!c.pair_a.empty()) {
    const auto rows = evaluate_pairs(c, p, false);
    write_second_order(o.table("pairs"), rows);
  }
  if (c.max_lag >= 1) {
    std::vector<LagSecondOrderResult> rows;
    for (int k = 1; k <= c.max_lag; ++k) {
      try {
        rows.push_back(lag_second_order(p, k, c.mode));
      } catch (const UndefinedValueError&) {
        o.note("lag " + std::to_string(k) + " absent: no edge pairs at this lag");
      }
    }
    write_lag_second_order(o.table("lags"), rows);
  }
  for (const auto& n : o.notes()) out << n << '\n';
}

void cmd_lisna2(const RunConfig& c, Outputs& o, std::ostream& out) {
  const auto net = network_of(c);
  out << summary_line(net) << '\n';
  const auto p = pattern_of(c, net);
  if (c.pair_a.empty()) throw ContractError("lisna2 needs at least one --a/--b pair");
  const auto rows = evaluate_pairs(c, p, true);
  write_second_order(o.table("pairs"), rows);
}

void cmd_autocorr(const RunConfig& c, Outputs& o, std::ostream& out) {
  const auto net = network_of(c);
  out << summary_line(net) << '\n';
  const auto p = pattern_of(c, net);
  const auto f = node_field_of(c, p);
  const auto w = weights_of(c, net, f, c.standardization);
  const PermutationOptions perm{c.permutations, require_seed(c)};
  if (c.export_weights) write_weights(o.table("weights"), w);

  const std::vector<std::string> stats = c.stats.empty() ? std::vector<std::string>{"moran", "geary", "getis"}
                                                          : c.stats;
  for (const auto& name : stats) {
    const auto stat = global_of(name);
    auto res = c.method == InferenceMethod::analytic_normal ? analytic_test(stat, f, w)
                                                            : permutation_test(stat, f, w, perm);
    res.lag = c.order;
    const ResultRow row{std::string(to_string(stat)), res, res.p_value};
    write_results(o.table(std::string(to_string(stat))), std::span(&row, 1));
    out << to_string(stat) << " value=" << format_double(res.statistic) << " p=" << format_double(res.p_value)
        << '\n';

    if (const auto local = local_of(stat)) {
      std::vector<LocalResult> rows;
      if (*local == LocalStatistic::geary && c.geary_form == LocalGearyForm::literal) {
        const auto values = local_geary(f, w, LocalGearyForm::literal);
        for (std::size_t i = 0; i < f.size(); ++i) {
          LocalResult r;
          r.vertex = f.vertices()[i];
          r.value = values[i];
          rows.push_back(r);
        }
        o.note("local_geary literal form: no permutation inference, p fixed at 1");
      } else {
        rows = local_permutation_test(*local, f, w, perm);
      }
      const std::string local_name(to_string(*local));
      write_local(o.table(local_name), rows);
      if (c.geojson) write_geojson(o.table(local_name, "geojson"), net, rows);
    }
  }
}

void cmd_correlogram(const RunConfig& c, Outputs& o, std::ostream& out) {
  const auto net = network_of(c);
  out << summary_line(net) << '\n';
  const auto p = pattern_of(c, net);
  const auto f = node_field_of(c, p);
  const PermutationOptions perm{c.permutations, require_seed(c)};
  const int max_lag = c.max_lag >= 1 ? c.max_lag : 8;
  const std::vector<std::string> stats = c.stats.empty() ? std::vector<std::string>{"moran", "geary"} : c.stats;
  for (const auto& name : stats) {
    const auto stat = global_of(name);
    if (stat != GlobalStatistic::moran && stat != GlobalStatistic::geary) {
      throw ContractError("correlogram supports moran and geary, got '" + name + "'");
    }
    std::vector<ResultRow> rows;
    for (const auto& row : correlogram(f, net, stat, max_lag, perm, c.mode)) {
      if (!row.present) {
        o.note(std::string(to_string(stat)) + " lag " + std::to_string(row.lag) + " absent: no vertex pairs");
        continue;
      }
      rows.push_back({std::string(to_string(stat)), row.result, row.p_bonferroni});
    }
    write_results(o.table(std::string(to_string(stat))), rows);
  }
  for (const auto& n : o.notes()) out << n << '\n';
}

void cmd_scatter(const RunConfig& c, Outputs& o, std::ostream& out) {
  const auto net = network_of(c);
  out << summary_line(net) << '\n';
  const auto p = pattern_of(c, net);
  const auto f = node_field_of(c, p);
  const auto w = weights_of(c, net, f, Standardization::row);
  if (c.export_weights) write_weights(o.table("weights"), w);
  const auto s = moran_scatter(f, w);
  out << "slope=" << format_double(s.slope) << " intercept=" << format_double(s.intercept) << '\n';
  write_scatter(o.table("moran"), s);
  o.note("slope=" + format_double(s.slope) + " intercept=" + format_double(s.intercept));
}

std::string one_line(std::string s) {
  for (char& ch : s) {
    if (ch == '\n' || ch == '\r') ch = ' ';
  }
  return s;
}

}  // namespace

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  using Handler = void (*)(const RunConfig&, Outputs&, std::ostream&);
  static const std::map<std::string, Handler> handlers = {
      {"summary", cmd_summary},         {"snap", cmd_snap},           {"simulate", cmd_simulate},
      {"intensity", cmd_intensity},     {"second-order", cmd_second_order}, {"lisna2", cmd_lisna2},
      {"autocorr", cmd_autocorr},       {"correlogram", cmd_correlogram},   {"scatter", cmd_scatter},
  };
  try {
    const auto it = handlers.find(config.command);
    if (it == handlers.end()) throw ContractError("unknown command '" + config.command + "'");
    Outputs outputs(config.command);
    it->second(config, outputs, out);
    outputs.write(output_dir(config), config.invocation);
    return 0;
  } catch (const std::exception& e) {
    err << "netlisna " << config.command << ": error: " << one_line(e.what()) << '\n';
    return 1;
  }
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig c;
  for (int i = 1; i < argc; ++i) c.invocation.emplace_back(argv[i]);

  CLI::App app{"Network intensity and local indicators of network association"};
  app.require_subcommand(1);

  const std::map<std::string, AdjacencyFlavor> flavors{{"partial", AdjacencyFlavor::partial},
                                                        {"cumulative", AdjacencyFlavor::cumulative}};
  const std::map<std::string, Traversal> modes{{"undirected", Traversal::undirected},
                                               {"direction-preserving", Traversal::direction_preserving}};
  const std::map<std::string, Standardization> standardizations{{"binary", Standardization::binary},
                                                                 {"row", Standardization::row}};
  const std::map<std::string, InferenceMethod> methods{{"permutation", InferenceMethod::permutation},
                                                       {"analytic", InferenceMethod::analytic_normal}};
  const std::map<std::string, LocalGearyForm> geary_forms{{"weighted", LocalGearyForm::weighted},
                                                          {"literal", LocalGearyForm::literal}};
  const std::map<std::string, SimModel> models{{"homogeneous", SimModel::homogeneous},
                                               {"inhomogeneous", SimModel::inhomogeneous},
                                               {"doubly-stochastic", SimModel::doubly_stochastic}};

  std::string out_dir;
  std::uint64_t seed = 0;

  auto network_opts = [&](CLI::App* sub) {
    sub->add_option("--nodes", c.nodes, "nodes CSV (id,x,y)")->required();
    sub->add_option("--edges", c.edges, "edges CSV (id,tail,head,directed,length)")->required();
    sub->add_option("--out", out_dir, "output directory (default $NETLISNA_OUT or .)");
  };
  auto pattern_opts = [&](CLI::App* sub) {
    network_opts(sub);
    sub->add_option("--events", c.events, "events CSV (x,y[,replicate][,mark])")->required();
    sub->add_option("--max-snap", c.max_snap_distance, "snap distance cutoff; 0 disables it");
  };
  auto seed_opt = [&](CLI::App* sub) { sub->add_option("--seed", seed, "random seed (required)"); };
  auto field_opts = [&](CLI::App* sub) {
    sub->add_option("--level", c.level, "node-level intensity")->capture_default_str();
    sub->add_option("--replicate", c.replicate, "replicate id; default averages over replicates");
  };
  auto weight_opts = [&](CLI::App* sub) {
    sub->add_option("--order", c.order, "adjacency order k")->capture_default_str();
    sub->add_option("--flavor", c.flavor, "partial|cumulative")->transform(CLI::CheckedTransformer(flavors));
    sub->add_option("--mode", c.mode, "undirected|direction-preserving")->transform(CLI::CheckedTransformer(modes));
    sub->add_flag("--export-weights", c.export_weights, "also write the dense weight matrix");
  };
  auto pair_opts = [&](CLI::App* sub) {
    sub->add_option("--a", c.pair_a, "first entity of each pair");
    sub->add_option("--b", c.pair_b, "second entity of each pair");
  };

  network_opts(app.add_subcommand("summary", "network summary"));
  pattern_opts(app.add_subcommand("snap", "snap events onto edges"));

  auto* sim = app.add_subcommand("simulate", "simulate a point pattern");
  network_opts(sim);
  seed_opt(sim);
  sim->add_option("--model", c.model, "homogeneous|inhomogeneous|doubly-stochastic")
      ->transform(CLI::CheckedTransformer(models));
  sim->add_option("--rate", c.rate, "rate per unit length")->capture_default_str();
  sim->add_option("--rates", c.rates, "per-edge rates CSV (edge,rate)");
  sim->add_option("--log-sd", c.log_sd, "sd of the shared log-normal factor")->capture_default_str();
  sim->add_option("--replicates", c.replicates, "replicate count")->capture_default_str();

  auto* inten = app.add_subcommand("intensity", "first-order intensity field");
  pattern_opts(inten);
  field_opts(inten);
  inten->add_option("--path", c.paths, "path spec for path levels, e.g. 1..7 or dpath 1,4,7");

  auto* so = app.add_subcommand("second-order", "second-order intensity and covariance density");
  pattern_opts(so);
  pair_opts(so);
  so->add_option("--max-lag", c.max_lag, "lag estimator for k = 1..K");
  so->add_option("--mode", c.mode, "undirected|direction-preserving")->transform(CLI::CheckedTransformer(modes));

  auto* l2 = app.add_subcommand("lisna2", "edge versus entity-set second-order configurations");
  pattern_opts(l2);
  pair_opts(l2);

  auto* ac = app.add_subcommand("autocorr", "global and local autocorrelation with inference");
  pattern_opts(ac);
  field_opts(ac);
  weight_opts(ac);
  seed_opt(ac);
  ac->add_option("--stat", c.stats, "moran|geary|getis|rho (repeatable; default moran, geary, getis)");
  ac->add_option("--standardization", c.standardization, "binary|row")
      ->transform(CLI::CheckedTransformer(standardizations));
  ac->add_option("--method", c.method, "permutation|analytic")->transform(CLI::CheckedTransformer(methods));
  ac->add_option("--local-geary", c.geary_form, "weighted|literal")->transform(CLI::CheckedTransformer(geary_forms));
  ac->add_option("--permutations", c.permutations, "permutation count")->capture_default_str();
  ac->add_flag("--geojson", c.geojson, "also write GeoJSON of local results");

  auto* cg = app.add_subcommand("correlogram", "statistic over partial lags 1..K with Bonferroni");
  pattern_opts(cg);
  field_opts(cg);
  seed_opt(cg);
  cg->add_option("--stat", c.stats, "moran|geary (repeatable; default both)");
  cg->add_option("--max-lag", c.max_lag, "largest lag K (default 8)");
  cg->add_option("--mode", c.mode, "undirected|direction-preserving")->transform(CLI::CheckedTransformer(modes));
  cg->add_option("--permutations", c.permutations, "permutation count")->capture_default_str();

  auto* sc = app.add_subcommand("scatter", "Moran scatterplot under row-standardized weights");
  pattern_opts(sc);
  field_opts(sc);
  weight_opts(sc);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "netlisna: error: " << one_line(e.what()) << '\n';
    return 2;
  }

  for (auto* sub : app.get_subcommands()) {
    c.command = sub->get_name();
    if (const auto* opt = sub->get_option_no_throw("--seed"); opt != nullptr && opt->count() > 0) c.seed = seed;
  }
  if (!out_dir.empty()) c.out_dir = out_dir;
  return run(c, out, err);
}

}  // namespace netlisna
