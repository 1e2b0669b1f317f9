#include "netlisna/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <system_error>
#include <unordered_map>
#include <unordered_set>

#include "netlisna/errors.hpp"

namespace netlisna {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) v = 0.0;  // drop the sign of negative zero
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

struct CsvRow {
  std::size_t line = 0;
  std::vector<std::string> fields;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<CsvRow> rows;
};

[[noreturn]] void fail(std::string_view source, std::size_t line, std::string_view what) {
  std::ostringstream msg;
  msg << source << ":" << line << ": " << what;
  throw InputError(msg.str());
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

// RFC 4180 style: fields may be double-quoted, with "" as an escaped quote.
// Quoted fields may not span lines.
std::vector<std::string> split_record(std::string_view line, std::string_view source, std::size_t lineno) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (true) {
    std::string field;
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    if (i < line.size() && line[i] == '"') {
      ++i;
      bool closed = false;
      while (i < line.size()) {
        if (line[i] == '"') {
          if (i + 1 < line.size() && line[i + 1] == '"') {
            field += '"';
            i += 2;
            continue;
          }
          ++i;
          closed = true;
          break;
        }
        field += line[i++];
      }
      if (!closed) fail(source, lineno, "unterminated quoted field");
      while (i < line.size() && line[i] != ',') {
        if (line[i] != ' ' && line[i] != '\t' && line[i] != '\r') fail(source, lineno, "text after quoted field");
        ++i;
      }
    } else {
      const std::size_t start = i;
      while (i < line.size() && line[i] != ',') ++i;
      field = std::string(trim(line.substr(start, i - start)));
    }
    out.push_back(std::move(field));
    if (i >= line.size()) break;
    ++i;  // comma
  }
  return out;
}

CsvTable read_csv(std::string_view text, std::string_view source) {
  CsvTable table;
  std::size_t lineno = 0;
  std::size_t pos = 0;
  bool have_header = false;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++lineno;
    if (lineno == 1 && line.starts_with("\xEF\xBB\xBF")) line.remove_prefix(3);
    if (trim(line).empty()) {
      if (end == text.size()) break;
      continue;
    }
    auto fields = split_record(line, source, lineno);
    if (!have_header) {
      table.header = std::move(fields);
      have_header = true;
    } else {
      table.rows.push_back({lineno, std::move(fields)});
    }
    if (end == text.size()) break;
  }
  if (!have_header) fail(source, 1, "missing header");
  return table;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Columns {
 public:
  Columns(const CsvTable& t, std::string_view source) : source_(source), width_(t.header.size()) {
    for (std::size_t i = 0; i < t.header.size(); ++i) {
      if (!index_.emplace(t.header[i], i).second) fail(source, 1, "duplicate column '" + t.header[i] + "'");
    }
  }

  std::optional<std::size_t> find(const std::string& name) const {
    const auto it = index_.find(name);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t require(const std::string& name) const {
    const auto i = find(name);
    if (!i) fail(source_, 1, "missing column '" + name + "'");
    return *i;
  }

  void check_width(const CsvRow& row) const {
    if (row.fields.size() != width_) {
      std::ostringstream msg;
      msg << "expected " << width_ << " fields, found " << row.fields.size();
      fail(source_, row.line, msg.str());
    }
  }

 private:
  std::string_view source_;
  std::size_t width_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

double parse_real(std::string_view source, const CsvRow& row, std::size_t col, std::string_view what) {
  const std::string_view s = row.fields[col];
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size() || !std::isfinite(v)) {
    fail(source, row.line, std::string(what) + " is not a finite number: '" + std::string(s) + "'");
  }
  return v;
}

std::int64_t parse_int(std::string_view source, const CsvRow& row, std::size_t col, std::string_view what) {
  std::string_view s = row.fields[col];
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  std::int64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    fail(source, row.line, std::string(what) + " is not an integer: '" + row.fields[col] + "'");
  }
  return v;
}

std::string quote(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos && trim(s) == s) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

SpatialNetwork parse_network(std::string_view nodes_csv, std::string_view edges_csv, std::string_view nodes_name,
                             std::string_view edges_name) {
  const auto nodes = read_csv(nodes_csv, nodes_name);
  const Columns nc(nodes, nodes_name);
  const auto c_id = nc.require("id");
  const auto c_x = nc.require("x");
  const auto c_y = nc.require("y");

  std::vector<Vertex> vertices;
  std::unordered_map<std::int64_t, std::size_t> vertex_line;
  for (const auto& row : nodes.rows) {
    nc.check_width(row);
    const auto id = parse_int(nodes_name, row, c_id, "id");
    if (!vertex_line.emplace(id, row.line).second) {
      fail(nodes_name, row.line, "duplicate vertex id " + std::to_string(id));
    }
    vertices.push_back({VertexId{id}, parse_real(nodes_name, row, c_x, "x"), parse_real(nodes_name, row, c_y, "y")});
  }

  const auto edges = read_csv(edges_csv, edges_name);
  const Columns ec(edges, edges_name);
  const auto e_id = ec.require("id");
  const auto e_tail = ec.require("tail");
  const auto e_head = ec.require("head");
  const auto e_dir = ec.require("directed");
  const auto e_len = ec.find("length");

  std::vector<EdgeSpec> specs;
  std::unordered_set<std::int64_t> edge_ids;
  std::set<std::pair<std::int64_t, std::int64_t>> pairs;
  for (const auto& row : edges.rows) {
    ec.check_width(row);
    const auto id = parse_int(edges_name, row, e_id, "id");
    if (!edge_ids.insert(id).second) fail(edges_name, row.line, "duplicate edge id " + std::to_string(id));
    const auto tail = parse_int(edges_name, row, e_tail, "tail");
    const auto head = parse_int(edges_name, row, e_head, "head");
    for (const auto v : {tail, head}) {
      if (!vertex_line.contains(v)) fail(edges_name, row.line, "edge references unknown vertex " + std::to_string(v));
    }
    if (tail == head) fail(edges_name, row.line, "self-loop at vertex " + std::to_string(tail));
    if (!pairs.insert({std::min(tail, head), std::max(tail, head)}).second) {
      fail(edges_name, row.line,
           "duplicate vertex pair (" + std::to_string(tail) + ", " + std::to_string(head) + ")");
    }
    const auto& dir = row.fields[e_dir];
    if (dir != "0" && dir != "1") fail(edges_name, row.line, "directed must be 0 or 1, got '" + dir + "'");
    EdgeSpec spec{EdgeId{id}, VertexId{tail}, VertexId{head},
                  dir == "1" ? Orientation::directed : Orientation::undirected, std::nullopt};
    if (e_len && !row.fields[*e_len].empty()) {
      const double len = parse_real(edges_name, row, *e_len, "length");
      if (len <= 0.0) fail(edges_name, row.line, "length must be positive");
      spec.length = len;
    }
    specs.push_back(spec);
  }
  return SpatialNetwork(std::move(vertices), std::move(specs));
}

SpatialNetwork load_network(const std::filesystem::path& nodes, const std::filesystem::path& edges) {
  return parse_network(read_file(nodes), read_file(edges), nodes.string(), edges.string());
}

std::string summary_line(const SpatialNetwork& net) {
  std::ostringstream os;
  os << "nodes=" << net.vertex_count() << " edges=" << net.edge_count() << " kind=" << to_string(net.kind())
     << " mean_cg_degree=" << format_double(mean_cg_degree(net));
  return os.str();
}

std::vector<Event> parse_events(std::string_view csv, std::string_view name) {
  const auto table = read_csv(csv, name);
  const Columns cols(table, name);
  const auto cx = cols.require("x");
  const auto cy = cols.require("y");
  const auto crep = cols.find("replicate");
  const auto cmark = cols.find("mark");
  std::vector<Event> out;
  out.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    cols.check_width(row);
    Event ev{parse_real(name, row, cx, "x"), parse_real(name, row, cy, "y"), 0, std::nullopt};
    if (crep && !row.fields[*crep].empty()) ev.replicate = parse_int(name, row, *crep, "replicate");
    if (cmark && !row.fields[*cmark].empty()) ev.mark = row.fields[*cmark];
    out.push_back(std::move(ev));
  }
  return out;
}

std::vector<Event> load_events(const std::filesystem::path& path) { return parse_events(read_file(path), path.string()); }

void write_events(std::ostream& os, std::span<const Event> events) {
  bool marked = false;
  for (const auto& ev : events) marked = marked || ev.mark.has_value();
  os << "x,y,replicate" << (marked ? ",mark" : "") << '\n';
  for (const auto& ev : events) {
    os << format_double(ev.x) << ',' << format_double(ev.y) << ',' << ev.replicate;
    if (marked) os << ',' << (ev.mark ? quote(*ev.mark) : std::string());
    os << '\n';
  }
}

void save_events(const std::filesystem::path& path, std::span<const Event> events) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  write_events(out, events);
}

std::vector<std::pair<EdgeId, double>> parse_edge_rates(std::string_view csv, std::string_view name) {
  const auto table = read_csv(csv, name);
  const Columns cols(table, name);
  const auto ce = cols.require("edge");
  const auto cr = cols.require("rate");
  std::vector<std::pair<EdgeId, double>> out;
  for (const auto& row : table.rows) {
    cols.check_width(row);
    const double rate = parse_real(name, row, cr, "rate");
    if (rate < 0.0) fail(name, row.line, "rate must be nonnegative");
    out.emplace_back(EdgeId{parse_int(name, row, ce, "edge")}, rate);
  }
  return out;
}

void write_snap_report(std::ostream& os, const SnappedPattern& p) {
  os << "event,edge,distance,accepted\n";
  for (const auto& r : p.snap_report()) {
    os << r.event_index << ',';
    if (r.edge) os << r.edge->value;
    os << ',' << format_double(r.distance) << ',' << (r.accepted ? 1 : 0) << '\n';
  }
}

void write_intensity(std::ostream& os, const IntensityField& f) {
  os << "entity_id,level,replicate,value\n";
  const std::string rep = f.replicate ? std::to_string(*f.replicate) : std::string("all");
  for (std::size_t i = 0; i < f.size(); ++i) {
    os << f.entity_ids[i] << ',' << to_string(f.level) << ',' << rep << ',' << format_double(f.values[i]) << '\n';
  }
}

void write_second_order(std::ostream& os, std::span<const PairRow> rows) {
  os << "a,b,lambda2,gamma,n_replicates,degenerate\n";
  for (const auto& r : rows) {
    os << quote(r.a) << ',' << quote(r.b) << ',' << format_double(r.result.lambda2) << ','
       << format_double(r.result.gamma) << ',' << r.result.n_replicates << ',' << (r.result.degenerate ? 1 : 0)
       << '\n';
  }
}

void write_lag_second_order(std::ostream& os, std::span<const LagSecondOrderResult> rows) {
  os << "lag,lambda2,gamma,pair_count,n_replicates\n";
  for (const auto& r : rows) {
    os << r.lag << ',' << format_double(r.lambda2) << ',' << format_double(r.gamma) << ',' << r.pair_count << ','
       << r.n_replicates << '\n';
  }
}

void write_weights(std::ostream& os, const WeightMatrix& w) {
  const auto& ids = w.vertex_index();
  os << "vertex";
  for (const auto v : ids) os << ',' << v.value;
  os << '\n';
  const auto dense = w.dense();
  const std::size_t n = ids.size();
  for (std::size_t i = 0; i < n; ++i) {
    os << ids[i].value;
    for (std::size_t j = 0; j < n; ++j) os << ',' << format_double(dense[i * n + j]);
    os << '\n';
  }
}

void write_results(std::ostream& os, std::span<const ResultRow> rows) {
  os << "statistic,lag,value,null_mean,null_sd,p,p_adjusted,M,seed\n";
  for (const auto& r : rows) {
    const auto& a = r.result;
    os << r.statistic << ',' << a.lag << ',' << format_double(a.statistic) << ',' << format_double(a.null_mean) << ','
       << format_double(a.null_sd) << ',' << format_double(a.p_value) << ',' << format_double(r.p_adjusted) << ','
       << a.permutations << ',';
    if (a.method == InferenceMethod::permutation) os << a.seed;
    os << '\n';
  }
}

void write_local(std::ostream& os, std::span<const LocalResult> rows) {
  os << "vertex,value,quadrant,p\n";
  for (const auto& r : rows) {
    os << r.vertex.value << ',';
    if (r.defined) os << format_double(r.value);
    os << ',';
    if (r.defined) os << to_string(r.quadrant);
    os << ',';
    if (r.defined) os << format_double(r.p_value);
    os << '\n';
  }
}

void write_scatter(std::ostream& os, const MoranScatter& s) {
  os << "vertex,x,lag\n";
  for (const auto& pt : s.points) {
    os << pt.vertex.value << ',' << format_double(pt.value) << ',' << format_double(pt.lag) << '\n';
  }
}

void write_geojson(std::ostream& os, const SpatialNetwork& net, std::span<const LocalResult> rows) {
  // Serialized by hand so numbers use the same round-trip formatting as CSV.
  os << "{\"type\":\"FeatureCollection\",\"features\":[";
  bool first = true;
  for (const auto& r : rows) {
    const auto& v = net.vertex(r.vertex);
    const std::string quadrant = "\"" + std::string(to_string(r.quadrant)) + "\"";
    os << (first ? "" : ",") << "\n{\"type\":\"Feature\",\"geometry\":{\"type\":\"Point\",\"coordinates\":["
       << format_double(v.x) << ',' << format_double(v.y) << "]},\"properties\":{\"vertex\":" << r.vertex.value
       << ",\"value\":" << (r.defined ? format_double(r.value) : "null")
       << ",\"quadrant\":" << (r.defined ? quadrant : "null")
       << ",\"p\":" << (r.defined ? format_double(r.p_value) : "null") << "}}";
    first = false;
  }
  os << "\n]}\n";
}

}  // namespace netlisna
