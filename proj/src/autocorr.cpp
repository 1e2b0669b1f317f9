#include "netlisna/autocorr.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include "netlisna/errors.hpp"
#include "netlisna/parallel.hpp"
#include "netlisna/random.hpp"

namespace netlisna {

NodeField::NodeField(std::vector<VertexId> vertices, std::vector<double> values)
    : vertices_(std::move(vertices)), values_(std::move(values)) {
  if (vertices_.size() != values_.size()) throw ContractError("node field ids and values differ in length");
  if (values_.size() < 3) throw ContractError("node statistics need at least 3 vertices");
  std::unordered_set<VertexId> seen;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) throw ContractError("node field values must be finite");
    if (!seen.insert(vertices_[i]).second) throw ContractError("duplicate vertex in node field");
  }
  mean_ = std::accumulate(values_.begin(), values_.end(), 0.0) / static_cast<double>(values_.size());
}

NodeField NodeField::from(const IntensityField& field) {
  if (!is_node_level(field.level)) throw ContractError("node field needs a node-level intensity field");
  std::vector<VertexId> ids;
  ids.reserve(field.entity_ids.size());
  for (auto id : field.entity_ids) ids.emplace_back(id);
  return NodeField(std::move(ids), field.values);
}

double NodeField::variance() const {
  double s = 0.0;
  for (double x : values_) s += (x - mean_) * (x - mean_);
  return s / static_cast<double>(values_.size());
}

WeightMatrix conform(const WeightMatrix& w, const NodeField& f) {
  auto out = restrict_to(w, f.vertices());
  return w.standardization() == Standardization::row ? standardize(out) : out;
}

namespace {

void require_conformable(const NodeField& f, const WeightMatrix& w) {
  if (w.vertex_index() != f.vertices()) {
    throw ContractError("weight matrix index does not match the node field; use conform()");
  }
}

std::vector<double> centered(std::span<const double> x) {
  const double m = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  std::vector<double> z(x.begin(), x.end());
  for (double& v : z) v -= m;
  return z;
}

double sum_squares(std::span<const double> z) {
  double s = 0.0;
  for (double v : z) s += v * v;
  return s;
}

// sum_ij w_ij a_i b_j
double bilinear(const WeightMatrix& w, std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    double row = 0.0;
    for (const auto& [j, wij] : w.row(i)) row += wij * b[j];
    s += a[i] * row;
  }
  return s;
}

double require_total(const WeightMatrix& w) {
  const double s0 = w.total();
  if (s0 <= 0.0) throw UndefinedValueError("weight matrix has zero total weight");
  return s0;
}

double require_spread(std::span<const double> z) {
  const double ss = sum_squares(z);
  if (ss <= 0.0) throw UndefinedValueError("field has zero variance");
  return ss;
}

void require_nonnegative(const NodeField& f) {
  for (double x : f.values()) {
    if (x < 0.0) throw ContractError("G statistics require nonnegative values");
  }
}

// Kernels operate on raw value vectors so permutation loops can reuse them.

double moran_kernel(std::span<const double> x, const WeightMatrix& w, double s0) {
  const auto z = centered(x);
  const double ss = require_spread(z);
  return static_cast<double>(x.size()) / s0 * bilinear(w, z, z) / ss;
}

double geary_kernel(std::span<const double> x, const WeightMatrix& w, double s0) {
  const auto z = centered(x);
  const double ss = require_spread(z);
  double num = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    for (const auto& [j, wij] : w.row(i)) num += wij * (x[i] - x[j]) * (x[i] - x[j]);
  }
  return static_cast<double>(x.size() - 1) / (2.0 * s0) * num / ss;
}

double getis_kernel(std::span<const double> x, const WeightMatrix& w) {
  double sum = 0.0;
  double sum_sq = 0.0;
  for (double v : x) {
    sum += v;
    sum_sq += v * v;
  }
  const double den = sum * sum - sum_sq;
  if (den <= 0.0) throw UndefinedValueError("global G denominator is zero");
  return bilinear(w, x, x) / den;
}

double autocorrelation_kernel(std::span<const double> x, const WeightMatrix& w, double s0) {
  const auto z = centered(x);
  const double var = require_spread(z) / static_cast<double>(x.size());
  return bilinear(w, z, z) / s0 / var;
}

// Per-vertex constants of the standardized local G.
struct LocalG {
  double mean = 0.0;
  double sd = 0.0;
  std::vector<double> row_sum;
  std::vector<double> denom;  // 0 marks an undefined vertex
};

LocalG local_g_setup(std::span<const double> x, const WeightMatrix& w) {
  const double n = static_cast<double>(x.size());
  LocalG g;
  g.mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double sq = 0.0;
  for (double v : x) sq += v * v;
  g.sd = std::sqrt(std::max(0.0, sq / n - g.mean * g.mean));
  g.row_sum.resize(x.size());
  g.denom.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    double s = 0.0;
    double s2 = 0.0;
    for (const auto& [j, wij] : w.row(i)) {
      s += wij;
      s2 += wij * wij;
    }
    g.row_sum[i] = s;
    const double spread = (n * s2 - s * s) / (n - 1.0);
    g.denom[i] = spread > 0.0 ? g.sd * std::sqrt(spread) : 0.0;
  }
  return g;
}

}  // namespace

double lagged_autocovariance(const NodeField& f, const WeightMatrix& w, bool centered_form) {
  require_conformable(f, w);
  const double s0 = require_total(w);
  if (!centered_form) return bilinear(w, f.values(), f.values()) / s0;
  const auto z = centered(f.values());
  return bilinear(w, z, z) / s0;
}

double autocorrelation(const NodeField& f, const WeightMatrix& w) {
  require_conformable(f, w);
  return autocorrelation_kernel(f.values(), w, require_total(w));
}

double moran_i(const NodeField& f, const WeightMatrix& w) {
  require_conformable(f, w);
  return moran_kernel(f.values(), w, require_total(w));
}

double geary_c(const NodeField& f, const WeightMatrix& w) {
  require_conformable(f, w);
  return geary_kernel(f.values(), w, require_total(w));
}

double getis_g(const NodeField& f, const WeightMatrix& w) {
  require_conformable(f, w);
  require_nonnegative(f);
  return getis_kernel(f.values(), w);
}

namespace {

double local_g_at(const NodeField& f, const WeightMatrix& w, const LocalG& g, std::size_t i) {
  if (g.denom[i] <= 0.0) {
    std::ostringstream msg;
    msg << "local G undefined at vertex " << f.vertices()[i] << " (zero denominator)";
    throw UndefinedValueError(msg.str());
  }
  double lag = 0.0;
  for (const auto& [j, wij] : w.row(i)) lag += wij * f.values()[j];
  return (lag - g.mean * g.row_sum[i]) / g.denom[i];
}

}  // namespace

std::vector<double> getis_g_local(const NodeField& f, const WeightMatrix& w) {
  require_conformable(f, w);
  require_nonnegative(f);
  const auto g = local_g_setup(f.values(), w);
  std::vector<double> out(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = local_g_at(f, w, g, i);
  return out;
}

double getis_g_local(const NodeField& f, const WeightMatrix& w, VertexId v) {
  require_conformable(f, w);
  require_nonnegative(f);
  const auto it = std::find(f.vertices().begin(), f.vertices().end(), v);
  if (it == f.vertices().end()) throw LookupError("vertex not in node field");
  return local_g_at(f, w, local_g_setup(f.values(), w), static_cast<std::size_t>(it - f.vertices().begin()));
}

std::string_view to_string(Quadrant q) {
  switch (q) {
    case Quadrant::high_high:
      return "high-high";
    case Quadrant::low_low:
      return "low-low";
    case Quadrant::high_low:
      return "high-low";
    case Quadrant::low_high:
      return "low-high";
    case Quadrant::none:
      return "none";
  }
  return "none";
}

namespace {

Quadrant classify(double z, double lag) {
  if (z == 0.0 || lag == 0.0) return Quadrant::none;
  if (z > 0.0) return lag > 0.0 ? Quadrant::high_high : Quadrant::high_low;
  return lag > 0.0 ? Quadrant::low_high : Quadrant::low_low;
}

}  // namespace

LocalMoran local_moran(const NodeField& f, const WeightMatrix& w) {
  require_conformable(f, w);
  const auto z = centered(f.values());
  const double scale = require_spread(z) / static_cast<double>(z.size() - 1);
  LocalMoran out;
  out.values.resize(z.size());
  out.quadrants.resize(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    double lag = 0.0;
    double row = 0.0;
    for (const auto& [j, wij] : w.row(i)) {
      lag += wij * z[j];
      row += wij;
    }
    out.values[i] = z[i] / scale * lag;
    out.quadrants[i] = row > 0.0 ? classify(z[i], lag / row) : Quadrant::none;
  }
  return out;
}

std::vector<double> local_geary(const NodeField& f, const WeightMatrix& w, LocalGearyForm form) {
  require_conformable(f, w);
  const auto& x = f.values();
  const auto z = centered(x);
  const double ss = require_spread(z);
  const double n = static_cast<double>(x.size());
  std::vector<double> out(x.size());
  if (form == LocalGearyForm::literal) {
    const double raw_sq = sum_squares(x);
    if (raw_sq <= 0.0) throw UndefinedValueError("literal local Geary needs a nonzero field");
    double pair_sum = 0.0;
    for (double xi : x) {
      for (double xj : x) pair_sum += (xi - xj) * (xi - xj);
    }
    std::fill(out.begin(), out.end(), 1.0 / (raw_sq / n) * pair_sum / raw_sq);
    return out;
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    double s = 0.0;
    for (const auto& [j, wij] : w.row(i)) s += wij * (x[i] - x[j]) * (x[i] - x[j]);
    out[i] = s / (ss / n);
  }
  return out;
}

MoranScatter moran_scatter(const NodeField& f, const WeightMatrix& w) {
  require_conformable(f, w);
  if (w.standardization() != Standardization::row) {
    throw ContractError("Moran scatterplot needs a row-standardized weight matrix");
  }
  const auto& x = f.values();
  MoranScatter out;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (w.row(i).empty()) continue;
    double lag = 0.0;
    for (const auto& [j, wij] : w.row(i)) lag += wij * x[j];
    out.points.push_back({f.vertices()[i], x[i], lag});
  }
  if (out.points.size() < 2) throw UndefinedValueError("scatterplot needs at least two vertices with neighbours");
  double mx = 0.0;
  double my = 0.0;
  for (const auto& p : out.points) {
    mx += p.value;
    my += p.lag;
  }
  mx /= static_cast<double>(out.points.size());
  my /= static_cast<double>(out.points.size());
  double sxy = 0.0;
  double sxx = 0.0;
  for (const auto& p : out.points) {
    sxy += (p.value - mx) * (p.lag - my);
    sxx += (p.value - mx) * (p.value - mx);
  }
  if (sxx <= 0.0) throw UndefinedValueError("scatterplot values have zero variance");
  out.slope = sxy / sxx;
  out.intercept = my - out.slope * mx;
  return out;
}

std::string_view to_string(GlobalStatistic s) {
  switch (s) {
    case GlobalStatistic::moran:
      return "moran";
    case GlobalStatistic::geary:
      return "geary";
    case GlobalStatistic::getis:
      return "getis";
    case GlobalStatistic::autocorrelation:
      return "autocorrelation";
  }
  return "unknown";
}

std::string_view to_string(LocalStatistic s) {
  switch (s) {
    case LocalStatistic::moran:
      return "local_moran";
    case LocalStatistic::geary:
      return "local_geary";
    case LocalStatistic::getis:
      return "local_getis";
  }
  return "unknown";
}

double global_statistic(GlobalStatistic stat, const NodeField& f, const WeightMatrix& w) {
  switch (stat) {
    case GlobalStatistic::moran:
      return moran_i(f, w);
    case GlobalStatistic::geary:
      return geary_c(f, w);
    case GlobalStatistic::getis:
      return getis_g(f, w);
    case GlobalStatistic::autocorrelation:
      return autocorrelation(f, w);
  }
  throw ContractError("unknown statistic");
}

namespace {

struct NullSummary {
  double mean = 0.0;
  double sd = 0.0;
  double p = 1.0;
};

NullSummary summarize(double observed, std::span<const double> null_draws) {
  const double m = static_cast<double>(null_draws.size());
  NullSummary s;
  s.mean = std::accumulate(null_draws.begin(), null_draws.end(), 0.0) / m;
  double var = 0.0;
  for (double v : null_draws) var += (v - s.mean) * (v - s.mean);
  s.sd = null_draws.size() > 1 ? std::sqrt(var / (m - 1.0)) : 0.0;
  const double dev = std::abs(observed - s.mean);
  std::size_t extreme = 0;
  for (double v : null_draws) {
    // Relative slack so draws numerically equal to the observation count as extreme.
    if (std::abs(v - s.mean) >= dev * (1.0 - 1e-12)) ++extreme;
  }
  s.p = static_cast<double>(1 + extreme) / (m + 1.0);
  return s;
}

void require_permutations(const PermutationOptions& options) {
  if (options.permutations < 99) throw ContractError("permutation count must be >= 99");
}

}  // namespace

AutocorrResult permutation_test(GlobalStatistic stat, const NodeField& f, const WeightMatrix& w,
                                const PermutationOptions& options) {
  require_permutations(options);
  AutocorrResult res;
  res.statistic = global_statistic(stat, f, w);
  res.method = InferenceMethod::permutation;
  res.permutations = options.permutations;
  res.seed = options.seed;
  res.lag = w.order();

  const double s0 = w.total();
  std::vector<double> draws(options.permutations);
  detail::parallel_for(options.permutations, [&](std::size_t m) {
    auto rng = make_stream(options.seed, m);
    std::vector<double> x = f.values();
    std::shuffle(x.begin(), x.end(), rng);
    switch (stat) {
      case GlobalStatistic::moran:
        draws[m] = moran_kernel(x, w, s0);
        break;
      case GlobalStatistic::geary:
        draws[m] = geary_kernel(x, w, s0);
        break;
      case GlobalStatistic::getis:
        draws[m] = getis_kernel(x, w);
        break;
      case GlobalStatistic::autocorrelation:
        draws[m] = autocorrelation_kernel(x, w, s0);
        break;
    }
  }, 64);
  const auto s = summarize(res.statistic, draws);
  res.null_mean = s.mean;
  res.null_sd = s.sd;
  res.p_value = s.p;
  return res;
}

AutocorrResult analytic_test(GlobalStatistic stat, const NodeField& f, const WeightMatrix& w) {
  if (stat != GlobalStatistic::moran && stat != GlobalStatistic::geary) {
    throw ContractError("analytic inference is available for Moran's I and Geary's C only");
  }
  require_conformable(f, w);
  const std::size_t count = f.size();
  if (count < 4) throw ContractError("analytic moments need n >= 4");
  const double n = static_cast<double>(count);
  const double s0 = require_total(w);
  // S1 = 1/2 sum over ordered pairs of (w_ij + w_ji)^2. Row i covers (i, j);
  // the mirrored pair (j, i) is only reached from row j when w_ji > 0.
  double s1 = 0.0;
  double s2 = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    for (const auto& [j, wij] : w.row(i)) {
      const double wji = w.at(j, i);
      s1 += (wij + wji) * (wij + wji);
      if (wji == 0.0) s1 += wij * wij;
    }
    s2 += std::pow(w.row_sum(i) + w.column_sum(i), 2);
  }
  s1 *= 0.5;

  const auto z = centered(f.values());
  const double m2 = require_spread(z) / n;
  double m4 = 0.0;
  for (double v : z) m4 += v * v * v * v;
  m4 /= n;
  const double kurt = m4 / (m2 * m2);
  const double s02 = s0 * s0;

  AutocorrResult res;
  res.method = InferenceMethod::analytic_normal;
  res.lag = w.order();
  double expected = 0.0;
  double variance = 0.0;
  if (stat == GlobalStatistic::moran) {
    res.statistic = moran_i(f, w);
    expected = -1.0 / (n - 1.0);
    const double a = n * ((n * n - 3.0 * n + 3.0) * s1 - n * s2 + 3.0 * s02);
    const double b = kurt * ((n * n - n) * s1 - 2.0 * n * s2 + 6.0 * s02);
    variance = (a - b) / ((n - 1.0) * (n - 2.0) * (n - 3.0) * s02) - expected * expected;
  } else {
    res.statistic = geary_c(f, w);
    expected = 1.0;
    variance = (n - 1.0) * s1 * (n * n - 3.0 * n + 3.0 - (n - 1.0) * kurt);
    variance -= (n - 1.0) * s2 * (n * n + 3.0 * n - 6.0 - (n * n - n + 2.0) * kurt) / 4.0;
    variance += s02 * (n * n - 3.0 - (n - 1.0) * (n - 1.0) * kurt);
    variance /= n * (n - 2.0) * (n - 3.0) * s02;
  }
  if (!(variance > 0.0)) throw UndefinedValueError("analytic null variance is not positive");
  res.null_mean = expected;
  res.null_sd = std::sqrt(variance);
  const double score = (res.statistic - expected) / res.null_sd;
  res.p_value = std::erfc(std::abs(score) / std::sqrt(2.0));
  return res;
}

std::vector<LocalResult> local_permutation_test(LocalStatistic stat, const NodeField& f, const WeightMatrix& w,
                                                const PermutationOptions& options) {
  require_permutations(options);
  require_conformable(f, w);
  const auto& x = f.values();
  const std::size_t n = x.size();
  const auto z = centered(x);
  const double ss = require_spread(z);

  std::vector<double> observed(n, 0.0);
  std::vector<Quadrant> quadrants(n, Quadrant::none);
  std::vector<bool> defined(n, true);
  LocalG g;
  switch (stat) {
    case LocalStatistic::moran: {
      auto lm = local_moran(f, w);
      observed = std::move(lm.values);
      quadrants = std::move(lm.quadrants);
      break;
    }
    case LocalStatistic::geary:
      observed = local_geary(f, w);
      break;
    case LocalStatistic::getis:
      require_nonnegative(f);
      g = local_g_setup(x, w);
      for (std::size_t i = 0; i < n; ++i) {
        defined[i] = g.denom[i] > 0.0;
        if (defined[i]) observed[i] = local_g_at(f, w, g, i);
      }
      break;
  }

  // Local value of vertex i given partner values drawn at `picks`.
  auto local_value = [&](std::size_t i, std::span<const std::size_t> picks) {
    const auto row = w.row(i);
    double s = 0.0;
    switch (stat) {
      case LocalStatistic::moran:
        for (std::size_t k = 0; k < row.size(); ++k) s += row[k].second * z[picks[k]];
        return z[i] / (ss / static_cast<double>(n - 1)) * s;
      case LocalStatistic::geary:
        for (std::size_t k = 0; k < row.size(); ++k) {
          const double d = x[i] - x[picks[k]];
          s += row[k].second * d * d;
        }
        return s / (ss / static_cast<double>(n));
      case LocalStatistic::getis:
        for (std::size_t k = 0; k < row.size(); ++k) s += row[k].second * x[picks[k]];
        return (s - g.mean * g.row_sum[i]) / g.denom[i];
    }
    return 0.0;
  };

  std::vector<LocalResult> out(n);
  detail::parallel_for(n, [&](std::size_t i) {
    auto& res = out[i];
    res.vertex = f.vertices()[i];
    res.defined = defined[i];
    res.quadrant = quadrants[i];
    res.value = observed[i];
    if (!defined[i]) return;
    auto rng = make_stream(options.seed, i);
    std::vector<std::size_t> pool;
    pool.reserve(n - 1);
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) pool.push_back(j);
    }
    const std::size_t k = w.row(i).size();
    std::vector<double> draws(options.permutations);
    for (auto& d : draws) {
      // Partial Fisher-Yates: the first k slots of the pool become the draw.
      for (std::size_t s = 0; s < k; ++s) {
        std::uniform_int_distribution<std::size_t> pick(s, pool.size() - 1);
        std::swap(pool[s], pool[pick(rng)]);
      }
      d = local_value(i, std::span<const std::size_t>(pool.data(), k));
    }
    const auto s = summarize(observed[i], draws);
    res.null_mean = s.mean;
    res.null_sd = s.sd;
    res.p_value = s.p;
  }, 4);
  return out;
}

std::vector<CorrelogramRow> correlogram(const NodeField& f, const SpatialNetwork& net, GlobalStatistic stat,
                                        int max_lag, const PermutationOptions& options, Traversal mode) {
  if (max_lag < 1) throw ContractError("correlogram needs max_lag >= 1");
  std::vector<CorrelogramRow> rows;
  for (int k = 1; k <= max_lag; ++k) {
    CorrelogramRow row;
    row.lag = k;
    const auto w = restrict_to(adjacency(net, k, AdjacencyFlavor::partial, mode), f.vertices());
    if (w.total() <= 0.0) {
      rows.push_back(row);
      continue;
    }
    row.present = true;
    row.result = permutation_test(stat, f, w, options);
    row.p_bonferroni = std::min(1.0, static_cast<double>(max_lag) * row.result.p_value);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace netlisna
