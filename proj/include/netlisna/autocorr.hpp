#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "netlisna/graph.hpp"
#include "netlisna/intensity.hpp"
#include "netlisna/weights.hpp"

namespace netlisna {

/// Node-wise values (typically intensities) over an ordered vertex subset.
class NodeField {
 public:
  /// Throws ContractError unless sizes match, n >= 3, ids are distinct and
  /// values finite.
  NodeField(std::vector<VertexId> vertices, std::vector<double> values);

  /// Requires a node-level field.
  static NodeField from(const IntensityField& field);

  const std::vector<VertexId>& vertices() const { return vertices_; }
  const std::vector<double>& values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double mean() const { return mean_; }
  /// Population variance (divisor n).
  double variance() const;

 private:
  std::vector<VertexId> vertices_;
  std::vector<double> values_;
  double mean_ = 0.0;
};

/// Restricts `w` to the field's vertices, in field order. A row-standardized
/// input is re-standardized after the restriction.
WeightMatrix conform(const WeightMatrix& w, const NodeField& f);

// Statistics below require `w.vertex_index() == f.vertices()` (ContractError
// otherwise; see conform). They throw UndefinedValueError for zero variance,
// zero total weight, or a zero denominator.

/// z'Wz / S0 with z = x - mean (centered) or x'Wx / S0 (uncentered).
double lagged_autocovariance(const NodeField& f, const WeightMatrix& w, bool centered = true);
/// Centered lagged autocovariance over the population variance.
double autocorrelation(const NodeField& f, const WeightMatrix& w);
double moran_i(const NodeField& f, const WeightMatrix& w);
double geary_c(const NodeField& f, const WeightMatrix& w);
/// sum_{i!=j} w_ij x_i x_j / sum_{i!=j} x_i x_j. Requires x >= 0.
double getis_g(const NodeField& f, const WeightMatrix& w);
/// Standardized local G_i for every vertex. Requires x >= 0.
std::vector<double> getis_g_local(const NodeField& f, const WeightMatrix& w);
double getis_g_local(const NodeField& f, const WeightMatrix& w, VertexId v);

enum class Quadrant : std::uint8_t { high_high, low_low, high_low, low_high, none };
std::string_view to_string(Quadrant q);

struct LocalMoran {
  std::vector<double> values;
  std::vector<Quadrant> quadrants;
};

/// I_i = z_i / (sum_j z_j^2 / (n - 1)) * sum_j w_ij z_j, with quadrants from
/// the signs of z_i and its row-standardized spatial lag.
LocalMoran local_moran(const NodeField& f, const WeightMatrix& w);

enum class LocalGearyForm : std::uint8_t {
  weighted,  // c_i = sum_j w_ij (x_i - x_j)^2 / (sum_k z_k^2 / n)
  literal,   // unweighted double sum over raw squares; the same value for every i
};
std::vector<double> local_geary(const NodeField& f, const WeightMatrix& w,
                                LocalGearyForm form = LocalGearyForm::weighted);

struct ScatterPoint {
  VertexId vertex;
  double value = 0.0;
  double lag = 0.0;
};

struct MoranScatter {
  std::vector<ScatterPoint> points;  // vertices with a nonempty weight row
  double slope = 0.0;
  double intercept = 0.0;
};

/// Spatial lag sum_j w_ij x_j against x with the least-squares line of lag on
/// value. Requires a row-standardized matrix.
MoranScatter moran_scatter(const NodeField& f, const WeightMatrix& w);

// Inference.

enum class GlobalStatistic : std::uint8_t { moran, geary, getis, autocorrelation };
enum class LocalStatistic : std::uint8_t { moran, geary, getis };
enum class InferenceMethod : std::uint8_t { permutation, analytic_normal };

std::string_view to_string(GlobalStatistic s);
std::string_view to_string(LocalStatistic s);

struct PermutationOptions {
  std::size_t permutations = 999;
  std::uint64_t seed = 0;
};

struct AutocorrResult {
  double statistic = 0.0;
  double null_mean = 0.0;
  double null_sd = 0.0;
  double p_value = 1.0;
  InferenceMethod method = InferenceMethod::permutation;
  std::size_t permutations = 0;
  std::uint64_t seed = 0;
  int lag = 1;
};

double global_statistic(GlobalStatistic stat, const NodeField& f, const WeightMatrix& w);

/// Monte Carlo randomization test. Each permutation m draws from its own
/// stream seeded by (seed, m), so results do not depend on scheduling.
/// p = (1 + #{|s* - mean*| >= |s - mean*|}) / (M + 1), mean* the permutation
/// mean. Throws ContractError for M < 99.
AutocorrResult permutation_test(GlobalStatistic stat, const NodeField& f, const WeightMatrix& w,
                                const PermutationOptions& options);

/// Normal approximation under randomization (Moran and Geary only, n >= 4).
AutocorrResult analytic_test(GlobalStatistic stat, const NodeField& f, const WeightMatrix& w);

struct LocalResult {
  VertexId vertex;
  bool defined = true;  // false when the local statistic has a zero denominator
  double value = 0.0;
  double null_mean = 0.0;
  double null_sd = 0.0;
  double p_value = 1.0;
  Quadrant quadrant = Quadrant::none;
};

/// Conditional permutation: x_i stays fixed while its weighted partners are
/// drawn without replacement from the other n - 1 values. Vertex i uses the
/// stream seeded by (seed, i).
std::vector<LocalResult> local_permutation_test(LocalStatistic stat, const NodeField& f, const WeightMatrix& w,
                                                const PermutationOptions& options);

struct CorrelogramRow {
  int lag = 0;
  bool present = false;  // false when no vertex pair of the field sits at this lag
  AutocorrResult result;
  double p_bonferroni = 1.0;
};

/// Statistic and permutation p-value over binary partial W^(k), k = 1..max_lag,
/// with p_bonferroni = min(1, max_lag * p).
std::vector<CorrelogramRow> correlogram(const NodeField& f, const SpatialNetwork& net, GlobalStatistic stat,
                                        int max_lag, const PermutationOptions& options,
                                        Traversal mode = Traversal::undirected);

}  // namespace netlisna
