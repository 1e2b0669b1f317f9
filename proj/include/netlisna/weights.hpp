#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "netlisna/graph.hpp"

namespace netlisna {

enum class AdjacencyFlavor : std::uint8_t { partial, cumulative };
enum class Standardization : std::uint8_t { binary, row };

struct WeightMeta {
  int order = 1;
  AdjacencyFlavor flavor = AdjacencyFlavor::partial;
  Traversal mode = Traversal::undirected;
  Standardization standardization = Standardization::binary;
};

/// Sparse n x n nonnegative spatial weight matrix over an ordered vertex index.
/// Rows hold (column, weight) pairs sorted by column; the diagonal is always zero.
class WeightMatrix {
 public:
  using Entry = std::pair<std::size_t, double>;

  using Meta = WeightMeta;

  WeightMatrix() = default;
  /// Throws ContractError for negative or non-finite weights, diagonal
  /// entries, or out-of-range columns.
  WeightMatrix(std::vector<VertexId> vertex_index, std::vector<std::vector<Entry>> rows, Meta meta);

  /// Builds from a dense row-major n x n array, dropping zeros.
  static WeightMatrix from_dense(std::vector<VertexId> vertex_index, std::span<const double> dense,
                                 Meta meta = {});

  std::size_t size() const { return vertex_index_.size(); }
  const std::vector<VertexId>& vertex_index() const { return vertex_index_; }
  const Meta& meta() const { return meta_; }
  int order() const { return meta_.order; }
  AdjacencyFlavor flavor() const { return meta_.flavor; }
  Traversal mode() const { return meta_.mode; }
  Standardization standardization() const { return meta_.standardization; }

  std::span<const Entry> row(std::size_t i) const { return rows_.at(i); }
  double at(std::size_t i, std::size_t j) const;
  double row_sum(std::size_t i) const;
  double column_sum(std::size_t j) const;
  /// S0, the sum of all weights.
  double total() const;
  std::size_t nonzero_count() const;
  bool symmetric() const;

  /// Dense row-major copy.
  std::vector<double> dense() const;

 private:
  std::vector<VertexId> vertex_index_;
  std::vector<std::vector<Entry>> rows_;
  Meta meta_;
};

/// Binary k-order adjacency. Partial: 1 iff hop distance equals k.
/// Cumulative: 1 iff hop distance lies in [1, k]. Rows come from a BFS per
/// source truncated at depth k. Throws ContractError for k < 1.
WeightMatrix adjacency(const SpatialNetwork& net, int k, AdjacencyFlavor flavor = AdjacencyFlavor::partial,
                       Traversal mode = Traversal::undirected);

/// Divides each nonzero row by its sum; all-zero rows stay zero.
WeightMatrix standardize(const WeightMatrix& w);

/// Sub-matrix over `vertices` (rows and columns), in the given order. Throws
/// LookupError when a vertex is not indexed by `w`.
WeightMatrix restrict_to(const WeightMatrix& w, std::span<const VertexId> vertices);

}  // namespace netlisna
