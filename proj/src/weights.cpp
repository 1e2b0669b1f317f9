#include "netlisna/weights.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "netlisna/errors.hpp"
#include "netlisna/parallel.hpp"

namespace netlisna {

WeightMatrix::WeightMatrix(std::vector<VertexId> vertex_index, std::vector<std::vector<Entry>> rows,
                           Meta meta)
    : vertex_index_(std::move(vertex_index)), rows_(std::move(rows)), meta_(meta) {
  const std::size_t n = vertex_index_.size();
  if (rows_.size() != n) throw ContractError("weight matrix row count does not match its index");
  for (std::size_t i = 0; i < n; ++i) {
    auto& r = rows_[i];
    std::sort(r.begin(), r.end());
    for (std::size_t k = 0; k < r.size(); ++k) {
      const auto [j, w] = r[k];
      if (j >= n) throw ContractError("weight matrix column out of range");
      if (j == i) throw ContractError("weight matrix diagonal must be zero");
      if (!std::isfinite(w) || w < 0.0) throw ContractError("weights must be finite and nonnegative");
      if (k > 0 && r[k - 1].first == j) throw ContractError("duplicate weight matrix entry");
    }
    std::erase_if(r, [](const Entry& e) { return e.second == 0.0; });
  }
}

WeightMatrix WeightMatrix::from_dense(std::vector<VertexId> vertex_index, std::span<const double> dense,
                                      Meta meta) {
  const std::size_t n = vertex_index.size();
  if (dense.size() != n * n) throw ContractError("dense weight array must be n x n");
  std::vector<std::vector<Entry>> rows(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double w = dense[i * n + j];
      if (i == j) {
        if (w != 0.0) throw ContractError("weight matrix diagonal must be zero");
        continue;
      }
      if (w != 0.0) rows[i].emplace_back(j, w);
    }
  }
  return WeightMatrix(std::move(vertex_index), std::move(rows), meta);
}

double WeightMatrix::at(std::size_t i, std::size_t j) const {
  const auto& r = rows_.at(i);
  auto it = std::lower_bound(r.begin(), r.end(), j,
                             [](const Entry& e, std::size_t col) { return e.first < col; });
  return (it != r.end() && it->first == j) ? it->second : 0.0;
}

double WeightMatrix::row_sum(std::size_t i) const {
  double s = 0.0;
  for (const auto& [j, w] : rows_.at(i)) s += w;
  return s;
}

double WeightMatrix::column_sum(std::size_t j) const {
  double s = 0.0;
  for (std::size_t i = 0; i < size(); ++i) s += at(i, j);
  return s;
}

double WeightMatrix::total() const {
  double s = 0.0;
  for (std::size_t i = 0; i < size(); ++i) s += row_sum(i);
  return s;
}

std::size_t WeightMatrix::nonzero_count() const {
  std::size_t c = 0;
  for (const auto& r : rows_) c += r.size();
  return c;
}

bool WeightMatrix::symmetric() const {
  for (std::size_t i = 0; i < size(); ++i) {
    for (const auto& [j, w] : rows_[i]) {
      if (at(j, i) != w) return false;
    }
  }
  return true;
}

std::vector<double> WeightMatrix::dense() const {
  const std::size_t n = size();
  std::vector<double> out(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& [j, w] : rows_[i]) out[i * n + j] = w;
  }
  return out;
}

WeightMatrix adjacency(const SpatialNetwork& net, int k, AdjacencyFlavor flavor, Traversal mode) {
  if (k < 1) throw ContractError("adjacency order k must be >= 1");
  const std::size_t n = net.vertex_count();
  std::vector<std::vector<WeightMatrix::Entry>> rows(n);
  detail::parallel_for(n, [&](std::size_t i) {
    const auto dist = hop_distances_from(net, i, mode, k);
    for (std::size_t j = 0; j < n; ++j) {
      const int d = dist[j];
      const bool hit = flavor == AdjacencyFlavor::partial ? d == k : (d >= 1 && d <= k);
      if (hit) rows[i].emplace_back(j, 1.0);
    }
  });
  std::vector<VertexId> index;
  index.reserve(n);
  for (const auto& v : net.vertices()) index.push_back(v.id);
  return WeightMatrix(std::move(index), std::move(rows), {k, flavor, mode, Standardization::binary});
}

WeightMatrix standardize(const WeightMatrix& w) {
  std::vector<std::vector<WeightMatrix::Entry>> rows(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double s = w.row_sum(i);
    for (const auto& [j, v] : w.row(i)) rows[i].emplace_back(j, v / s);
  }
  auto meta = w.meta();
  meta.standardization = Standardization::row;
  return WeightMatrix(w.vertex_index(), std::move(rows), meta);
}

WeightMatrix restrict_to(const WeightMatrix& w, std::span<const VertexId> vertices) {
  std::unordered_map<VertexId, std::size_t> old_pos;
  for (std::size_t i = 0; i < w.size(); ++i) old_pos.emplace(w.vertex_index()[i], i);
  std::unordered_map<std::size_t, std::size_t> new_pos;
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    auto it = old_pos.find(vertices[i]);
    if (it == old_pos.end()) throw LookupError("vertex not indexed by the weight matrix");
    if (!new_pos.emplace(it->second, i).second) throw ContractError("duplicate vertex in restriction");
  }
  std::vector<std::vector<WeightMatrix::Entry>> rows(vertices.size());
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    for (const auto& [j, v] : w.row(old_pos.at(vertices[i]))) {
      auto it = new_pos.find(j);
      if (it != new_pos.end()) rows[i].emplace_back(it->second, v);
    }
  }
  return WeightMatrix({vertices.begin(), vertices.end()}, std::move(rows), w.meta());
}

}  // namespace netlisna
