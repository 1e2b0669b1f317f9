#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <ostream>

namespace netlisna {

/// Tagged integer identifier. Vertex and edge ids share a representation but
/// are not interchangeable.
template <class Tag>
struct Id {
  std::int64_t value{};

  constexpr Id() = default;
  constexpr explicit Id(std::int64_t v) : value(v) {}

  friend constexpr auto operator<=>(Id, Id) = default;
  friend std::ostream& operator<<(std::ostream& os, Id id) { return os << id.value; }
};

using VertexId = Id<struct VertexTag>;
using EdgeId = Id<struct EdgeTag>;

/// Replicate index of a pattern (time slice or simulation run).
using Replicate = std::int64_t;

enum class Orientation : std::uint8_t { undirected, directed };

enum class NetworkKind : std::uint8_t { undirected, directed, partially_directed };

/// Which edges a walk may use. `direction_preserving` follows arcs tail to
/// head only; undirected edges stay traversable both ways.
enum class Traversal : std::uint8_t { undirected, direction_preserving };

}  // namespace netlisna

template <class Tag>
struct std::hash<netlisna::Id<Tag>> {
  std::size_t operator()(netlisna::Id<Tag> id) const noexcept {
    return std::hash<std::int64_t>{}(id.value);
  }
};
