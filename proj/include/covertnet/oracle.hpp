#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

#include "covertnet/geometry.hpp"

namespace covertnet {

/// Node positions of one network snapshot.
struct Topology {
  std::vector<Point2> positions;

  std::size_t size() const noexcept { return positions.size(); }
  bool has_duplicates() const;
  bool operator==(const Topology&) const = default;
};

enum class RadiusSource { brute_force, mst, local_search, model_prediction, repaired };

std::string_view to_string(RadiusSource s) noexcept;
RadiusSource radius_source_from_string(std::string_view s);

/// Per-node coverage radii in meters.
struct RadiusAssignment {
  std::vector<double> radii;
  RadiusSource source = RadiusSource::model_prediction;

  std::size_t size() const noexcept { return radii.size(); }
  bool operator==(const RadiusAssignment&) const = default;
};

using Edge = std::pair<std::size_t, std::size_t>;

/// Edge list of a spanning tree; every edge stored with first < second.
struct SpanningTree {
  std::vector<Edge> edges;
};

/// How solvers measure the union area of a candidate assignment.
struct AreaConfig {
  AreaMethod method = AreaMethod::grid;
  std::uint64_t samples = 1u << 16;
  std::uint64_t seed = 0;
};

AreaEstimate assignment_area(const Topology& topo, std::span<const double> radii, const AreaConfig& cfg);

/// Kruskal over the complete Euclidean graph, ties broken by lowest (i, j).
SpanningTree mst(const Topology& topo);

/// Minimum spanning tree of an explicit distance matrix (same tie rule).
SpanningTree mst(const DistanceMatrix& dist);

bool is_spanning_tree(const SpanningTree& tree, std::size_t n);

/// Each node reaches its farthest tree neighbour.
RadiusAssignment radii_from_tree(const Topology& topo, const SpanningTree& tree);

/// Largest N accepted by brute_force_mast.
inline constexpr std::size_t kBruteForceMaxNodes = 7;

/// Exhaustive minimum-area connected assignment.
///
/// Each r_n ranges over {d_nj : j != n}; candidates whose induced links are
/// disconnected are skipped. Ties on area go to the smaller sum of squared
/// radii, then the lexicographically smaller radius vector.
RadiusAssignment brute_force_mast(const Topology& topo, const AreaConfig& area = {});

/// Edge-swap descent over spanning trees, starting at the MST.
RadiusAssignment local_search_mast(const Topology& topo, std::size_t max_iters = 100,
                                   const AreaConfig& area = {});

/// Raises radii until the induced graph is connected; never lowers any radius.
/// Negative and non-finite inputs are clamped to 0 first.
RadiusAssignment repair_radii(const Topology& topo, const RadiusAssignment& radii);

}  // namespace covertnet
