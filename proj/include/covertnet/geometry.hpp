#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "covertnet/bool_matrix.hpp"

namespace covertnet {

/// Location in the abstract Euclidean plane, meters.
struct Point2 {
  double x = 0.0;
  double y = 0.0;

  bool operator==(const Point2&) const = default;
};

double distance(Point2 a, Point2 b) noexcept;

/// Coverage region of a node: every point within `radius` of `center`.
struct Disk {
  Point2 center;
  double radius = 0.0;
};

enum class AreaMethod { exact, grid, monte_carlo };

std::string_view to_string(AreaMethod m) noexcept;
AreaMethod area_method_from_string(std::string_view s);

/// Result of a union-area computation. `std_error` is 0 for the exact method.
struct AreaEstimate {
  double value = 0.0;
  double std_error = 0.0;
  AreaMethod method = AreaMethod::exact;
  std::uint64_t sample_count = 0;
};

/// Parameters of the transmission power law P = snr * N0 * d^eta.
struct ChannelParams {
  double snr_target = 1.0;
  double noise_density = 1.0;
  double path_loss_exponent = 2.0;
};

/// Symmetric N x N matrix of inter-node distances.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  explicit DistanceMatrix(std::size_t n) : n_(n), d_(n * n, 0.0) {}

  std::size_t size() const noexcept { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return d_[i * n_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return d_[i * n_ + j]; }

 private:
  std::size_t n_ = 0;
  std::vector<double> d_;
};

using AdjacencyMatrix = BoolMatrix;

/// Throws InvalidInput on any non-finite coordinate.
DistanceMatrix pairwise_distances(std::span<const Point2> points);

/// Throws DomainError unless distance > 0; InvalidInput for non-positive channel params.
/// Exponents outside [2, 6] are accepted.
double tx_power(const ChannelParams& channel, double distance);

/// Link predicate: d <= min(r_i, r_j), boundary inclusive.
bool link_exists(double d_ij, double r_i, double r_j);

/// Links induced by the radii; no self-loops.
AdjacencyMatrix induced_adjacency(std::span<const Point2> points, std::span<const double> radii);
AdjacencyMatrix induced_adjacency(const DistanceMatrix& dist, std::span<const double> radii);

bool is_connected(const AdjacencyMatrix& adjacency);

/// Connected component label per node, components numbered by lowest member.
std::vector<std::size_t> connected_components(const AdjacencyMatrix& adjacency);

/// Default sample budget for grid and Monte Carlo estimates.
inline constexpr std::uint64_t kMinStochasticSamples = 10'000;

/// Area of the union of disks.
///
/// exact: closed form, at most two disks (UnsupportedMethod otherwise).
/// grid: ceil(sqrt(samples))^2 cells over the tight bounding box; a cell
///   counts when its centre lies in the union. std_error is a boundary-cell
///   estimate, cell_area * sqrt(B / 6) with B the summed circumference in
///   cell widths.
/// monte_carlo: uniform points in the bounding box; binomial std_error.
AreaEstimate union_area(std::span<const Disk> disks, AreaMethod method, std::uint64_t rng_seed = 0,
                        std::uint64_t samples = 1'000'000);

/// Intersection area of two disks (circular lens).
double lens_area(const Disk& a, const Disk& b);

std::vector<Disk> make_disks(std::span<const Point2> points, std::span<const double> radii);

}  // namespace covertnet
