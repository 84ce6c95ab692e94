#include "covertnet/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "covertnet/error.hpp"
#include "covertnet/random.hpp"

namespace covertnet {

double distance(Point2 a, Point2 b) noexcept { return std::hypot(a.x - b.x, a.y - b.y); }

std::string_view to_string(AreaMethod m) noexcept {
  switch (m) {
    case AreaMethod::exact:
      return "exact";
    case AreaMethod::grid:
      return "grid";
    case AreaMethod::monte_carlo:
      return "monte_carlo";
  }
  return "?";
}

AreaMethod area_method_from_string(std::string_view s) {
  if (s == "exact") return AreaMethod::exact;
  if (s == "grid") return AreaMethod::grid;
  if (s == "monte_carlo") return AreaMethod::monte_carlo;
  throw ConfigError("unknown area method '" + std::string(s) + "'");
}

DistanceMatrix pairwise_distances(std::span<const Point2> points) {
  for (const auto& p : points)
    if (!std::isfinite(p.x) || !std::isfinite(p.y))
      throw InvalidInput("pairwise_distances: non-finite coordinate");
  DistanceMatrix d(points.size());
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = i + 1; j < points.size(); ++j) d(i, j) = d(j, i) = distance(points[i], points[j]);
  return d;
}

double tx_power(const ChannelParams& channel, double distance) {
  if (!(channel.snr_target > 0.0) || !(channel.noise_density > 0.0) || !(channel.path_loss_exponent > 0.0))
    throw InvalidInput("tx_power: channel parameters must be strictly positive");
  if (!(distance > 0.0) || !std::isfinite(distance)) throw DomainError("tx_power: distance must be > 0");
  return channel.snr_target * channel.noise_density * std::pow(distance, channel.path_loss_exponent);
}

bool link_exists(double d_ij, double r_i, double r_j) { return d_ij <= std::min(r_i, r_j); }

AdjacencyMatrix induced_adjacency(const DistanceMatrix& dist, std::span<const double> radii) {
  const std::size_t n = dist.size();
  if (radii.size() != n) throw InvalidInput("induced_adjacency: radius count does not match node count");
  auto adj = AdjacencyMatrix::square(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool link = link_exists(dist(i, j), radii[i], radii[j]);
      adj.set(i, j, link);
      adj.set(j, i, link);
    }
  return adj;
}

AdjacencyMatrix induced_adjacency(std::span<const Point2> points, std::span<const double> radii) {
  if (radii.size() != points.size())
    throw InvalidInput("induced_adjacency: radius count does not match node count");
  return induced_adjacency(pairwise_distances(points), radii);
}

std::vector<std::size_t> connected_components(const AdjacencyMatrix& adjacency) {
  const std::size_t n = adjacency.rows();
  constexpr auto unset = static_cast<std::size_t>(-1);
  std::vector<std::size_t> label(n, unset);
  std::vector<std::size_t> stack;
  for (std::size_t root = 0; root < n; ++root) {
    if (label[root] != unset) continue;
    label[root] = root;
    stack.push_back(root);
    while (!stack.empty()) {
      const std::size_t u = stack.back();
      stack.pop_back();
      for (std::size_t v = 0; v < n; ++v)
        if (label[v] == unset && (adjacency(u, v) || adjacency(v, u))) {
          label[v] = root;
          stack.push_back(v);
        }
    }
  }
  return label;
}

bool is_connected(const AdjacencyMatrix& adjacency) {
  const auto label = connected_components(adjacency);
  return std::all_of(label.begin(), label.end(), [](std::size_t l) { return l == 0; });
}

std::vector<Disk> make_disks(std::span<const Point2> points, std::span<const double> radii) {
  if (points.size() != radii.size()) throw InvalidInput("make_disks: radius count does not match node count");
  std::vector<Disk> disks(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) disks[i] = Disk{points[i], radii[i]};
  return disks;
}

double lens_area(const Disk& a, const Disk& b) {
  const double d = distance(a.center, b.center);
  const double r1 = a.radius;
  const double r2 = b.radius;
  if (d >= r1 + r2) return 0.0;
  if (d <= std::abs(r1 - r2)) {
    const double r = std::min(r1, r2);
    return std::numbers::pi * r * r;
  }
  const double c1 = std::clamp((d * d + r1 * r1 - r2 * r2) / (2.0 * d * r1), -1.0, 1.0);
  const double c2 = std::clamp((d * d + r2 * r2 - r1 * r1) / (2.0 * d * r2), -1.0, 1.0);
  const double k = (-d + r1 + r2) * (d + r1 - r2) * (d - r1 + r2) * (d + r1 + r2);
  return r1 * r1 * std::acos(c1) + r2 * r2 * std::acos(c2) - 0.5 * std::sqrt(std::max(k, 0.0));
}

namespace {

struct Box {
  double x0, y0, x1, y1;
  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
};

Box bounding_box(std::span<const Disk> disks) {
  Box b{disks[0].center.x - disks[0].radius, disks[0].center.y - disks[0].radius,
        disks[0].center.x + disks[0].radius, disks[0].center.y + disks[0].radius};
  for (const auto& d : disks) {
    b.x0 = std::min(b.x0, d.center.x - d.radius);
    b.y0 = std::min(b.y0, d.center.y - d.radius);
    b.x1 = std::max(b.x1, d.center.x + d.radius);
    b.y1 = std::max(b.y1, d.center.y + d.radius);
  }
  return b;
}

bool inside_any(std::span<const Disk> disks, double x, double y) {
  for (const auto& d : disks) {
    const double dx = x - d.center.x;
    const double dy = y - d.center.y;
    if (dx * dx + dy * dy <= d.radius * d.radius) return true;
  }
  return false;
}

AreaEstimate exact_area(std::span<const Disk> disks) {
  if (disks.size() > 2) throw UnsupportedMethod("union_area: exact method supports at most two disks");
  double area = 0.0;
  for (const auto& d : disks) area += std::numbers::pi * d.radius * d.radius;
  if (disks.size() == 2) area -= lens_area(disks[0], disks[1]);
  return {std::max(area, 0.0), 0.0, AreaMethod::exact, 0};
}

// Rasterises row by row: the chord of every disk on a row is an interval,
// and the cell centres inside the merged intervals are counted directly.
// Equivalent to testing every cell centre, at O(rows * N log N).
AreaEstimate grid_area(std::span<const Disk> disks, std::uint64_t samples) {
  const auto n = static_cast<std::uint64_t>(std::ceil(std::sqrt(static_cast<double>(samples))));
  const Box box = bounding_box(disks);
  const double w = box.width() / static_cast<double>(n);
  const double h = box.height() / static_cast<double>(n);
  if (!(w > 0.0) || !(h > 0.0)) return {0.0, 0.0, AreaMethod::grid, n * n};

  std::vector<std::pair<double, double>> spans;
  spans.reserve(disks.size());
  std::uint64_t count = 0;
  const auto last_col = static_cast<double>(n - 1);
  for (std::uint64_t row = 0; row < n; ++row) {
    const double y = box.y0 + (static_cast<double>(row) + 0.5) * h;
    spans.clear();
    for (const auto& d : disks) {
      const double dy = y - d.center.y;
      const double s = d.radius * d.radius - dy * dy;
      if (s < 0.0) continue;
      const double half = std::sqrt(s);
      spans.emplace_back(d.center.x - half, d.center.x + half);
    }
    if (spans.empty()) continue;
    std::sort(spans.begin(), spans.end());
    double lo = spans[0].first;
    double hi = spans[0].second;
    auto flush = [&](double a, double b) {
      // column c has centre x0 + (c + 0.5) w
      const double first = std::max(0.0, std::ceil((a - box.x0) / w - 0.5));
      const double last = std::min(last_col, std::floor((b - box.x0) / w - 0.5));
      if (last >= first) count += static_cast<std::uint64_t>(last - first) + 1;
    };
    for (std::size_t k = 1; k < spans.size(); ++k) {
      if (spans[k].first <= hi) {
        hi = std::max(hi, spans[k].second);
      } else {
        flush(lo, hi);
        lo = spans[k].first;
        hi = spans[k].second;
      }
    }
    flush(lo, hi);
  }
  const double cell = w * h;
  double circumference_cells = 0.0;
  for (const auto& d : disks) circumference_cells += 2.0 * std::numbers::pi * d.radius / std::sqrt(cell);
  return {static_cast<double>(count) * cell, cell * std::sqrt(circumference_cells / 6.0), AreaMethod::grid,
          n * n};
}

AreaEstimate monte_carlo_area(std::span<const Disk> disks, std::uint64_t seed, std::uint64_t samples) {
  const Box box = bounding_box(disks);
  const double box_area = box.width() * box.height();
  if (!(box_area > 0.0)) return {0.0, 0.0, AreaMethod::monte_carlo, samples};
  Rng rng(seed);
  std::uint64_t hits = 0;
  for (std::uint64_t s = 0; s < samples; ++s) {
    const double x = rng.uniform(box.x0, box.x1);
    const double y = rng.uniform(box.y0, box.y1);
    if (inside_any(disks, x, y)) ++hits;
  }
  const double p = static_cast<double>(hits) / static_cast<double>(samples);
  return {p * box_area, box_area * std::sqrt(p * (1.0 - p) / static_cast<double>(samples)),
          AreaMethod::monte_carlo, samples};
}

}  // namespace

AreaEstimate union_area(std::span<const Disk> disks, AreaMethod method, std::uint64_t rng_seed,
                        std::uint64_t samples) {
  if (disks.empty()) throw InvalidInput("union_area: no disks");
  for (const auto& d : disks)
    if (!std::isfinite(d.center.x) || !std::isfinite(d.center.y) || !std::isfinite(d.radius) || d.radius < 0.0)
      throw InvalidInput("union_area: disk must have finite centre and finite radius >= 0");
  switch (method) {
    case AreaMethod::exact:
      return exact_area(disks);
    case AreaMethod::grid:
      if (samples < kMinStochasticSamples) throw InvalidInput("union_area: grid needs at least 1e4 samples");
      return grid_area(disks, samples);
    case AreaMethod::monte_carlo:
      if (samples < kMinStochasticSamples)
        throw InvalidInput("union_area: monte_carlo needs at least 1e4 samples");
      return monte_carlo_area(disks, rng_seed, samples);
  }
  throw InvalidInput("union_area: unknown method");
}

}  // namespace covertnet
