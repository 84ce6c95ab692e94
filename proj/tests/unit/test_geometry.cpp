#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "covertnet/error.hpp"
#include "covertnet/geometry.hpp"

using namespace covertnet;

namespace {

// Midpoint integration of the merged chord length along y.
double integrated_union(const std::vector<Disk>& disks, int slices = 40000) {
  double y0 = 1e300, y1 = -1e300;
  for (const auto& d : disks) {
    y0 = std::min(y0, d.center.y - d.radius);
    y1 = std::max(y1, d.center.y + d.radius);
  }
  const double h = (y1 - y0) / slices;
  double total = 0.0;
  for (int k = 0; k < slices; ++k) {
    const double y = y0 + (k + 0.5) * h;
    std::vector<std::pair<double, double>> iv;
    for (const auto& d : disks) {
      const double s = d.radius * d.radius - (y - d.center.y) * (y - d.center.y);
      if (s > 0) iv.emplace_back(d.center.x - std::sqrt(s), d.center.x + std::sqrt(s));
    }
    std::sort(iv.begin(), iv.end());
    double len = 0.0, lo = 0.0, hi = -1e300;
    for (auto [a, b] : iv) {
      if (a > hi) {
        if (hi > -1e300) len += hi - lo;
        lo = a;
        hi = b;
      } else {
        hi = std::max(hi, b);
      }
    }
    if (hi > -1e300) len += hi - lo;
    total += len * h;
  }
  return total;
}

std::vector<Disk> random_disks(std::mt19937_64& g, int n) {
  std::uniform_real_distribution<double> pos(0.0, 10.0), rad(0.5, 4.0);
  std::vector<Disk> out;
  for (int i = 0; i < n; ++i) out.push_back({{pos(g), pos(g)}, rad(g)});
  return out;
}

}  // namespace

TEST(Distances, ThreeFourFive) {
  const std::vector<Point2> p{{0, 0}, {3, 4}};
  const auto d = pairwise_distances(p);
  EXPECT_DOUBLE_EQ(d(0, 1), 5.0);
  EXPECT_DOUBLE_EQ(d(1, 0), 5.0);
}

TEST(Distances, SinglePoint) {
  const std::vector<Point2> p{{1, 2}};
  const auto d = pairwise_distances(p);
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d(0, 0), 0.0);
}

TEST(Distances, Collinear) {
  const std::vector<Point2> p{{0, 0}, {1, 0}, {2, 0}};
  const auto d = pairwise_distances(p);
  EXPECT_DOUBLE_EQ(d(0, 2), 2.0);
  EXPECT_DOUBLE_EQ(d(0, 2), d(0, 1) + d(1, 2));
}

TEST(Distances, NonFiniteRejected) {
  const std::vector<Point2> p{{0, 0}, {NAN, 1}};
  EXPECT_THROW(pairwise_distances(p), InvalidInput);
  const std::vector<Point2> q{{INFINITY, 0}};
  EXPECT_THROW(pairwise_distances(q), InvalidInput);
}

TEST(Distances, MetricProperties) {
  std::mt19937_64 g(3);
  std::uniform_real_distribution<double> u(-50, 50);
  for (int t = 0; t < 20; ++t) {
    std::vector<Point2> p(7);
    for (auto& q : p) q = {u(g), u(g)};
    const auto d = pairwise_distances(p);
    for (std::size_t i = 0; i < 7; ++i) {
      EXPECT_EQ(d(i, i), 0.0);
      for (std::size_t j = 0; j < 7; ++j) {
        EXPECT_EQ(d(i, j), d(j, i));
        for (std::size_t k = 0; k < 7; ++k) EXPECT_LE(d(i, k), d(i, j) + d(j, k) + 1e-12);
      }
    }
  }
}

TEST(TxPower, Examples) {
  EXPECT_DOUBLE_EQ(tx_power({1, 1, 2}, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(tx_power({1, 1, 2}, 2.0), 4.0);
  EXPECT_DOUBLE_EQ(tx_power({10, 0.5, 3}, 2.0), 40.0);
}

TEST(TxPower, NonPositiveDistance) {
  EXPECT_THROW(tx_power({1, 1, 2}, 0.0), DomainError);
  EXPECT_THROW(tx_power({1, 1, 2}, -1.0), DomainError);
}

TEST(TxPower, BadChannel) {
  EXPECT_THROW(tx_power({0, 1, 2}, 1.0), InvalidInput);
  EXPECT_THROW(tx_power({1, -1, 2}, 1.0), InvalidInput);
}

TEST(TxPower, OutOfTypicalRangeAccepted) {
  EXPECT_DOUBLE_EQ(tx_power({1, 1, 8}, 2.0), 256.0);
}

TEST(TxPower, MultiplicativeAndIncreasing) {
  for (double eta : {2.0, 3.0, 4.0, 5.0}) {
    const ChannelParams c{3.0, 0.25, eta};
    for (double d : {0.5, 2.0, 4.0, 8.0}) EXPECT_EQ(tx_power(c, d) / tx_power(c, 1.0), std::pow(d, eta));
    double prev = 0.0;
    for (double d = 0.1; d < 20; d += 0.37) {
      const double p = tx_power(c, d);
      EXPECT_GT(p, prev);
      prev = p;
    }
  }
}

TEST(LinkExists, Examples) {
  EXPECT_FALSE(link_exists(1, 2, 0.5));
  EXPECT_TRUE(link_exists(1, 1, 1));
  EXPECT_TRUE(link_exists(0, 0, 0));
}

TEST(LinkExists, Symmetric) {
  std::mt19937_64 g(9);
  std::uniform_real_distribution<double> u(0, 3);
  for (int t = 0; t < 1000; ++t) {
    const double d = u(g), a = u(g), b = u(g);
    EXPECT_EQ(link_exists(d, a, b), link_exists(d, b, a));
    EXPECT_EQ(link_exists(d, a, b), d <= std::min(a, b));
  }
}

TEST(InducedAdjacency, Examples) {
  const std::vector<Point2> two{{0, 0}, {1, 0}};
  const std::vector<double> r11{1, 1}, r105{1, 0.5};
  EXPECT_TRUE(induced_adjacency(two, r11)(0, 1));
  EXPECT_FALSE(induced_adjacency(two, r105)(0, 1));

  const std::vector<Point2> three{{0, 0}, {1, 0}, {2, 0}};
  const std::vector<double> r{1, 1, 1};
  const auto a = induced_adjacency(three, r);
  EXPECT_TRUE(a(0, 1));
  EXPECT_TRUE(a(1, 2));
  EXPECT_FALSE(a(0, 2));
  for (std::size_t i = 0; i < 3; ++i) EXPECT_FALSE(a(i, i));
  EXPECT_TRUE(a.is_symmetric());
}

TEST(InducedAdjacency, DimensionMismatch) {
  const std::vector<Point2> two{{0, 0}, {1, 0}};
  const std::vector<double> r{1};
  EXPECT_THROW(induced_adjacency(two, r), InvalidInput);
}

TEST(InducedAdjacency, MaxRowRadiiGiveCompleteGraph) {
  std::mt19937_64 g(5);
  std::uniform_real_distribution<double> u(0, 100);
  for (int t = 0; t < 20; ++t) {
    std::vector<Point2> p(6);
    for (auto& q : p) q = {u(g), u(g)};
    const auto d = pairwise_distances(p);
    std::vector<double> r(6, 0.0);
    double m = 0.0;
    for (std::size_t i = 0; i < 6; ++i)
      for (std::size_t j = 0; j < 6; ++j) m = std::max(m, d(i, j));
    std::fill(r.begin(), r.end(), m);
    const auto a = induced_adjacency(p, r);
    for (std::size_t i = 0; i < 6; ++i)
      for (std::size_t j = 0; j < 6; ++j) EXPECT_EQ(a(i, j), i != j);
  }
}

TEST(Connectivity, Examples) {
  EXPECT_TRUE(is_connected(AdjacencyMatrix::square(1)));
  AdjacencyMatrix path = AdjacencyMatrix::square(3);
  path.set(0, 1, true);
  path.set(1, 0, true);
  path.set(1, 2, true);
  path.set(2, 1, true);
  EXPECT_TRUE(is_connected(path));
  EXPECT_FALSE(is_connected(AdjacencyMatrix::square(2)));
}

TEST(Connectivity, ComponentLabels) {
  AdjacencyMatrix a = AdjacencyMatrix::square(5);
  a.set(1, 3, true);
  a.set(3, 1, true);
  a.set(2, 4, true);
  a.set(4, 2, true);
  EXPECT_EQ(connected_components(a), (std::vector<std::size_t>{0, 1, 2, 1, 2}));
}

TEST(UnionArea, SingleDiskExact) {
  const std::vector<Disk> d{{{0, 0}, 1}};
  const auto a = union_area(d, AreaMethod::exact);
  EXPECT_NEAR(a.value, std::numbers::pi, 1e-12);
  EXPECT_EQ(a.std_error, 0.0);
  EXPECT_EQ(a.method, AreaMethod::exact);
}

TEST(UnionArea, DisjointPair) {
  const std::vector<Disk> d{{{0, 0}, 1}, {{3, 0}, 1}};
  EXPECT_NEAR(union_area(d, AreaMethod::exact).value, 2 * std::numbers::pi, 1e-12);
}

TEST(UnionArea, OverlappingPair) {
  const std::vector<Disk> d{{{0, 0}, 1}, {{1, 0}, 1}};
  const double expected = 4 * std::numbers::pi / 3 + std::sqrt(3.0) / 2;
  EXPECT_NEAR(expected, 5.0548, 1e-4);
  EXPECT_NEAR(union_area(d, AreaMethod::exact).value, expected, 1e-12);
  const auto mc = union_area(d, AreaMethod::monte_carlo, 11, 1'000'000);
  EXPECT_NEAR(mc.value, expected, 3 * mc.std_error);
  EXPECT_NEAR(integrated_union(d), expected, 1e-4);
}

TEST(UnionArea, NestedAndTangent) {
  const std::vector<Disk> nested{{{0, 0}, 2}, {{0.5, 0}, 1}};
  EXPECT_NEAR(union_area(nested, AreaMethod::exact).value, 4 * std::numbers::pi, 1e-12);
  const std::vector<Disk> tangent{{{0, 0}, 1}, {{2, 0}, 1}};
  EXPECT_NEAR(union_area(tangent, AreaMethod::exact).value, 2 * std::numbers::pi, 1e-12);
  const std::vector<Disk> same{{{1, 1}, 1.5}, {{1, 1}, 1.5}};
  EXPECT_NEAR(union_area(same, AreaMethod::exact).value, std::numbers::pi * 2.25, 1e-12);
}

TEST(UnionArea, Errors) {
  const std::vector<Disk> none;
  EXPECT_THROW(union_area(none, AreaMethod::grid), InvalidInput);
  const std::vector<Disk> three{{{0, 0}, 1}, {{1, 0}, 1}, {{2, 0}, 1}};
  EXPECT_THROW(union_area(three, AreaMethod::exact), UnsupportedMethod);
  EXPECT_THROW(union_area(three, AreaMethod::monte_carlo, 0, 9999), InvalidInput);
  EXPECT_THROW(union_area(three, AreaMethod::grid, 0, 100), InvalidInput);
  const std::vector<Disk> neg{{{0, 0}, -1}};
  EXPECT_THROW(union_area(neg, AreaMethod::grid), InvalidInput);
}

TEST(UnionArea, ExactMatchesIntegration) {
  std::mt19937_64 g(21);
  for (int t = 0; t < 30; ++t) {
    const auto d = random_disks(g, 2);
    EXPECT_NEAR(union_area(d, AreaMethod::exact).value, integrated_union(d), 1e-4) << t;
  }
}

TEST(UnionArea, StochasticMethodsAgreeWithIntegration) {
  std::mt19937_64 g(22);
  for (int t = 0; t < 20; ++t) {
    const auto d = random_disks(g, 5);
    const double truth = integrated_union(d);
    const auto grid = union_area(d, AreaMethod::grid, 0, 1u << 18);
    const auto mc = union_area(d, AreaMethod::monte_carlo, t, 200'000);
    EXPECT_NEAR(grid.value, truth, 3 * grid.std_error) << t;
    EXPECT_NEAR(mc.value, truth, 4 * mc.std_error) << t;
    EXPECT_GT(grid.std_error, 0.0);
    EXPECT_EQ(grid.sample_count, 512u * 512u);
  }
}

TEST(UnionArea, BoundsProperty) {
  std::mt19937_64 g(23);
  for (int t = 0; t < 30; ++t) {
    const auto d = random_disks(g, 1 + t % 6);
    double sum = 0.0, biggest = 0.0;
    for (const auto& x : d) {
      sum += std::numbers::pi * x.radius * x.radius;
      biggest = std::max(biggest, std::numbers::pi * x.radius * x.radius);
    }
    for (auto m : {AreaMethod::grid, AreaMethod::monte_carlo}) {
      const auto a = union_area(d, m, t, 100'000);
      EXPECT_LE(a.value, sum + 3 * a.std_error);
      EXPECT_GE(a.value, biggest - 3 * a.std_error);
      EXPECT_GE(a.value, 0.0);
      EXPECT_GE(a.std_error, 0.0);
    }
  }
}

TEST(UnionArea, MonotoneUnderAddedDisk) {
  std::mt19937_64 g(24);
  for (int t = 0; t < 30; ++t) {
    auto d = random_disks(g, 4);
    const auto before = union_area(d, AreaMethod::grid, 0, 100'000);
    d.push_back(random_disks(g, 1)[0]);
    const auto after = union_area(d, AreaMethod::grid, 0, 100'000);
    EXPECT_GE(after.value, before.value - 3 * std::hypot(before.std_error, after.std_error));
    const auto mb = union_area(std::span(d).first(4), AreaMethod::monte_carlo, t, 100'000);
    const auto ma = union_area(d, AreaMethod::monte_carlo, t + 1000, 100'000);
    EXPECT_GE(ma.value, mb.value - 3 * std::hypot(mb.std_error, ma.std_error));
  }
}

TEST(UnionArea, MonteCarloErrorScaling) {
  std::mt19937_64 g(25);
  const auto d = random_disks(g, 4);
  const auto a = union_area(d, AreaMethod::monte_carlo, 1, 40'000);
  const auto b = union_area(d, AreaMethod::monte_carlo, 1, 80'000);
  EXPECT_NEAR(a.std_error / b.std_error, std::sqrt(2.0), 0.05);

  auto spread = [&](std::uint64_t n) {
    std::vector<double> v;
    for (std::uint64_t s = 0; s < 60; ++s) v.push_back(union_area(d, AreaMethod::monte_carlo, 100 + s, n).value);
    double m = 0.0;
    for (double x : v) m += x;
    m /= static_cast<double>(v.size());
    double var = 0.0;
    for (double x : v) var += (x - m) * (x - m);
    return std::sqrt(var / static_cast<double>(v.size() - 1));
  };
  const double ratio = spread(10'000) / spread(20'000);
  EXPECT_GT(ratio, 1.0);
  EXPECT_LT(ratio, 2.0);
}

TEST(UnionArea, Deterministic) {
  std::mt19937_64 g(26);
  const auto d = random_disks(g, 5);
  const auto a = union_area(d, AreaMethod::monte_carlo, 77, 50'000);
  const auto b = union_area(d, AreaMethod::monte_carlo, 77, 50'000);
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.std_error, b.std_error);
  const auto c = union_area(d, AreaMethod::monte_carlo, 78, 50'000);
  EXPECT_NE(a.value, c.value);
}

TEST(UnionArea, ZeroRadiusDisks) {
  const std::vector<Disk> d{{{0, 0}, 0}, {{1, 1}, 0}};
  EXPECT_EQ(union_area(d, AreaMethod::exact).value, 0.0);
  EXPECT_EQ(union_area(d, AreaMethod::grid).value, 0.0);
  EXPECT_EQ(union_area(d, AreaMethod::monte_carlo).value, 0.0);
}

TEST(AreaMethodNames, RoundTrip) {
  for (auto m : {AreaMethod::exact, AreaMethod::grid, AreaMethod::monte_carlo})
    EXPECT_EQ(area_method_from_string(to_string(m)), m);
  EXPECT_THROW(area_method_from_string("bogus"), ConfigError);
}
