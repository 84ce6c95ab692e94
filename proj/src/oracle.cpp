#include "covertnet/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "covertnet/error.hpp"

namespace covertnet {

bool Topology::has_duplicates() const {
  for (std::size_t i = 0; i < positions.size(); ++i)
    for (std::size_t j = i + 1; j < positions.size(); ++j)
      if (positions[i] == positions[j]) return true;
  return false;
}

std::string_view to_string(RadiusSource s) noexcept {
  switch (s) {
    case RadiusSource::brute_force:
      return "brute_force";
    case RadiusSource::mst:
      return "mst";
    case RadiusSource::local_search:
      return "local_search";
    case RadiusSource::model_prediction:
      return "model_prediction";
    case RadiusSource::repaired:
      return "repaired";
  }
  return "?";
}

RadiusSource radius_source_from_string(std::string_view s) {
  for (auto src : {RadiusSource::brute_force, RadiusSource::mst, RadiusSource::local_search,
                   RadiusSource::model_prediction, RadiusSource::repaired})
    if (to_string(src) == s) return src;
  throw ConfigError("unknown radius source '" + std::string(s) + "'");
}

AreaEstimate assignment_area(const Topology& topo, std::span<const double> radii, const AreaConfig& cfg) {
  const auto disks = make_disks(topo.positions, radii);
  return union_area(disks, cfg.method, cfg.seed, cfg.samples);
}

namespace {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t i) {
    while (parent_[i] != i) {
      parent_[i] = parent_[parent_[i]];
      i = parent_[i];
    }
    return i;
  }

  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent_[std::max(a, b)] = std::min(a, b);
    return true;
  }

 private:
  std::vector<std::size_t> parent_;
};

void require_labelable(const Topology& topo, const char* op) {
  if (topo.size() < 2) throw InvalidInput(std::string(op) + ": need at least two nodes");
  for (const auto& p : topo.positions)
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw InvalidInput(std::string(op) + ": non-finite coordinate");
}

std::vector<double> tree_radii(const DistanceMatrix& dist, const std::vector<Edge>& edges) {
  std::vector<double> r(dist.size(), 0.0);
  for (const auto& [i, j] : edges) {
    r[i] = std::max(r[i], dist(i, j));
    r[j] = std::max(r[j], dist(i, j));
  }
  return r;
}

double sum_squares(std::span<const double> r) {
  double s = 0.0;
  for (double x : r) s += x * x;
  return s;
}

// Strict ordering used by every solver: area, then sum of squares, then lexicographic.
bool better_candidate(double area, std::span<const double> r, double best_area, std::span<const double> best) {
  if (area != best_area) return area < best_area;
  const double a = sum_squares(r);
  const double b = sum_squares(best);
  if (a != b) return a < b;
  return std::lexicographical_compare(r.begin(), r.end(), best.begin(), best.end());
}

}  // namespace

SpanningTree mst(const DistanceMatrix& dist) {
  const std::size_t n = dist.size();
  if (n < 2) throw InvalidInput("mst: need at least two nodes");
  std::vector<Edge> edges;
  edges.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) edges.emplace_back(i, j);
  std::stable_sort(edges.begin(), edges.end(),
                   [&](const Edge& a, const Edge& b) { return dist(a.first, a.second) < dist(b.first, b.second); });
  DisjointSets sets(n);
  SpanningTree tree;
  for (const auto& e : edges) {
    if (sets.unite(e.first, e.second)) tree.edges.push_back(e);
    if (tree.edges.size() == n - 1) break;
  }
  return tree;
}

SpanningTree mst(const Topology& topo) {
  require_labelable(topo, "mst");
  return mst(pairwise_distances(topo.positions));
}

bool is_spanning_tree(const SpanningTree& tree, std::size_t n) {
  if (n == 0 || tree.edges.size() != n - 1) return false;
  DisjointSets sets(n);
  for (const auto& [i, j] : tree.edges) {
    if (i >= n || j >= n || i == j) return false;
    if (!sets.unite(i, j)) return false;
  }
  return true;
}

RadiusAssignment radii_from_tree(const Topology& topo, const SpanningTree& tree) {
  const std::size_t n = topo.size();
  for (const auto& [i, j] : tree.edges)
    if (i >= n || j >= n || i == j) throw InvalidInput("radii_from_tree: edge index out of range");
  if (!is_spanning_tree(tree, n)) throw InvalidInput("radii_from_tree: edges do not form a spanning tree");
  return {tree_radii(pairwise_distances(topo.positions), tree.edges), RadiusSource::mst};
}

RadiusAssignment brute_force_mast(const Topology& topo, const AreaConfig& area) {
  require_labelable(topo, "brute_force_mast");
  const std::size_t n = topo.size();
  if (n > kBruteForceMaxNodes)
    throw SearchBudgetExceeded("brute_force_mast: " + std::to_string(n) + " nodes exceeds the limit of " +
                               std::to_string(kBruteForceMaxNodes) + "; use local_search_mast");
  const auto dist = pairwise_distances(topo.positions);

  // Candidate radii per node: sorted distinct distances to the others.
  std::vector<std::vector<double>> options(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) options[i].push_back(dist(i, j));
    std::sort(options[i].begin(), options[i].end());
    options[i].erase(std::unique(options[i].begin(), options[i].end()), options[i].end());
  }

  std::vector<std::size_t> digit(n, 0);
  std::vector<double> r(n);
  std::vector<double> best;
  double best_area = 0.0;
  for (;;) {
    for (std::size_t i = 0; i < n; ++i) r[i] = options[i][digit[i]];
    if (is_connected(induced_adjacency(dist, r))) {
      const double a = assignment_area(topo, r, area).value;
      if (best.empty() || better_candidate(a, r, best_area, best)) {
        best = r;
        best_area = a;
      }
    }
    std::size_t k = 0;
    while (k < n && ++digit[k] == options[k].size()) digit[k++] = 0;
    if (k == n) break;
  }
  return {best, RadiusSource::brute_force};
}

RadiusAssignment local_search_mast(const Topology& topo, std::size_t max_iters, const AreaConfig& area) {
  require_labelable(topo, "local_search_mast");
  const std::size_t n = topo.size();
  const auto dist = pairwise_distances(topo.positions);
  std::vector<Edge> tree = mst(dist).edges;
  std::vector<double> radii = tree_radii(dist, tree);
  double current = assignment_area(topo, radii, area).value;

  for (std::size_t iter = 0; iter < max_iters; ++iter) {
    std::vector<Edge> best_tree;
    std::vector<double> best_radii;
    double best_area = current;
    for (std::size_t removed = 0; removed < tree.size(); ++removed) {
      // Split the tree into the two sides of the removed edge.
      DisjointSets sets(n);
      for (std::size_t k = 0; k < tree.size(); ++k)
        if (k != removed) sets.unite(tree[k].first, tree[k].second);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
          if (sets.find(i) == sets.find(j) || Edge{i, j} == tree[removed]) continue;
          std::vector<Edge> candidate = tree;
          candidate[removed] = {i, j};
          auto r = tree_radii(dist, candidate);
          const double a = assignment_area(topo, r, area).value;
          if (a < best_area || (!best_radii.empty() && a == best_area && better_candidate(a, r, best_area, best_radii))) {
            best_area = a;
            best_tree = std::move(candidate);
            best_radii = std::move(r);
          }
        }
    }
    if (best_radii.empty()) break;
    tree = std::move(best_tree);
    radii = std::move(best_radii);
    current = best_area;
  }
  return {radii, RadiusSource::local_search};
}

RadiusAssignment repair_radii(const Topology& topo, const RadiusAssignment& input) {
  const std::size_t n = topo.size();
  if (input.size() != n) throw InvalidInput("repair_radii: radius count does not match node count");
  std::vector<double> r(input.radii);
  for (auto& x : r)
    if (!std::isfinite(x) || x < 0.0) x = 0.0;
  const auto dist = pairwise_distances(topo.positions);
  for (;;) {
    const auto label = connected_components(induced_adjacency(dist, r));
    std::size_t bi = 0;
    std::size_t bj = 0;
    double bd = -1.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (label[i] != label[j] && (bd < 0.0 || dist(i, j) < bd)) {
          bd = dist(i, j);
          bi = i;
          bj = j;
        }
    if (bd < 0.0) break;
    r[bi] = std::max(r[bi], bd);
    r[bj] = std::max(r[bj], bd);
  }
  return {std::move(r), RadiusSource::repaired};
}

}  // namespace covertnet
