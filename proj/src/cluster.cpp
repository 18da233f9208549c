#include "ctsp/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "ctsp/mip.hpp"
#include "ctsp/parallel.hpp"

namespace ctsp {

std::vector<Point> kmeanspp_init(const std::vector<Point>& points, int k, std::mt19937_64& rng) {
  const int m = static_cast<int>(points.size());
  if (k < 1) throw Error("k-means++ needs at least one center");
  if (k > m) throw Error("more centers requested than points");
  std::vector<Point> centers;
  std::uniform_int_distribution<int> first(0, m - 1);
  centers.push_back(points[first(rng)]);
  std::vector<double> s2(m);
  for (int i = 0; i < m; ++i) s2[i] = std::pow(euclidean(points[i], centers[0]), 2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  while (static_cast<int>(centers.size()) < k) {
    double total = 0.0;
    for (double v : s2) total += v;
    int pick = -1;
    if (total > 0.0) {
      const double r = u(rng) * total;
      double acc = 0.0;
      for (int i = 0; i < m; ++i) {
        acc += s2[i];
        if (s2[i] > 0.0 && r < acc) {
          pick = i;
          break;
        }
      }
      if (pick < 0)
        for (int i = m - 1; i >= 0 && pick < 0; --i)
          if (s2[i] > 0.0) pick = i;
    } else {
      // Every point coincides with a center already.
      pick = first(rng);
    }
    centers.push_back(points[pick]);
    for (int i = 0; i < m; ++i)
      s2[i] = std::min(s2[i], std::pow(euclidean(points[i], points[pick]), 2));
  }
  return centers;
}

std::vector<Point> kmeanspp_init(const std::vector<Point>& points, int k, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return kmeanspp_init(points, k, rng);
}

Assignment assign(const std::vector<Point>& points, const std::vector<Point>& centers,
                  int max_size) {
  const int m = static_cast<int>(points.size());
  const int k = static_cast<int>(centers.size());
  if (static_cast<long>(k) * max_size < m)
    throw Error("assignment infeasible: centers times capacity is below the point count");
  Assignment a;
  a.center_of.assign(m, -1);
  if (m == 0) return a;

  lp::LinearProgram lp;
  for (int c = 0; c < m; ++c)
    for (int u = 0; u < k; ++u) lp.add_variable(euclidean(points[c], centers[u]), 0.0, 1.0);
  for (int c = 0; c < m; ++c) {
    std::vector<std::pair<int, double>> row;
    for (int u = 0; u < k; ++u) row.emplace_back(c * k + u, 1.0);
    lp.add_row(std::move(row), lp::Relation::Equal, 1.0);
  }
  for (int u = 0; u < k; ++u) {
    std::vector<std::pair<int, double>> row;
    for (int c = 0; c < m; ++c) row.emplace_back(c * k + u, 1.0);
    lp.add_row(std::move(row), lp::Relation::LessEqual, max_size);
  }
  std::vector<int> bins(lp.num_vars());
  for (int v = 0; v < lp.num_vars(); ++v) bins[v] = v;
  const lp::MipResult r = lp::solve_binary_mip(lp, bins);
  if (!r.has_solution) throw Error("assignment problem has no solution");
  for (int c = 0; c < m; ++c)
    for (int u = 0; u < k; ++u)
      if (r.solution.x[c * k + u] > 0.5) a.center_of[c] = u;
  for (int c = 0; c < m; ++c) a.objective += euclidean(points[c], centers[a.center_of[c]]);
  return a;
}

std::vector<std::vector<int>> Clustering::members() const {
  std::vector<std::vector<int>> out(centers.size());
  for (std::size_t i = 0; i < assignment.size(); ++i) out[assignment[i]].push_back(static_cast<int>(i));
  return out;
}

Clustering cluster_run(const std::vector<Point>& points, int max_size, std::uint64_t seed,
                       int max_iterations) {
  if (max_size < 1) throw Error("cluster size limit must be at least 1");
  Clustering out;
  out.seed = seed;
  out.restarts = 1;
  const int m = static_cast<int>(points.size());
  if (m == 0) return out;
  const int k = (m + max_size - 1) / max_size;
  out.centers = kmeanspp_init(points, k, seed);
  std::set<std::vector<int>> seen;
  for (int it = 0; it < max_iterations; ++it) {
    const Assignment a = assign(points, out.centers, max_size);
    out.history.push_back(a.objective);
    out.iterations = it + 1;
    const bool same = a.center_of == out.assignment;
    out.assignment = a.center_of;
    out.objective = a.objective;
    if (same) break;
    if (!seen.insert(a.center_of).second) {
      out.cycled = true;
      break;
    }
    std::vector<Point> sum(k);
    std::vector<int> count(k, 0);
    for (int i = 0; i < m; ++i) {
      sum[out.assignment[i]].x += points[i].x;
      sum[out.assignment[i]].y += points[i].y;
      ++count[out.assignment[i]];
    }
    for (int u = 0; u < k; ++u)
      if (count[u] > 0) out.centers[u] = {sum[u].x / count[u], sum[u].y / count[u]};
  }
  // Report the objective against the final centers.
  out.objective = 0.0;
  for (int i = 0; i < m; ++i) out.objective += euclidean(points[i], out.centers[out.assignment[i]]);
  return out;
}

Clustering cluster_points(const std::vector<Point>& points, const ClusterOptions& opt) {
  const int runs = std::max(1, opt.restarts);
  std::vector<Clustering> all(runs);
  std::vector<std::uint64_t> seeds(runs);
  {
    std::mt19937_64 master(opt.seed);
    for (auto& s : seeds) s = master();
  }
  parallel_for(runs, opt.threads, [&](std::size_t r) {
    all[r] = cluster_run(points, opt.max_size, seeds[r], opt.max_iterations);
  });
  std::size_t best = 0;
  for (std::size_t r = 1; r < all.size(); ++r)
    if (all[r].objective < all[best].objective) best = r;
  Clustering out = std::move(all[best]);
  out.restarts = runs;
  out.seed = opt.seed;
  return out;
}

Clustering cluster_commuters(const std::vector<Commuter>& commuters, const ClusterOptions& opt) {
  std::vector<Point> homes;
  for (const Commuter& c : commuters) homes.push_back(c.home);
  return cluster_points(homes, opt);
}

}  // namespace ctsp
