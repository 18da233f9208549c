#include <cmath>
#include <limits>
#include <random>

#include "ctsp/cluster.hpp"
#include "doctest.h"

using namespace ctsp;

namespace {

// Least total distance over every assignment of points to centers that
// respects the size limit.
double exhaustive_assignment(const std::vector<Point>& pts, const std::vector<Point>& centers,
                             int max_size) {
  const int m = static_cast<int>(pts.size());
  const int k = static_cast<int>(centers.size());
  long total = 1;
  for (int i = 0; i < m; ++i) total *= k;
  double best = std::numeric_limits<double>::infinity();
  for (long code = 0; code < total; ++code) {
    std::vector<int> size(k, 0);
    double obj = 0;
    long c = code;
    for (int i = 0; i < m; ++i, c /= k) {
      ++size[c % k];
      obj += euclidean(pts[i], centers[c % k]);
    }
    bool ok = true;
    for (int s : size) ok &= s <= max_size;
    if (ok) best = std::min(best, obj);
  }
  return best;
}

std::vector<Point> random_points(std::mt19937_64& rng, int m, double side) {
  std::uniform_real_distribution<double> u(0, side);
  std::vector<Point> pts;
  for (int i = 0; i < m; ++i) pts.push_back({u(rng), u(rng)});
  return pts;
}

}  // namespace

TEST_CASE("assignment matches exhaustive enumeration") {
  std::mt19937_64 rng(11);
  int mismatches = 0;
  for (int trial = 0; trial < 150; ++trial) {
    const int m = 2 + trial % 7;
    const auto pts = random_points(rng, m, 1000);
    const auto centers = random_points(rng, 2, 1000);
    const int max_size = (m + 1) / 2 + trial % 2;
    const Assignment a = assign(pts, centers, max_size);
    std::vector<int> size(2, 0);
    for (int u : a.center_of) ++size[u];
    CHECK(size[0] <= max_size);
    CHECK(size[1] <= max_size);
    mismatches += std::abs(a.objective - exhaustive_assignment(pts, centers, max_size)) > 1e-6;
  }
  CHECK(mismatches == 0);

  const std::vector<Point> two{{0, 0}, {10, 10}};
  const Assignment id = assign(two, two, 1);
  CHECK(id.center_of == std::vector<int>{0, 1});
  CHECK(id.objective == 0.0);
  CHECK_THROWS_AS(assign(random_points(rng, 5, 10), two, 2), Error);
}

TEST_CASE("a loose limit gives the nearest center") {
  std::mt19937_64 rng(4);
  const auto pts = random_points(rng, 30, 5000);
  const auto centers = random_points(rng, 3, 5000);
  const Assignment a = assign(pts, centers, 30);
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (const Point& c : centers)
      CHECK(euclidean(pts[i], centers[a.center_of[i]]) <= euclidean(pts[i], c) + 1e-9);
}

TEST_CASE("seeding follows squared distances") {
  const std::vector<Point> pts{{0, 0}, {1, 0}, {0, 2}, {3, 3}};
  const int m = 4;
  // Probability of each unordered pair of centers.
  std::vector<double> expect(m * m, 0.0);
  for (int a = 0; a < m; ++a) {
    double total = 0;
    for (int b = 0; b < m; ++b) total += std::pow(euclidean(pts[a], pts[b]), 2);
    for (int b = 0; b < m; ++b) {
      const double p = 0.25 * std::pow(euclidean(pts[a], pts[b]), 2) / total;
      expect[std::min(a, b) * m + std::max(a, b)] += p;
    }
  }
  const int runs = 10000;
  std::vector<int> seen(m * m, 0);
  std::mt19937_64 rng(99);
  auto index = [&](const Point& p) {
    for (int i = 0; i < m; ++i)
      if (p.x == pts[i].x && p.y == pts[i].y) return i;
    return -1;
  };
  for (int r = 0; r < runs; ++r) {
    const auto c = kmeanspp_init(pts, 2, rng);
    const int a = index(c[0]), b = index(c[1]);
    REQUIRE(a != b);
    ++seen[std::min(a, b) * m + std::max(a, b)];
  }
  for (int k = 0; k < m * m; ++k) {
    const double p = expect[k];
    const double sd = std::sqrt(runs * p * (1 - p));
    CHECK(std::abs(seen[k] - runs * p) <= 3 * sd + 1e-9);
  }

  const auto all = kmeanspp_init(pts, 4, std::uint64_t{3});
  std::vector<int> hit(m, 0);
  for (const Point& c : all) ++hit[index(c)];
  CHECK(hit == std::vector<int>{1, 1, 1, 1});
  CHECK_THROWS_AS(kmeanspp_init(pts, 5, std::uint64_t{1}), Error);
}

TEST_CASE("all commuters at one point") {
  const std::vector<Point> pts(7, Point{250, 250});
  ClusterOptions opt;
  opt.max_size = 10;
  opt.restarts = 5;
  const Clustering c = cluster_points(pts, opt);
  REQUIRE(c.k() == 1);
  CHECK(c.centers[0].x == 250);
  CHECK(c.objective == 0.0);
}

TEST_CASE("two separated blobs are recovered") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    const int N = 3 + trial % 3;
    std::normal_distribution<double> jitter(0, 150);
    std::vector<Point> pts;
    for (int b = 0; b < 2; ++b)
      for (int i = 0; i < N; ++i) pts.push_back({b * 20000 + jitter(rng), jitter(rng)});
    ClusterOptions opt;
    opt.max_size = N;
    opt.restarts = 20;
    opt.seed = trial + 1;
    const Clustering c = cluster_points(pts, opt);
    REQUIRE(c.k() == 2);
    for (int i = 1; i < N; ++i) CHECK(c.assignment[i] == c.assignment[0]);
    for (int i = N + 1; i < 2 * N; ++i) CHECK(c.assignment[i] == c.assignment[N]);
    CHECK(c.assignment[0] != c.assignment[N]);

    // Best split into two groups of N, each measured from its mean.
    const int m = 2 * N;
    double best = std::numeric_limits<double>::infinity();
    for (unsigned mask = 0; mask < (1u << m); ++mask) {
      if (std::popcount(mask) != N || !(mask & 1u)) continue;
      double obj = 0;
      for (int side = 0; side < 2; ++side) {
        Point mean{0, 0};
        for (int i = 0; i < m; ++i)
          if (((mask >> i) & 1u) == static_cast<unsigned>(side)) {
            mean.x += pts[i].x / N;
            mean.y += pts[i].y / N;
          }
        for (int i = 0; i < m; ++i)
          if (((mask >> i) & 1u) == static_cast<unsigned>(side)) obj += euclidean(pts[i], mean);
      }
      best = std::min(best, obj);
    }
    CHECK(c.objective == doctest::Approx(best).epsilon(1e-9));
  }
}

TEST_CASE("runs respect the size limit and converge") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 30; ++trial) {
    const int m = 10 + static_cast<int>(rng() % 30);
    const auto pts = random_points(rng, m, 8000);
    const int N = 3 + static_cast<int>(rng() % 8);
    const Clustering c = cluster_run(pts, N, rng());
    CHECK(c.k() == (m + N - 1) / N);
    for (const auto& g : c.members()) CHECK(static_cast<int>(g.size()) <= N);
    CHECK(c.iterations <= 500);
    // Centers are the means of their points.
    for (int u = 0; u < c.k(); ++u) {
      const auto g = c.members()[u];
      if (g.empty()) continue;
      double x = 0, y = 0;
      for (int i : g) {
        x += pts[i].x;
        y += pts[i].y;
      }
      CHECK(c.centers[u].x == doctest::Approx(x / g.size()));
      CHECK(c.centers[u].y == doctest::Approx(y / g.size()));
    }
  }
  ClusterOptions opt;
  opt.max_size = 4;
  opt.restarts = 8;
  opt.threads = 4;
  const auto pts = random_points(rng, 25, 4000);
  const Clustering a = cluster_points(pts, opt);
  opt.threads = 1;
  const Clustering b = cluster_points(pts, opt);
  CHECK(a.assignment == b.assignment);
  CHECK(a.seed == opt.seed);
  CHECK(a.restarts == 8);
  CHECK_THROWS_AS(cluster_run(pts, 0, 1), Error);
}
