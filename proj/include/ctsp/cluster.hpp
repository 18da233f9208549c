#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "ctsp/model.hpp"

namespace ctsp {

// k-means++ seeding: the first center is drawn uniformly, every next one
// with probability proportional to the squared distance to the nearest
// center chosen so far.
std::vector<Point> kmeanspp_init(const std::vector<Point>& points, int k, std::mt19937_64& rng);
std::vector<Point> kmeanspp_init(const std::vector<Point>& points, int k, std::uint64_t seed);

struct Assignment {
  std::vector<int> center_of;  // per point
  double objective = 0.0;      // total Euclidean point-center distance
};

// Capacitated assignment (each point to one center, at most `max_size`
// points per center) solved exactly as a binary program.
Assignment assign(const std::vector<Point>& points, const std::vector<Point>& centers,
                  int max_size);

struct ClusterOptions {
  int max_size = 50;     // N
  int restarts = 100;
  std::uint64_t seed = 1;
  int max_iterations = 500;
  int threads = 1;
};

struct Clustering {
  std::vector<Point> centers;
  std::vector<int> assignment;  // per point
  double objective = 0.0;
  int restarts = 0;
  std::uint64_t seed = 0;
  int iterations = 0;       // of the returned run
  bool cycled = false;      // the returned run revisited an assignment
  std::vector<double> history;  // assignment objective per iteration

  int k() const { return static_cast<int>(centers.size()); }
  std::vector<std::vector<int>> members() const;
};

// One seeded Lloyd-style run: assign, move centers to the mean of their
// points, until the assignment repeats.
Clustering cluster_run(const std::vector<Point>& points, int max_size, std::uint64_t seed,
                       int max_iterations = 500);

// Best of `restarts` runs by assignment objective.
Clustering cluster_points(const std::vector<Point>& points, const ClusterOptions& opt);
Clustering cluster_commuters(const std::vector<Commuter>& commuters, const ClusterOptions& opt);

}  // namespace ctsp
