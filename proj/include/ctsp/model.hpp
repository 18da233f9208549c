#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ctsp {

// Times are seconds since midnight. Inputs are integral; ride limits
// (1+R)*tau and the windows derived from them may carry a fraction.
using Time = double;
using Meters = std::int64_t;

inline constexpr double kTimeEps = 1e-9;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Direction : std::uint8_t { Inbound = 0, Outbound = 1 };

inline int index_of(Direction d) { return static_cast<int>(d); }
const char* to_string(Direction d);
Direction direction_from_string(const std::string& s);

struct Point {
  double x = 0.0;
  double y = 0.0;
};

double euclidean(const Point& a, const Point& b);

struct Trip {
  int origin = 0;       // location id
  int destination = 0;  // location id
  Time desired_departure = 0;
  Time desired_arrival = 0;
  Direction direction = Direction::Inbound;
};

struct Commuter {
  int id = 0;
  Point home;
  Trip inbound;
  Trip outbound;
};

// Per-node data of a pricing / scheduling network. Node i < n is the origin
// of commuter i, node n + i its destination.
struct Location {
  int id = 0;  // location id (row/column in the travel matrices)
  Time window_start = 0;
  Time window_end = 0;
  Time service = 0;
  int demand = 0;
  Time ride_limit = 0;  // origins only
};

template <typename T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, T init = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, init) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

struct TravelData {
  std::vector<Point> points;  // indexed by location id
  Matrix<Time> tau;
  Matrix<Meters> dist;
};

// Euclidean travel model for synthetic instances: tau = ceil(d / speed),
// delta = round(d), followed by shortest-path closure of both matrices.
struct TravelModel {
  double speed_mps = 10.0;

  TravelData build(const std::vector<Point>& points) const;
};

// In-place Floyd-Warshall closure.
template <typename T>
void shortest_path_closure(Matrix<T>& m) {
  const std::size_t n = m.rows();
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (m(i, k) + m(k, j) < m(i, j)) m(i, j) = m(i, k) + m(k, j);
}

// First violated triple (i, j, k) with m(i,k) > m(i,j) + m(j,k), if any.
template <typename T>
std::optional<std::array<std::size_t, 3>> find_triangle_violation(const Matrix<T>& m,
                                                                  double tol = 1e-9);

struct Parameters {
  int capacity = 4;                     // K
  Time delta_s = 600;                   // time-window half width
  double detour_ratio = 0.5;            // R
  double fixed_cost_multiplier = 1000;  // M
  Time service_s = 0;                   // s_i at every stop
};

// One direction of an instance: 2n nodes sharing the instance travel data.
class Network {
 public:
  Network() = default;
  Network(Direction dir, std::vector<Location> nodes, std::shared_ptr<const TravelData> travel);

  Direction direction() const { return dir_; }
  int n() const { return static_cast<int>(nodes_.size() / 2); }
  int size() const { return static_cast<int>(nodes_.size()); }
  bool is_origin(int node) const { return node < n(); }
  int commuter_of(int node) const { return node < n() ? node : node - n(); }
  int origin_of(int commuter) const { return commuter; }
  int destination_of(int commuter) const { return n() + commuter; }

  const Location& node(int i) const { return nodes_[i]; }
  Location& node(int i) { return nodes_[i]; }
  const std::vector<Location>& nodes() const { return nodes_; }

  Time tau(int i, int j) const { return travel_->tau(nodes_[i].id, nodes_[j].id); }
  Meters dist(int i, int j) const { return travel_->dist(nodes_[i].id, nodes_[j].id); }
  const TravelData& travel() const { return *travel_; }

 private:
  Direction dir_ = Direction::Inbound;
  std::vector<Location> nodes_;
  std::shared_ptr<const TravelData> travel_;
};

// The derived nodes of one commuter: origin and destination per direction.
struct CommuterWindows {
  Location inbound_origin;
  Location inbound_destination;
  Location outbound_origin;
  Location outbound_destination;
};

CommuterWindows derive_time_windows(const Commuter& c, Time delta_s, double detour_ratio,
                                    const TravelData& travel, Time service_s = 0);

class Instance {
 public:
  Instance() = default;

  int n() const { return static_cast<int>(commuters_.size()); }
  const Parameters& params() const { return params_; }
  int capacity() const { return params_.capacity; }
  const std::vector<Commuter>& commuters() const { return commuters_; }
  const Network& network(Direction d) const { return networks_[index_of(d)]; }
  const TravelData& travel() const { return *travel_; }
  std::shared_ptr<const TravelData> travel_ptr() const { return travel_; }
  Meters max_distance_entry() const;

  friend Instance build_instance(std::vector<Commuter>, std::shared_ptr<const TravelData>,
                                 const Parameters&);

 private:
  Parameters params_;
  std::vector<Commuter> commuters_;
  std::shared_ptr<const TravelData> travel_;
  Network networks_[2];
};

// Validates travel data and derives every commuter's windows.
Instance build_instance(std::vector<Commuter> commuters, std::shared_ptr<const TravelData> travel,
                        const Parameters& params);

// Registers homes and workplaces as locations, builds travel data with the
// model, and assembles the instance.
Instance build_instance(std::vector<Commuter> commuters, const std::vector<Point>& points,
                        const TravelModel& model, const Parameters& params);

// The commuters listed (renumbered 0..m-1 in the given order) over the same
// travel data and parameters.
Instance subinstance(const Instance& inst, const std::vector<int>& commuters);
// Same commuters and travel data under other parameters.
Instance with_parameters(const Instance& inst, const Parameters& params);

// Commuter with trips home -> workplace (arrive at `arrival`) and back
// (depart at `departure`); dt/at of the non-desired endpoints follow tau.
Commuter make_commuter(int id, int home_loc, int work_loc, const TravelData& travel,
                       Time arrival, Time departure, const Point& home);

struct Route {
  Direction direction = Direction::Inbound;
  int driver = 0;
  std::vector<int> stops;   // node ids of the direction network
  std::vector<int> riders;  // sorted commuter ids, driver included
  std::vector<Time> schedule;
  Meters distance = 0;
  double cost = 0.0;
};

Meters route_distance(const Network& net, const std::vector<int>& stops);
std::vector<int> riders_of(const Network& net, const std::vector<int>& stops);
Route make_route(const Network& net, std::vector<int> stops);

template <typename T>
std::optional<std::array<std::size_t, 3>> find_triangle_violation(const Matrix<T>& m,
                                                                  double tol) {
  const std::size_t n = m.rows();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k)
        if (static_cast<double>(m(i, k)) >
            static_cast<double>(m(i, j)) + static_cast<double>(m(j, k)) + tol)
          return std::array<std::size_t, 3>{i, j, k};
  return std::nullopt;
}

}  // namespace ctsp
