#include "ctsp/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ctsp {

const char* to_string(Direction d) { return d == Direction::Inbound ? "inbound" : "outbound"; }

Direction direction_from_string(const std::string& s) {
  if (s == "inbound" || s == "in" || s == "+") return Direction::Inbound;
  if (s == "outbound" || s == "out" || s == "-") return Direction::Outbound;
  throw Error("unknown direction '" + s + "'");
}

double euclidean(const Point& a, const Point& b) { return std::hypot(a.x - b.x, a.y - b.y); }

TravelData TravelModel::build(const std::vector<Point>& points) const {
  if (!(speed_mps > 0)) throw Error("travel model speed must be positive");
  const std::size_t n = points.size();
  TravelData t;
  t.points = points;
  t.tau = Matrix<Time>(n, n, 0.0);
  t.dist = Matrix<Meters>(n, n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double d = euclidean(points[i], points[j]);
      t.tau(i, j) = std::ceil(d / speed_mps);
      t.dist(i, j) = static_cast<Meters>(std::llround(d));
    }
  }
  shortest_path_closure(t.tau);
  shortest_path_closure(t.dist);
  return t;
}

Network::Network(Direction dir, std::vector<Location> nodes,
                 std::shared_ptr<const TravelData> travel)
    : dir_(dir), nodes_(std::move(nodes)), travel_(std::move(travel)) {}

CommuterWindows derive_time_windows(const Commuter& c, Time delta_s, double detour_ratio,
                                    const TravelData& travel, Time service_s) {
  if (delta_s < 0) throw Error("delta must be non-negative");
  if (detour_ratio < 0) throw Error("detour ratio must be non-negative");

  CommuterWindows w;
  const Time s = service_s;

  // Inbound: desired arrival at the destination.
  {
    const Time direct = travel.tau(c.inbound.origin, c.inbound.destination);
    const Time limit = (1.0 + detour_ratio) * direct;
    Location& d = w.inbound_destination;
    d.id = c.inbound.destination;
    d.window_start = c.inbound.desired_arrival - delta_s;
    d.window_end = c.inbound.desired_arrival + delta_s;
    d.service = s;
    d.demand = 0;
    Location& o = w.inbound_origin;
    o.id = c.inbound.origin;
    o.window_start = d.window_start - s - limit;
    o.window_end = d.window_end - s - direct;
    o.service = s;
    o.demand = 1;
    o.ride_limit = limit;
  }
  // Outbound: desired departure at the origin.
  {
    const Time direct = travel.tau(c.outbound.origin, c.outbound.destination);
    const Time limit = (1.0 + detour_ratio) * direct;
    Location& o = w.outbound_origin;
    o.id = c.outbound.origin;
    o.window_start = c.outbound.desired_departure - delta_s;
    o.window_end = c.outbound.desired_departure + delta_s;
    o.service = s;
    o.demand = 1;
    o.ride_limit = limit;
    Location& d = w.outbound_destination;
    d.id = c.outbound.destination;
    d.window_start = o.window_start + s + direct;
    d.window_end = o.window_end + s + limit;
    d.service = s;
    d.demand = 0;
  }

  for (const Location* l : {&w.inbound_origin, &w.inbound_destination, &w.outbound_origin,
                            &w.outbound_destination}) {
    if (l->window_start > l->window_end + kTimeEps) {
      std::ostringstream os;
      os << "commuter " << c.id << ": empty time window [" << l->window_start << ", "
         << l->window_end << "] at location " << l->id;
      throw Error(os.str());
    }
  }
  return w;
}

Meters Instance::max_distance_entry() const {
  Meters m = 0;
  const auto& d = travel_->dist;
  for (std::size_t i = 0; i < d.rows(); ++i)
    for (std::size_t j = 0; j < d.cols(); ++j) m = std::max(m, d(i, j));
  return m;
}

Instance build_instance(std::vector<Commuter> commuters, std::shared_ptr<const TravelData> travel,
                        const Parameters& params) {
  if (commuters.empty()) throw Error("instance needs at least one commuter");
  if (!travel) throw Error("missing travel data");
  if (params.capacity < 1) throw Error("capacity must be at least 1");
  if (params.service_s < 0) throw Error("service duration must be non-negative");
  const std::size_t locs = travel->points.size();
  if (travel->tau.rows() != locs || travel->tau.cols() != locs || travel->dist.rows() != locs ||
      travel->dist.cols() != locs)
    throw Error("travel matrices do not match the location count");
  for (std::size_t i = 0; i < locs; ++i) {
    for (std::size_t j = 0; j < locs; ++j) {
      if (travel->tau(i, j) < 0 || travel->dist(i, j) < 0)
        throw Error("travel matrices must be non-negative");
      if (travel->tau(i, j) != std::floor(travel->tau(i, j)))
        throw Error("travel times must be integral seconds");
    }
  }
  if (auto v = find_triangle_violation(travel->tau)) {
    std::ostringstream os;
    os << "travel times violate the triangle inequality at (" << (*v)[0] << ", " << (*v)[1]
       << ", " << (*v)[2] << ")";
    throw Error(os.str());
  }
  if (auto v = find_triangle_violation(travel->dist)) {
    std::ostringstream os;
    os << "distances violate the triangle inequality at (" << (*v)[0] << ", " << (*v)[1] << ", "
       << (*v)[2] << ")";
    throw Error(os.str());
  }

  const int n = static_cast<int>(commuters.size());
  std::vector<Location> in(2 * n), out(2 * n);
  for (int i = 0; i < n; ++i) {
    Commuter& c = commuters[i];
    if (c.id != i) throw Error("commuter ids must be 0..n-1 in order");
    c.inbound.direction = Direction::Inbound;
    c.outbound.direction = Direction::Outbound;
    for (int loc : {c.inbound.origin, c.inbound.destination, c.outbound.origin,
                    c.outbound.destination})
      if (loc < 0 || static_cast<std::size_t>(loc) >= locs)
        throw Error("commuter " + std::to_string(i) + " references an unknown location");
    if (c.inbound.origin != c.outbound.destination)
      throw Error("commuter " + std::to_string(i) + ": outbound trip must end at home");
    const CommuterWindows w =
        derive_time_windows(c, params.delta_s, params.detour_ratio, *travel, params.service_s);
    in[i] = w.inbound_origin;
    in[n + i] = w.inbound_destination;
    out[i] = w.outbound_origin;
    out[n + i] = w.outbound_destination;
  }

  Instance inst;
  inst.params_ = params;
  inst.commuters_ = std::move(commuters);
  inst.travel_ = travel;
  inst.networks_[0] = Network(Direction::Inbound, std::move(in), travel);
  inst.networks_[1] = Network(Direction::Outbound, std::move(out), travel);
  return inst;
}

Instance build_instance(std::vector<Commuter> commuters, const std::vector<Point>& points,
                        const TravelModel& model, const Parameters& params) {
  auto travel = std::make_shared<const TravelData>(model.build(points));
  return build_instance(std::move(commuters), std::move(travel), params);
}

Instance subinstance(const Instance& inst, const std::vector<int>& commuters) {
  std::vector<Commuter> cs;
  for (int id : commuters) {
    if (id < 0 || id >= inst.n()) throw Error("commuter id out of range");
    Commuter c = inst.commuters()[id];
    c.id = static_cast<int>(cs.size());
    cs.push_back(c);
  }
  return build_instance(std::move(cs), inst.travel_ptr(), inst.params());
}

Instance with_parameters(const Instance& inst, const Parameters& params) {
  return build_instance(inst.commuters(), inst.travel_ptr(), params);
}

Commuter make_commuter(int id, int home_loc, int work_loc, const TravelData& travel,
                       Time arrival, Time departure, const Point& home) {
  Commuter c;
  c.id = id;
  c.home = home;
  const Time there = travel.tau(home_loc, work_loc);
  const Time back = travel.tau(work_loc, home_loc);
  c.inbound = Trip{home_loc, work_loc, arrival - there, arrival, Direction::Inbound};
  c.outbound = Trip{work_loc, home_loc, departure, departure + back, Direction::Outbound};
  return c;
}

Meters route_distance(const Network& net, const std::vector<int>& stops) {
  Meters d = 0;
  for (std::size_t k = 1; k < stops.size(); ++k) d += net.dist(stops[k - 1], stops[k]);
  return d;
}

std::vector<int> riders_of(const Network& net, const std::vector<int>& stops) {
  std::vector<int> r;
  for (int s : stops)
    if (net.is_origin(s)) r.push_back(s);
  std::sort(r.begin(), r.end());
  r.erase(std::unique(r.begin(), r.end()), r.end());
  return r;
}

Route make_route(const Network& net, std::vector<int> stops) {
  Route r;
  r.direction = net.direction();
  r.driver = stops.empty() ? -1 : net.commuter_of(stops.front());
  r.riders = riders_of(net, stops);
  r.distance = route_distance(net, stops);
  r.stops = std::move(stops);
  return r;
}

}  // namespace ctsp
