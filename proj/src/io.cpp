#include "ctsp/io.hpp"

#include <fstream>

namespace ctsp {

namespace {

Json trip_to_json(const Trip& t) {
  return Json{{"o", t.origin}, {"dt", t.desired_departure}, {"d", t.destination},
              {"at", t.desired_arrival}};
}

Trip trip_from_json(const Json& j, Direction dir) {
  Trip t;
  t.origin = j.at("o").get<int>();
  t.destination = j.at("d").get<int>();
  t.desired_departure = j.at("dt").get<double>();
  t.desired_arrival = j.at("at").get<double>();
  t.direction = dir;
  return t;
}

template <typename T>
Json matrix_to_json(const Matrix<T>& m) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

template <typename T>
Matrix<T> matrix_from_json(const Json& j, std::size_t n, const char* what) {
  if (!j.is_array() || j.size() != n) throw Error(std::string(what) + " matrix has the wrong size");
  Matrix<T> m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!j[i].is_array() || j[i].size() != n)
      throw Error(std::string(what) + " matrix has the wrong size");
    for (std::size_t k = 0; k < n; ++k) m(i, k) = j[i][k].get<T>();
  }
  return m;
}

}  // namespace

Parameters parameters_from_json(const Json& j, Parameters p) {
  p.capacity = j.value("capacity", p.capacity);
  p.delta_s = j.value("delta_s", p.delta_s);
  p.detour_ratio = j.value("detour_ratio", p.detour_ratio);
  p.fixed_cost_multiplier = j.value("fixed_cost_multiplier", p.fixed_cost_multiplier);
  p.service_s = j.value("service_s", p.service_s);
  return p;
}

Json instance_to_json(const Instance& inst, bool with_matrices) {
  const Parameters& p = inst.params();
  Json j{{"capacity", p.capacity},
         {"delta_s", p.delta_s},
         {"detour_ratio", p.detour_ratio},
         {"fixed_cost_multiplier", p.fixed_cost_multiplier},
         {"service_s", p.service_s}};
  Json cs = Json::array();
  for (const Commuter& c : inst.commuters())
    cs.push_back({{"id", c.id},
                  {"home", {c.home.x, c.home.y}},
                  {"inbound", trip_to_json(c.inbound)},
                  {"outbound", trip_to_json(c.outbound)}});
  j["commuters"] = std::move(cs);
  Json locs = Json::array();
  for (const Point& pt : inst.travel().points) locs.push_back({pt.x, pt.y});
  j["locations"] = std::move(locs);
  if (with_matrices) {
    j["tau"] = matrix_to_json(inst.travel().tau);
    j["delta"] = matrix_to_json(inst.travel().dist);
  }
  return j;
}

Instance instance_from_json(const Json& j, const Parameters& params) {
  std::vector<Point> points;
  for (const Json& p : j.at("locations")) points.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
  std::shared_ptr<const TravelData> travel;
  if (j.contains("tau") && j.contains("delta")) {
    TravelData t;
    t.points = points;
    t.tau = matrix_from_json<Time>(j["tau"], points.size(), "tau");
    t.dist = matrix_from_json<Meters>(j["delta"], points.size(), "delta");
    travel = std::make_shared<const TravelData>(std::move(t));
  } else {
    TravelModel model;
    model.speed_mps = j.value("speed_mps", model.speed_mps);
    travel = std::make_shared<const TravelData>(model.build(points));
  }
  std::vector<Commuter> commuters;
  for (const Json& c : j.at("commuters")) {
    Commuter x;
    x.id = c.value("id", static_cast<int>(commuters.size()));
    if (c.contains("home")) x.home = {c["home"].at(0).get<double>(), c["home"].at(1).get<double>()};
    x.inbound = trip_from_json(c.at("inbound"), Direction::Inbound);
    x.outbound = trip_from_json(c.at("outbound"), Direction::Outbound);
    commuters.push_back(x);
  }
  return build_instance(std::move(commuters), std::move(travel), params);
}

Instance instance_from_json(const Json& j) {
  return instance_from_json(j, parameters_from_json(j));
}

Json plan_to_json(const Plan& plan) {
  Json routes = Json::array();
  for (const Route& r : plan.routes)
    routes.push_back({{"driver", r.driver},
                      {"direction", to_string(r.direction)},
                      {"stops", r.stops},
                      {"riders", r.riders},
                      {"schedule", r.schedule},
                      {"distance", r.distance}});
  return Json{{"routes", std::move(routes)},
              {"vehicle_count", plan.vehicle_count},
              {"total_distance", plan.total_distance},
              {"objective", plan.objective},
              {"gap", plan.gap}};
}

Plan plan_from_json(const Json& j) {
  Plan plan;
  try {
    for (const Json& r : j.at("routes")) {
      Route route;
      route.direction = direction_from_string(r.at("direction").get<std::string>());
      route.driver = r.at("driver").get<int>();
      route.stops = r.at("stops").get<std::vector<int>>();
      route.riders = r.value("riders", std::vector<int>{});
      route.schedule = r.value("schedule", std::vector<Time>{});
      route.distance = r.value("distance", Meters{0});
      plan.routes.push_back(std::move(route));
    }
    plan.vehicle_count = j.value("vehicle_count", static_cast<int>(plan.routes.size()));
    plan.total_distance = j.value("total_distance", Meters{0});
    plan.objective = j.value("objective", 0.0);
    plan.gap = j.value("gap", 0.0);
  } catch (const Json::exception& e) {
    throw Error(std::string("plan: ") + e.what());
  }
  return plan;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw Error(path + ": " + e.what());
  }
}

void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << j.dump(2) << '\n';
}

Instance load_instance(const std::string& path) {
  try {
    return instance_from_json(read_json_file(path));
  } catch (const Json::exception& e) {
    throw Error(path + ": " + e.what());
  }
}

void save_instance(const std::string& path, const Instance& inst, bool with_matrices) {
  write_json_file(path, instance_to_json(inst, with_matrices));
}

}  // namespace ctsp
