#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "ctsp/model.hpp"

namespace ctsp {

struct Schedule {
  std::vector<Time> service_start;          // one per stop
  Time duration = 0;                        // last service start minus first
  std::vector<std::pair<int, Time>> rides;  // (commuter, T_d - T_o - s_o) in pickup order
};

// Pairing, precedence, driver endpoints and capacity. The driver is the
// commuter whose origin is the first stop; `driver` (when >= 0) must match.
bool is_valid(const Network& net, std::span<const int> stops, int capacity, int driver = -1);
bool is_valid(const Route& route, const Network& net, int capacity);

// Minimum-duration schedule of a valid stop sequence: origin windows,
// destination deadlines, waiting only at pickups, and ride limits. Among
// optimal schedules the one with the latest start is returned. Absent when
// no schedule exists.
std::optional<Schedule> feasible(const Network& net, std::span<const int> stops);
std::optional<Schedule> feasible(const Route& route, const Instance& inst);

// Verdict only; cheaper than building the schedule.
bool is_feasible(const Network& net, std::span<const int> stops);

}  // namespace ctsp
