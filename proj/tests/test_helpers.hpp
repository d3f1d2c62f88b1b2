#pragma once

#include <optional>
#include <string>

#include "mobility/ingest.hpp"
#include "mobility/time.hpp"

namespace mobility::test {

inline CleanTrip make_trip(const std::string& start_time, double duration_s, LatLon start,
                           LatLon end, std::optional<UserType> label = std::nullopt,
                           VehicleClass cls = VehicleClass::DocklessBike) {
    CleanTrip t;
    t.start_instant = *parse_timestamp(start_time);
    t.duration_s = duration_s;
    t.start_loc = {std::nullopt, start};
    t.end_loc = {std::nullopt, end};
    t.label = label;
    t.vehicle_class = cls;
    return t;
}

} // namespace mobility::test
