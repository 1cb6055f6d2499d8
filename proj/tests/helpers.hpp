#pragma once

#include <array>
#include <string>
#include <vector>

#include "ownmap/map_store.hpp"
#include "ownmap/ownership.hpp"
#include "ownmap/roster.hpp"
#include "ownmap/rng.hpp"

namespace testutil {

inline ownmap::Roster bmt_roster() {
    ownmap::Roster roster;
    roster.add({"Bob", "father", "office worker"});
    roster.add({"Mary", "mother", "homemaker"});
    roster.add({"Tom", "son", "elementary school student"});
    return roster;
}

inline ownmap::OwnershipScores bmt_scores(double bob, double mary, double tom) {
    return {{"Bob", bob}, {"Mary", mary}, {"Tom", tom}};
}

inline std::vector<double> unit_feature(std::size_t dim, std::size_t axis) {
    std::vector<double> f(dim, 0.0);
    f[axis % dim] = 1.0;
    return f;
}

inline std::vector<double> random_unit(ownmap::Rng& rng, std::size_t dim) {
    std::vector<double> f(dim);
    double norm2 = 0.0;
    for (auto& x : f) {
        x = rng.normal();
        norm2 += x * x;
    }
    for (auto& x : f) x /= std::sqrt(norm2);
    return f;
}

inline ownmap::ObjectRecord make_object(const ownmap::Roster& roster, std::string id,
                                        std::array<double, 3> position,
                                        std::vector<double> feature,
                                        std::string class_label = "thing") {
    ownmap::ObjectRecord record;
    record.object_id = std::move(id);
    record.class_label = std::move(class_label);
    record.position = position;
    record.feature = std::move(feature);
    record.scores = ownmap::zero_scores(roster);
    return record;
}

}  // namespace testutil
