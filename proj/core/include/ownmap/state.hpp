#pragma once

#include <cstddef>
#include <string>
#include <unordered_map>
#include <vector>

#include "ownmap/map_store.hpp"
#include "ownmap/ownership.hpp"

namespace ownmap {

/// Mutable per-object estimation state carried across acquisition passes.
struct ObjectState {
    OwnershipScores scores;
    ShareDecision share;
    bool asked = false;
    bool needs_revisit = false;               // asked but the answer named nobody
    std::vector<std::string> answered;        // confirmed owners, name-sorted
};

/// Ownership estimation state for a whole map plus the query budget.
/// Object order mirrors the map's insertion order.
class AcquisitionState {
public:
    AcquisitionState() = default;

    /// Snapshot the map's ownership fields (asked objects keep their map
    /// scores; everything else starts from the stored scores).
    static AcquisitionState from_map(const MapStore& map, std::size_t q_max);

    /// Rebuilds a state from persisted fields (trace deserialization).
    static AcquisitionState restore(std::vector<std::string> ids,
                                    std::unordered_map<std::string, ObjectState> states,
                                    std::size_t q_cnt,
                                    std::size_t q_max);

    const std::vector<std::string>& object_ids() const noexcept { return ids_; }

    bool contains(const std::string& object_id) const;
    const ObjectState& at(const std::string& object_id) const;
    ObjectState& at(const std::string& object_id);

    std::size_t query_count() const noexcept { return q_cnt_; }
    std::size_t q_max() const noexcept { return q_max_; }
    void count_query();

    std::size_t size() const noexcept { return ids_.size(); }

private:
    std::vector<std::string> ids_;
    std::unordered_map<std::string, ObjectState> states_;
    std::size_t q_cnt_ = 0;
    std::size_t q_max_ = 0;
};

}  // namespace ownmap
