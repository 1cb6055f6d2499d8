#include "ownmap/state.hpp"

#include "ownmap/errors.hpp"

namespace ownmap {

AcquisitionState AcquisitionState::from_map(const MapStore& map, std::size_t q_max) {
    AcquisitionState state;
    state.q_max_ = q_max;
    for (const auto& record : map.objects()) {
        ObjectState entry;
        entry.scores = record.scores;
        entry.share = record.share;
        entry.asked = record.asked;
        if (record.asked && record.share.decided()) entry.answered = record.share.owners;
        state.ids_.push_back(record.object_id);
        state.states_.emplace(record.object_id, std::move(entry));
    }
    return state;
}

AcquisitionState AcquisitionState::restore(
    std::vector<std::string> ids,
    std::unordered_map<std::string, ObjectState> states,
    std::size_t q_cnt,
    std::size_t q_max) {
    AcquisitionState state;
    state.ids_ = std::move(ids);
    state.states_ = std::move(states);
    state.q_cnt_ = q_cnt;
    state.q_max_ = q_max;
    for (const auto& id : state.ids_) {
        if (!state.states_.count(id))
            throw ValidationError("state: missing entry for object '" + id + "'");
    }
    return state;
}

bool AcquisitionState::contains(const std::string& object_id) const {
    return states_.count(object_id) > 0;
}

const ObjectState& AcquisitionState::at(const std::string& object_id) const {
    auto it = states_.find(object_id);
    if (it == states_.end())
        throw ValidationError("state: unknown object id '" + object_id + "'");
    return it->second;
}

ObjectState& AcquisitionState::at(const std::string& object_id) {
    auto it = states_.find(object_id);
    if (it == states_.end())
        throw ValidationError("state: unknown object id '" + object_id + "'");
    return it->second;
}

void AcquisitionState::count_query() {
    if (q_cnt_ >= q_max_)
        throw StateError("state: query budget exhausted");
    ++q_cnt_;
}

}  // namespace ownmap
