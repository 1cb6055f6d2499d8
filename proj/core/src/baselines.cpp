#include "ownmap/baselines.hpp"

#include <algorithm>

#include "ownmap/errors.hpp"

namespace ownmap {
namespace baselines {

std::optional<OwnerSet> last_user_predict(const EventLog& log,
                                          const std::string& object_id) {
    const auto indices = log.indices_for_object(object_id);
    if (indices.empty()) return std::nullopt;
    // The log is chronological with stable ordering, so the last index is
    // the latest event (ties resolved by log position).
    const Event& latest = log.events()[indices.back()];
    return OwnerSet{latest.user};
}

std::optional<OwnerSet> frequency_predict(const EventLog& log,
                                          const std::string& object_id) {
    const auto indices = log.indices_for_object(object_id);
    if (indices.empty()) return std::nullopt;

    struct Tally {
        std::size_t count = 0;
        std::size_t last_index = 0;  // position of the user's latest event
    };
    std::map<std::string, Tally> tallies;
    for (const std::size_t idx : indices) {
        Tally& t = tallies[log.events()[idx].user];
        t.count += 1;
        t.last_index = idx;
    }

    std::string best;
    Tally best_tally;
    for (const auto& [user, tally] : tallies) {
        const bool better =
            tally.count > best_tally.count ||
            (tally.count == best_tally.count && tally.last_index > best_tally.last_index) ||
            (tally.count == best_tally.count &&
             tally.last_index == best_tally.last_index && (best.empty() || user < best));
        if (better) {
            best = user;
            best_tally = tally;
        }
    }
    return OwnerSet{best};
}

PredictionMap predict_all(const EventLog& log,
                          const std::vector<std::string>& object_ids,
                          const std::string& method) {
    PredictionMap out;
    for (const auto& id : object_ids) {
        std::optional<OwnerSet> predicted;
        if (method == "last_user") predicted = last_user_predict(log, id);
        else if (method == "frequency") predicted = frequency_predict(log, id);
        else throw ValidationError("baselines: unknown method '" + method + "'");
        out[id] = predicted.value_or(OwnerSet{});
    }
    return out;
}

}  // namespace baselines
}  // namespace ownmap
