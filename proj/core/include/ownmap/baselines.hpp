#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ownmap/evaluation.hpp"
#include "ownmap/events.hpp"

namespace ownmap {
namespace baselines {

/// Owner set of the most recent user of the object (timestamp ties broken
/// by later log position). nullopt when the object has no events.
std::optional<OwnerSet> last_user_predict(const EventLog& log, const std::string& object_id);

/// Owner set of the most frequent user (count ties broken by most recent
/// event, then by name). nullopt when the object has no events.
std::optional<OwnerSet> frequency_predict(const EventLog& log, const std::string& object_id);

/// Runs one baseline over every object id; objects without events map to
/// empty sets so the shared evaluator treats them as no-prediction.
PredictionMap predict_all(const EventLog& log,
                          const std::vector<std::string>& object_ids,
                          const std::string& method);  // "last_user" | "frequency"

}  // namespace baselines
}  // namespace ownmap
