#include "ownmap/map_store.hpp"

#include <cmath>

#include "ownmap/errors.hpp"

namespace ownmap {

namespace {

double l2_norm(const std::vector<double>& v) {
    double sum = 0.0;
    for (double x : v) sum += x * x;
    return std::sqrt(sum);
}

}  // namespace

void MapStore::add(ObjectRecord record) {
    if (record.object_id.empty())
        throw ValidationError("map: object id must not be empty");
    if (index_.count(record.object_id))
        throw ValidationError("map: duplicate object id '" + record.object_id + "'");

    if (record.feature.empty())
        throw ValidationError("map: object '" + record.object_id + "' has no feature vector");
    if (!objects_.empty() && record.feature.size() != objects_.front().feature.size())
        throw ValidationError("map: object '" + record.object_id +
                              "' feature dimension differs from the rest of the map");

    const double norm = l2_norm(record.feature);
    if (std::abs(norm - 1.0) > kFeatureNormTolerance)
        throw ValidationError("map: object '" + record.object_id +
                              "' feature norm " + std::to_string(norm) +
                              " deviates from 1 beyond tolerance");
    // Renormalize only beyond accumulated rounding noise, so loading an
    // already-normalized vector keeps its bits (save/load idempotence).
    if (std::abs(norm - 1.0) > 1e-9) {
        for (double& x : record.feature) x /= norm;
    }

    for (const auto& user : roster_.users()) {
        if (!record.scores.count(user.name)) record.scores[user.name] = 0.0;
    }
    validate_scores(record.scores, roster_);

    index_[record.object_id] = objects_.size();
    objects_.push_back(std::move(record));
}

bool MapStore::contains(const std::string& object_id) const {
    return index_.count(object_id) > 0;
}

const ObjectRecord& MapStore::at(const std::string& object_id) const {
    auto it = index_.find(object_id);
    if (it == index_.end())
        throw ValidationError("map: unknown object id '" + object_id + "'");
    return objects_[it->second];
}

ObjectRecord& MapStore::at(const std::string& object_id) {
    auto it = index_.find(object_id);
    if (it == index_.end())
        throw ValidationError("map: unknown object id '" + object_id + "'");
    return objects_[it->second];
}

std::vector<std::string> MapStore::object_ids() const {
    std::vector<std::string> out;
    out.reserve(objects_.size());
    for (const auto& o : objects_) out.push_back(o.object_id);
    return out;
}

}  // namespace ownmap
