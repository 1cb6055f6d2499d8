#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <unordered_map>
#include <vector>

#include "ownmap/ownership.hpp"
#include "ownmap/roster.hpp"

namespace ownmap {

/// One mapped object instance.
struct ObjectRecord {
    std::string object_id;
    std::string class_label;
    std::array<double, 3> position{0.0, 0.0, 0.0};
    std::vector<double> feature;  // unit L2 norm
    OwnershipScores scores;
    ShareDecision share;
    bool asked = false;
};

/// Deviation from unit norm tolerated before a feature vector is rejected.
/// Within the tolerance the vector is renormalized silently.
inline constexpr double kFeatureNormTolerance = 1e-3;

/// Object store backing context extraction. Immutable geometry/features
/// after load; ownership fields are snapshotted into the acquisition state
/// and written back between passes, so concurrent read-only queries are
/// safe with a single writer.
class MapStore {
public:
    MapStore() = default;
    explicit MapStore(Roster roster) : roster_(std::move(roster)) {}

    /// Validates and inserts. Duplicate ids, bad feature norms, mixed
    /// feature dimensions and out-of-range scores all throw
    /// ValidationError. Missing scores are initialized to 0 for every
    /// roster user.
    void add(ObjectRecord record);

    const Roster& roster() const noexcept { return roster_; }

    std::size_t size() const noexcept { return objects_.size(); }
    bool empty() const noexcept { return objects_.empty(); }

    bool contains(const std::string& object_id) const;
    const ObjectRecord& at(const std::string& object_id) const;
    ObjectRecord& at(const std::string& object_id);

    /// Records in insertion order.
    const std::vector<ObjectRecord>& objects() const noexcept { return objects_; }

    std::vector<std::string> object_ids() const;

private:
    Roster roster_;
    std::vector<ObjectRecord> objects_;
    std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace ownmap
