#include "ownmap/context.hpp"

#include <algorithm>
#include <cmath>

#include "ownmap/errors.hpp"

namespace ownmap {

double spatial_weight(double d2, double sigma) {
    return std::exp(-d2 / (2.0 * sigma * sigma));
}

std::vector<ContextEntry> neighbor_context(const MapStore& map,
                                           const std::string& target,
                                           const SpatialParams& params) {
    if (params.sigma <= 0.0)
        throw ValidationError("spatial params: sigma must be positive");
    if (params.weight_floor <= 0.0 || params.weight_floor >= 1.0)
        throw ValidationError("spatial params: weight_floor must lie in (0,1)");

    const ObjectRecord& origin = map.at(target);

    std::vector<ContextEntry> entries;
    for (const auto& other : map.objects()) {
        if (other.object_id == target) continue;
        const double dx = other.position[0] - origin.position[0];
        const double dy = other.position[1] - origin.position[1];
        const double dz = params.gamma * (other.position[2] - origin.position[2]);
        const double d2 = dx * dx + dy * dy + dz * dz;
        const double w = spatial_weight(d2, params.sigma);
        if (w < params.weight_floor) continue;

        ContextEntry entry;
        entry.object_id = other.object_id;
        entry.class_label = other.class_label;
        entry.kind = ContextKind::neighbor;
        entry.distance = std::sqrt(d2);
        entry.weight = w;
        entries.push_back(std::move(entry));
    }

    std::sort(entries.begin(), entries.end(), [](const ContextEntry& a, const ContextEntry& b) {
        if (a.weight != b.weight) return a.weight > b.weight;
        if (a.distance != b.distance) return a.distance < b.distance;
        return a.object_id < b.object_id;
    });
    if (entries.size() > params.k_near) entries.resize(params.k_near);
    return entries;
}

std::vector<ContextEntry> similar_context(const MapStore& map,
                                          const std::string& target,
                                          const SimilarityParams& params) {
    const ObjectRecord& origin = map.at(target);

    std::vector<ContextEntry> entries;
    for (const auto& other : map.objects()) {
        if (other.object_id == target) continue;
        double dot = 0.0;
        for (std::size_t i = 0; i < origin.feature.size(); ++i)
            dot += origin.feature[i] * other.feature[i];

        ContextEntry entry;
        entry.object_id = other.object_id;
        entry.class_label = other.class_label;
        entry.kind = ContextKind::similar;
        entry.similarity = dot;
        entries.push_back(std::move(entry));
    }

    std::sort(entries.begin(), entries.end(), [](const ContextEntry& a, const ContextEntry& b) {
        if (a.similarity != b.similarity) return a.similarity > b.similarity;
        return a.object_id < b.object_id;
    });
    if (entries.size() > params.k_sim) entries.resize(params.k_sim);
    return entries;
}

}  // namespace ownmap
