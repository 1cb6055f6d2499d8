#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ownmap/map_store.hpp"

namespace ownmap {

/// Spatial neighborhood parameters. gamma scales the vertical axis inside
/// the distance metric; sigma is the Gaussian range; candidates whose
/// weight falls below weight_floor are discarded before ranking.
struct SpatialParams {
    double gamma = 1.0;
    double sigma = 0.5;
    double weight_floor = 1e-3;
    std::size_t k_near = 5;
};

struct SimilarityParams {
    std::size_t k_sim = 5;
};

enum class ContextKind { neighbor, similar };

/// One context-list entry handed to the scorers: a nearby object with its
/// distance/weight, or a visually similar object with its cosine
/// similarity. known_ownership is attached later from the fact set.
struct ContextEntry {
    std::string object_id;
    std::string class_label;
    ContextKind kind = ContextKind::neighbor;
    double distance = 0.0;
    double weight = 0.0;
    double similarity = 0.0;
    std::optional<std::vector<std::string>> known_ownership;
};

/// Gaussian spatial weight for squared distance d2: exp(-d2 / (2 sigma^2)).
double spatial_weight(double d2, double sigma);

/// Top-k_near spatial neighbors of target: weight descending, distance
/// ascending, object id ascending. Never contains the target; may return
/// fewer than k_near entries when the floor discards candidates.
std::vector<ContextEntry> neighbor_context(const MapStore& map,
                                           const std::string& target,
                                           const SpatialParams& params);

/// Top-k_sim objects by feature cosine similarity, descending, object id
/// ascending on ties. Never contains the target.
std::vector<ContextEntry> similar_context(const MapStore& map,
                                          const std::string& target,
                                          const SimilarityParams& params);

}  // namespace ownmap
