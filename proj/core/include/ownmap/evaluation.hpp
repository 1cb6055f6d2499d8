#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ownmap/state.hpp"

namespace ownmap {

using OwnerSet = std::set<std::string>;

/// Predictions under evaluation: object id -> predicted owner set. Objects
/// a method declined to predict map to an empty set.
using PredictionMap = std::map<std::string, OwnerSet>;

/// Ground truth plus the generation scenario used for per-category rows.
struct TruthEntry {
    OwnerSet owners;
    std::string scenario;  // single_user | temporary_sharing | multi_user_sharing
};
using TruthMap = std::map<std::string, TruthEntry>;

struct MetricsReport {
    double subset_accuracy = 0.0;
    double mean_jaccard = 0.0;
    double micro_precision = 0.0;
    double micro_recall = 0.0;
    double micro_f1 = 0.0;
    std::size_t n_samples = 0;
    std::size_t n_questions = 0;
    std::map<std::string, MetricsReport> per_category;  // empty inside sub-reports
};

/// Owner set an object state currently implies: confirmed answer if asked,
/// otherwise the share-decision owners, otherwise the argmax user.
OwnerSet predicted_set_from_state(const ObjectState& entry);

/// Exact-match rate, mean Jaccard overlap, and micro-averaged P/R/F1 from
/// pooled per-user TP/FP/FN counts. Jaccard of two empty sets is 1.
/// Predictions for unknown object ids throw ValidationError; truth objects
/// without predictions count as empty sets.
MetricsReport compute_metrics(const PredictionMap& predictions, const TruthMap& truth);

}  // namespace ownmap
