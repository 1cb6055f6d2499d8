#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "ownmap/ownership.hpp"
#include "ownmap/roster.hpp"

namespace ownmap {

/// One calibration pair: scores the configured scorer produced for an
/// object, and the object's true owner set.
struct CalibrationSample {
    OwnershipScores scores;
    std::vector<std::string> true_owners;
};

/// Frozen split-conformal calibration: the coverage quantile q_alpha and
/// the stopping threshold q_cp, with the levels and sample count they were
/// computed from.
struct CalibrationModel {
    double alpha = 0.2;
    double q_alpha = 0.0;
    double alpha_cp = 0.05;
    double q_cp = 0.0;
    std::size_t n_calibration = 0;
};

struct PredictionSet {
    std::vector<std::string> members;  // sorted by user name
    double cp_score = 1.0;             // 1 when members is empty
};

/// nc = 1 - max over true owners of their score. Small when at least one
/// true owner scored high. Throws ValidationError on an empty owner set.
double nonconformity(const OwnershipScores& scores,
                     const std::vector<std::string>& true_owners);

/// 1-based order-statistic rank ceil((n+1) * level). A 1e-9 guard keeps
/// decimal levels like 0.8 from rounding up through the ceiling (naive
/// double math turns 5*0.8 into 4.0000000000000002).
std::size_t quantile_rank(std::size_t n, double level);

/// The ceil((N+1)(1-alpha))-th smallest nonconformity score. Throws
/// CalibrationError (carrying the minimum usable N) when the rank exceeds N.
double calibrate(const std::vector<double>& nc_scores, double alpha);

/// Gamma = {u : s_u >= 1 - q_alpha}; cp_score = 1 - mean score over the
/// set, or 1.0 for an empty set (maximal uncertainty).
PredictionSet prediction_set(const OwnershipScores& scores, double q_alpha);

/// The ceil((N+1) * alpha_cp)-th smallest calibration cp score — the lower
/// quantile marking "confident enough to stop asking".
double stopping_threshold(const std::vector<double>& cp_scores, double alpha_cp);

/// Smallest N for which calibrate(., alpha) can succeed.
std::size_t min_calibration_samples(double alpha);

}  // namespace ownmap
