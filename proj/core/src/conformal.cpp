#include "ownmap/conformal.hpp"

#include <algorithm>
#include <cmath>

#include "ownmap/errors.hpp"

namespace ownmap {

double nonconformity(const OwnershipScores& scores,
                     const std::vector<std::string>& true_owners) {
    if (true_owners.empty())
        throw ValidationError("nonconformity: true owner set must not be empty");
    double best = 0.0;
    for (const auto& owner : true_owners) {
        auto it = scores.find(owner);
        if (it == scores.end())
            throw ValidationError("nonconformity: no score for true owner '" + owner + "'");
        best = std::max(best, it->second);
    }
    return 1.0 - best;
}

std::size_t quantile_rank(std::size_t n, double level) {
    const double x = static_cast<double>(n + 1) * level;
    const double guarded = std::ceil(x - 1e-9);
    if (guarded < 1.0) return 1;
    return static_cast<std::size_t>(guarded);
}

std::size_t min_calibration_samples(double alpha) {
    for (std::size_t n = 1;; ++n) {
        if (quantile_rank(n, 1.0 - alpha) <= n) return n;
    }
}

namespace {

double order_statistic(std::vector<double> values, std::size_t rank_1based) {
    auto nth = values.begin() + static_cast<std::ptrdiff_t>(rank_1based - 1);
    std::nth_element(values.begin(), nth, values.end());
    return *nth;
}

}  // namespace

double calibrate(const std::vector<double>& nc_scores, double alpha) {
    if (alpha <= 0.0 || alpha >= 1.0)
        throw ValidationError("calibrate: alpha must lie in (0,1)");
    const std::size_t n = nc_scores.size();
    if (n == 0)
        throw CalibrationError("calibrate: no calibration samples",
                               min_calibration_samples(alpha));
    const std::size_t rank = quantile_rank(n, 1.0 - alpha);
    if (rank > n) {
        throw CalibrationError(
            "calibrate: need at least " +
                std::to_string(min_calibration_samples(alpha)) +
                " samples for alpha=" + std::to_string(alpha) + ", got " +
                std::to_string(n),
            min_calibration_samples(alpha));
    }
    return order_statistic(nc_scores, rank);
}

PredictionSet prediction_set(const OwnershipScores& scores, double q_alpha) {
    PredictionSet set;
    const double threshold = 1.0 - q_alpha;
    double sum = 0.0;
    for (const auto& [user, score] : scores) {
        if (score >= threshold) {
            set.members.push_back(user);
            sum += score;
        }
    }
    if (set.members.empty()) {
        set.cp_score = 1.0;
    } else {
        set.cp_score = 1.0 - sum / static_cast<double>(set.members.size());
        set.cp_score = std::clamp(set.cp_score, 0.0, 1.0);
    }
    return set;
}

double stopping_threshold(const std::vector<double>& cp_scores, double alpha_cp) {
    if (alpha_cp <= 0.0 || alpha_cp >= 1.0)
        throw ValidationError("stopping threshold: alpha_cp must lie in (0,1)");
    const std::size_t n = cp_scores.size();
    if (n == 0)
        throw CalibrationError("stopping threshold: no calibration samples", 1);
    const std::size_t rank = quantile_rank(n, alpha_cp);
    if (rank > n) {
        std::size_t min_n = 1;
        while (quantile_rank(min_n, alpha_cp) > min_n) ++min_n;
        throw CalibrationError("stopping threshold: need at least " +
                                   std::to_string(min_n) + " samples, got " +
                                   std::to_string(n),
                               min_n);
    }
    return order_statistic(cp_scores, rank);
}

}  // namespace ownmap
