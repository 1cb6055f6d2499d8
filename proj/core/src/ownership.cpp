#include "ownmap/ownership.hpp"

#include <algorithm>
#include <cmath>

#include "ownmap/errors.hpp"

namespace ownmap {

void validate_scores(const OwnershipScores& scores, const Roster& roster) {
    for (const auto& user : roster.users()) {
        auto it = scores.find(user.name);
        if (it == scores.end())
            throw ValidationError("scores: missing user '" + user.name + "'");
        if (!std::isfinite(it->second) || it->second < 0.0 || it->second > 1.0)
            throw ValidationError("scores: value for '" + user.name +
                                  "' outside [0,1]");
    }
    if (scores.size() != roster.size()) {
        for (const auto& [name, value] : scores) {
            (void)value;
            if (!roster.contains(name))
                throw ValidationError("scores: user '" + name + "' not in roster");
        }
    }
}

OwnershipScores zero_scores(const Roster& roster) {
    OwnershipScores out;
    for (const auto& user : roster.users()) out[user.name] = 0.0;
    return out;
}

const char* to_string(ShareKind kind) {
    switch (kind) {
        case ShareKind::undetermined: return "undetermined";
        case ShareKind::single: return "single";
        case ShareKind::shared: return "shared";
    }
    return "undetermined";
}

ShareDecision detect_shared(const OwnershipScores& scores, const ShareParams& params) {
    // Sorted descending by score; equal scores ordered by name so the
    // owner cut is total.
    std::vector<std::pair<std::string, double>> ranked(scores.begin(), scores.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });

    const std::size_t n = ranked.size();
    auto score_at = [&](std::size_t k) {  // 1-based, s_(n+1) := 0
        return k <= n ? ranked[k - 1].second : 0.0;
    };

    ShareDecision decision;
    for (std::size_t k = n; k >= 1; --k) {
        const double sk = score_at(k);
        if (sk < params.eps_min) continue;
        if (score_at(1) - sk > params.eps_in) continue;
        if (sk - score_at(k + 1) < params.eps_out) continue;
        decision.k = k;
        decision.kind = k >= 2 ? ShareKind::shared : ShareKind::single;
        for (std::size_t i = 0; i < k; ++i) decision.owners.push_back(ranked[i].first);
        std::sort(decision.owners.begin(), decision.owners.end());
        break;
    }
    return decision;
}

}  // namespace ownmap
