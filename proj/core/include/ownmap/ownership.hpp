#pragma once

#include <map>
#include <string>
#include <vector>

#include "ownmap/roster.hpp"

namespace ownmap {

/// Multi-label ownership scores: user name -> confidence in [0,1].
/// Deliberately unnormalized; values need not sum to 1.
using OwnershipScores = std::map<std::string, double>;

/// Throws ValidationError unless every roster user has a finite score in
/// [0,1] and no foreign users appear.
void validate_scores(const OwnershipScores& scores, const Roster& roster);

/// Scores initialized to zero for every roster user.
OwnershipScores zero_scores(const Roster& roster);

/// Thresholds for shared-ownership detection on the sorted score vector:
/// eps_min is the floor every shared owner must clear, eps_in bounds the
/// spread inside the owner group, eps_out forces a gap to the first
/// non-owner.
struct ShareParams {
    double eps_min = 0.80;
    double eps_in = 0.08;
    double eps_out = 0.20;
};

enum class ShareKind { undetermined, single, shared };

struct ShareDecision {
    ShareKind kind = ShareKind::undetermined;
    std::vector<std::string> owners;  // top-k users, name order within ties
    std::size_t k = 0;

    bool decided() const noexcept { return kind != ShareKind::undetermined; }
};

const char* to_string(ShareKind kind);

/// Sorts scores descending (name ascending on ties) and selects the largest
/// k whose top-k group satisfies all three epsilon conditions, with the
/// (|U|+1)-th order statistic defined as 0. k==1 -> single, k>=2 -> shared,
/// no qualifying k -> undetermined with empty owner set.
ShareDecision detect_shared(const OwnershipScores& scores, const ShareParams& params);

/// Reliable ownership facts collected from the acquisition state: either a
/// user-confirmed answer or a current high-confidence estimate.
enum class FactProvenance { answered, high_confidence };

struct KnownFact {
    std::vector<std::string> owners;  // sorted by name
    FactProvenance provenance = FactProvenance::answered;
};

using KnownFacts = std::map<std::string, KnownFact>;  // keyed by object id

}  // namespace ownmap
