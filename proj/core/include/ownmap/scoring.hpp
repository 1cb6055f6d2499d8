#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ownmap/context.hpp"
#include "ownmap/events.hpp"
#include "ownmap/ownership.hpp"
#include "ownmap/roster.hpp"
#include "ownmap/state.hpp"

namespace ownmap {

/// Which context sections feed the scorer. Disabled sections are dropped
/// from prompts and zeroed out of the heuristic formula.
struct AblationFlags {
    bool use_background = true;
    bool use_history = true;
    bool use_neighbors = true;
    bool use_similars = true;
};

/// Everything a scorer sees about one object.
struct ContextBundle {
    std::string object_id;
    std::string class_label;
    const Roster* roster = nullptr;
    std::vector<ContextEntry> neighbors;
    std::vector<ContextEntry> similars;
    UsageSummary usage;
    AblationFlags flags;
};

/// Collects reliable facts from the state: answered objects contribute
/// their confirmed owner set; unasked objects contribute their current
/// share-decision owners when every owner's score clears the confidence
/// threshold. Threshold must lie in (0.5, 1].
KnownFacts build_known(const AcquisitionState& state, double confidence_threshold);

/// Mixing weights for the deterministic scorer: event share, recency,
/// role/class prior, and context-fact agreement. Active weights are
/// normalized to sum to 1; ablation flags deactivate their terms.
struct HeuristicWeights {
    double frequency = 0.4;
    double recency = 0.2;
    double prior = 0.2;
    double context = 0.2;
    double recency_tau_days = 3.0;
};

/// (role, class label) -> affinity in [0,1]. Missing pairs read as 0.5.
class AffinityTable {
public:
    void set(const std::string& role, const std::string& class_label, double affinity);
    double get(const std::string& role, const std::string& class_label) const;
    const std::map<std::pair<std::string, std::string>, double>& entries() const {
        return table_;
    }

private:
    std::map<std::pair<std::string, std::string>, double> table_;
};

/// Deterministic ownership scoring from the context bundle. Pure function:
/// identical inputs give bit-identical scores.
OwnershipScores heuristic_score(const ContextBundle& bundle,
                                const HeuristicWeights& weights,
                                const AffinityTable& affinity,
                                const KnownFacts& known);

struct ScoreResult {
    OwnershipScores scores;
    bool used_fallback = false;  // LLM output was unusable twice; heuristic used
};

/// Scoring backend interface: heuristic, LLM-backed, or replayed.
class Scorer {
public:
    virtual ~Scorer() = default;
    virtual ScoreResult score(const ContextBundle& bundle, const KnownFacts& known) = 0;
    virtual std::string name() const = 0;
};

class HeuristicScorer final : public Scorer {
public:
    HeuristicScorer(HeuristicWeights weights, AffinityTable affinity)
        : weights_(weights), affinity_(std::move(affinity)) {}

    ScoreResult score(const ContextBundle& bundle, const KnownFacts& known) override;
    std::string name() const override { return "heuristic"; }

private:
    HeuristicWeights weights_;
    AffinityTable affinity_;
};

class ChatClient;  // see chat.hpp

/// LLM-backed scorer: builds the inference prompt, asks the chat client,
/// parses the score JSON. One retry on unusable output, then falls back to
/// the heuristic and flags the result.
class LlmScorer final : public Scorer {
public:
    LlmScorer(std::shared_ptr<ChatClient> client,
              HeuristicWeights fallback_weights,
              AffinityTable fallback_affinity)
        : client_(std::move(client)),
          fallback_(fallback_weights, std::move(fallback_affinity)) {}

    ScoreResult score(const ContextBundle& bundle, const KnownFacts& known) override;
    std::string name() const override { return "llm"; }

private:
    std::shared_ptr<ChatClient> client_;
    HeuristicScorer fallback_;
};

/// Precomputes the immutable per-object context (neighbors, similars,
/// usage summaries) once, then assembles bundles cheaply every pass.
class BundleFactory {
public:
    BundleFactory(const MapStore& map,
                  const EventLog& log,
                  const SpatialParams& spatial,
                  const SimilarityParams& similarity,
                  AblationFlags flags,
                  double window_days,
                  Timestamp now);

    ContextBundle bundle(const std::string& object_id) const;

    Timestamp now() const noexcept { return now_; }

private:
    const MapStore* map_;
    AblationFlags flags_;
    double window_days_;
    Timestamp now_;
    std::map<std::string, std::vector<ContextEntry>> neighbors_;
    std::map<std::string, std::vector<ContextEntry>> similars_;
    std::map<std::string, UsageSummary> usage_;
};

/// Attaches known_ownership to the context entries that have facts.
std::vector<ContextEntry> attach_known(std::vector<ContextEntry> entries,
                                       const KnownFacts& known);

/// Role/class priors for the bundled household datasets. Pairs not listed
/// fall back to the neutral 0.5.
AffinityTable household_affinity();

}  // namespace ownmap
