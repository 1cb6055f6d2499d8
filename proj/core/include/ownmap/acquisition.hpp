#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ownmap/conformal.hpp"
#include "ownmap/datagen.hpp"
#include "ownmap/evaluation.hpp"
#include "ownmap/interaction.hpp"
#include "ownmap/scoring.hpp"
#include "ownmap/state.hpp"

namespace ownmap {

/// Per-object view recorded in trace snapshots.
struct SnapshotEntry {
    OwnerSet predicted;
    bool asked = false;
    bool needs_revisit = false;
};
using StateSnapshot = std::map<std::string, SnapshotEntry>;

/// One loop pass: refreshed scores, prediction sets, the stop check, and —
/// when a question was asked — the full question/answer exchange with the
/// post-application state.
struct TraceStep {
    std::size_t pass = 0;
    std::map<std::string, OwnershipScores> refreshed;  // unasked objects only
    std::vector<std::string> fallbacks;                // objects scored via fallback
    std::map<std::string, PredictionSet> sets;         // every object
    bool stop = false;
    std::string stop_reason;  // "confident" | "budget" | "" when a question followed

    StateSnapshot snapshot_before;  // after re-scoring, before any question
    std::optional<MetricsReport> metrics_before;

    std::optional<std::string> selected;
    std::optional<Question> question;
    std::optional<std::string> answer_text;
    std::optional<AnswerVector> answer;
    bool answer_fallback = false;
    std::optional<StateSnapshot> snapshot_after;  // after applying the answer
    std::optional<MetricsReport> metrics_after;
};

struct RunTrace {
    std::vector<TraceStep> steps;
    AcquisitionState final_state;
    std::size_t question_count = 0;
    std::vector<std::string> needs_revisit;  // flagged objects, id order
    bool aborted = false;   // respondent/interpreter failure; steps are partial
    std::string error;
};

/// Everything run_acquisition needs beyond the dataset itself.
struct PipelineConfig {
    SpatialParams spatial;
    SimilarityParams similarity;
    ShareParams share;
    AblationFlags flags;
    HeuristicWeights weights;
    AffinityTable affinity;
    double window_days = 365.0;
    double known_confidence = 0.9;
    std::optional<Timestamp> now;  // defaults to the log's latest event
};

/// Unasked object with maximal cp score; ties broken by larger prediction
/// set, then ascending object id. Throws StateError when every object has
/// been asked.
std::string select_query_target(const AcquisitionState& state,
                                const std::map<std::string, PredictionSet>& sets);

/// Runs the acquisition loop: build known facts, re-score unasked objects,
/// compute prediction sets, stop when every object is confident or the
/// budget is spent, otherwise ask about the most uncertain object and fold
/// the answer in. Per-step metrics are attached when truth is provided.
RunTrace run_acquisition(const MapStore& map,
                         const EventLog& log,
                         Scorer& scorer,
                         QuestionBackend& questions,
                         Respondent& respondent,
                         AnswerInterpreter& interpreter,
                         const CalibrationModel& calibration,
                         std::size_t q_max,
                         const PipelineConfig& config,
                         const TruthMap* truth = nullptr);

/// Metrics recomputed from the recorded snapshots: entry 0 is the
/// pre-question state, then one entry per question, plus the final
/// re-scored state when the run stopped on a later pass.
std::vector<MetricsReport> step_curve(const RunTrace& trace, const TruthMap& truth);

/// Snapshots in curve order (same sequence step_curve scores).
std::vector<const StateSnapshot*> curve_snapshots(const RunTrace& trace);

/// Final predictions: predicted_set_from_state over the final state.
PredictionMap final_predictions(const RunTrace& trace);

/// Calibration samples and the fitted model from one or more generated
/// environments (seeds base_seed .. base_seed + n_envs - 1, same spec).
/// Every object is scored once in a fresh state with no known facts.
struct CalibrationRun {
    CalibrationModel model;
    std::vector<CalibrationSample> samples;
    std::vector<double> nc_scores;
    std::vector<double> cp_scores;
};

CalibrationRun calibrate_on_environments(const datagen::ScenarioSpec& spec,
                                         std::uint64_t base_seed,
                                         std::size_t n_envs,
                                         Scorer& scorer,
                                         const PipelineConfig& config,
                                         double alpha,
                                         double alpha_cp);

/// Scores every object of one environment in a fresh no-facts state;
/// the building block behind calibrate_on_environments and the coverage
/// checks.
std::vector<CalibrationSample> score_environment(const datagen::Environment& env,
                                                 Scorer& scorer,
                                                 const PipelineConfig& config);

}  // namespace ownmap
