#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ownmap/acquisition.hpp"
#include "ownmap/chat.hpp"
#include "ownmap/conformal.hpp"
#include "ownmap/datagen.hpp"
#include "ownmap/evaluation.hpp"
#include "ownmap/events.hpp"
#include "ownmap/map_store.hpp"
#include "ownmap/roster.hpp"

namespace ownmap {
namespace storage {

// Field names for every on-disk format live in docs/file-formats.md.

std::vector<std::string> read_lines(const std::filesystem::path& path);
std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& content);

Roster load_roster(const std::filesystem::path& path);
void save_roster(const Roster& roster, const std::filesystem::path& path);

/// Map file: {"objects": [{object_id, class, position, feature, ...}]}.
/// Validation failures (duplicate ids, non-unit features) throw
/// ValidationError naming the offending record.
MapStore load_map(const std::filesystem::path& path, const Roster& roster);
void save_map(const MapStore& map, const std::filesystem::path& path);

/// Caption file: one "YYYY-MM-DD HH:MM <text>" line per event.
EventLog load_events_text(const std::filesystem::path& path,
                          const Roster& roster,
                          ParseReport* report = nullptr);
void save_events_text(const EventLog& log, const std::filesystem::path& path);

/// Structured-record form (JSON lines) for lossless round-trips.
EventLog load_events_jsonl(const std::filesystem::path& path);
void save_events_jsonl(const EventLog& log, const std::filesystem::path& path);

struct TruthFile {
    TruthMap truth;
};
TruthFile load_truth(const std::filesystem::path& path);
void save_truth(const datagen::GroundTruth& truth,
                const std::map<std::string, datagen::Scenario>& scenarios,
                const std::filesystem::path& path);
void save_truth_map(const TruthMap& truth, const std::filesystem::path& path);

datagen::ScenarioSpec load_spec(const std::filesystem::path& path);
void save_spec(const datagen::ScenarioSpec& spec, const std::filesystem::path& path);

CalibrationModel load_calibration(const std::filesystem::path& path);
void save_calibration(const CalibrationModel& model, const std::filesystem::path& path);

Transcript load_transcript(const std::filesystem::path& path);
void save_transcript(const Transcript& transcript, const std::filesystem::path& path);

/// Predictions plus run metadata shared by the pipeline and the baselines.
struct PredictionsFile {
    std::string method;
    std::size_t trial = 0;
    std::size_t n_questions = 0;
    PredictionMap predictions;
    std::vector<std::string> needs_revisit;
};
PredictionsFile load_predictions(const std::filesystem::path& path);
void save_predictions(const PredictionsFile& file, const std::filesystem::path& path);

void save_trace(const RunTrace& trace, const std::filesystem::path& path);
RunTrace load_trace(const std::filesystem::path& path);

/// report.json plus a flat TSV (method, category, metric, mean, std, n).
struct MethodReport {
    std::string method;
    std::vector<MetricsReport> trials;
};
void save_report(const std::vector<MethodReport>& methods,
                 const std::filesystem::path& json_path,
                 const std::filesystem::path& tsv_path);

/// Step curves as TSV rows (method, trial, step, metrics...).
void save_curves(const std::string& method,
                 const std::vector<std::vector<MetricsReport>>& per_trial_curves,
                 const std::filesystem::path& path);

}  // namespace storage
}  // namespace ownmap
