#include "ownmap/acquisition.hpp"

#include <algorithm>

#include "ownmap/errors.hpp"

namespace ownmap {

namespace {

StateSnapshot make_snapshot(const AcquisitionState& state) {
    StateSnapshot snapshot;
    for (const auto& id : state.object_ids()) {
        const ObjectState& entry = state.at(id);
        snapshot[id] = SnapshotEntry{predicted_set_from_state(entry), entry.asked,
                                     entry.needs_revisit};
    }
    return snapshot;
}

PredictionMap predictions_from_snapshot(const StateSnapshot& snapshot) {
    PredictionMap out;
    for (const auto& [id, entry] : snapshot) out[id] = entry.predicted;
    return out;
}

}  // namespace

std::string select_query_target(const AcquisitionState& state,
                                const std::map<std::string, PredictionSet>& sets) {
    std::string best;
    double best_cp = -1.0;
    std::size_t best_size = 0;
    for (const auto& id : state.object_ids()) {
        if (state.at(id).asked) continue;
        auto it = sets.find(id);
        if (it == sets.end()) continue;
        const double cp = it->second.cp_score;
        const std::size_t size = it->second.members.size();
        const bool better = cp > best_cp ||
                            (cp == best_cp && size > best_size) ||
                            (cp == best_cp && size == best_size &&
                             (best.empty() || id < best));
        if (better) {
            best = id;
            best_cp = cp;
            best_size = size;
        }
    }
    if (best.empty())
        throw StateError("select_query_target: every object has been asked");
    return best;
}

RunTrace run_acquisition(const MapStore& map,
                         const EventLog& log,
                         Scorer& scorer,
                         QuestionBackend& questions,
                         Respondent& respondent,
                         AnswerInterpreter& interpreter,
                         const CalibrationModel& calibration,
                         std::size_t q_max,
                         const PipelineConfig& config,
                         const TruthMap* truth) {
    const Roster& roster = map.roster();
    const Timestamp now = config.now.value_or(log.latest().value_or(0));
    BundleFactory factory(map, log, config.spatial, config.similarity, config.flags,
                          config.window_days, now);

    RunTrace trace;
    trace.final_state = AcquisitionState::from_map(map, q_max);
    AcquisitionState& state = trace.final_state;

    auto metrics_for = [&](const StateSnapshot& snapshot) -> std::optional<MetricsReport> {
        if (!truth) return std::nullopt;
        MetricsReport report = compute_metrics(predictions_from_snapshot(snapshot), *truth);
        report.n_questions = state.query_count();
        return report;
    };

    std::size_t pass = 0;
    while (true) {
        TraceStep step;
        step.pass = pass;

        const KnownFacts known = build_known(state, config.known_confidence);
        for (const auto& id : state.object_ids()) {
            ObjectState& entry = state.at(id);
            if (entry.asked) continue;
            ScoreResult result = scorer.score(factory.bundle(id), known);
            entry.scores = result.scores;
            entry.share = detect_shared(entry.scores, config.share);
            step.refreshed[id] = entry.scores;
            if (result.used_fallback) step.fallbacks.push_back(id);
        }

        bool all_confident = true;
        for (const auto& id : state.object_ids()) {
            const ObjectState& entry = state.at(id);
            step.sets[id] = prediction_set(entry.scores, calibration.q_alpha);
            const bool confident = (entry.asked && entry.needs_revisit) ||
                                   step.sets[id].cp_score <= calibration.q_cp;
            all_confident = all_confident && confident;
        }

        step.snapshot_before = make_snapshot(state);
        step.metrics_before = metrics_for(step.snapshot_before);

        if (all_confident || state.query_count() >= q_max) {
            step.stop = true;
            step.stop_reason = all_confident ? "confident" : "budget";
            trace.steps.push_back(std::move(step));
            break;
        }

        const std::string target = select_query_target(state, step.sets);
        step.selected = target;
        const Question question =
            questions.generate(map.at(target), state.at(target).scores, roster);
        step.question = question;

        try {
            step.answer_text = respondent.respond(question);
            InterpretResult interp =
                interpreter.interpret(question, *step.answer_text, roster);
            step.answer = interp.vector;
            step.answer_fallback = interp.used_fallback;
        } catch (const Error& e) {
            trace.aborted = true;
            trace.error = e.what();
            trace.steps.push_back(std::move(step));
            break;
        }

        apply_answer(state, target, *step.answer, config.share);
        state.count_query();
        step.snapshot_after = make_snapshot(state);
        step.metrics_after = metrics_for(*step.snapshot_after);
        trace.steps.push_back(std::move(step));
        ++pass;
    }

    trace.question_count = state.query_count();
    for (const auto& id : state.object_ids())
        if (state.at(id).needs_revisit) trace.needs_revisit.push_back(id);
    return trace;
}

std::vector<const StateSnapshot*> curve_snapshots(const RunTrace& trace) {
    std::vector<const StateSnapshot*> out;
    if (trace.steps.empty()) return out;
    out.push_back(&trace.steps.front().snapshot_before);
    for (const auto& step : trace.steps)
        if (step.snapshot_after) out.push_back(&*step.snapshot_after);
    const TraceStep& last = trace.steps.back();
    if (last.stop && trace.steps.size() > 1) out.push_back(&last.snapshot_before);
    return out;
}

std::vector<MetricsReport> step_curve(const RunTrace& trace, const TruthMap& truth) {
    std::vector<MetricsReport> curve;
    std::size_t questions = 0;
    bool first = true;
    for (const StateSnapshot* snapshot : curve_snapshots(trace)) {
        MetricsReport report = compute_metrics(predictions_from_snapshot(*snapshot), truth);
        if (!first && questions < trace.question_count) ++questions;
        report.n_questions = questions;
        first = false;
        curve.push_back(std::move(report));
    }
    return curve;
}

PredictionMap final_predictions(const RunTrace& trace) {
    PredictionMap out;
    for (const auto& id : trace.final_state.object_ids())
        out[id] = predicted_set_from_state(trace.final_state.at(id));
    return out;
}

std::vector<CalibrationSample> score_environment(const datagen::Environment& env,
                                                 Scorer& scorer,
                                                 const PipelineConfig& config) {
    const Timestamp now = config.now.value_or(env.log.latest().value_or(0));
    BundleFactory factory(env.map, env.log, config.spatial, config.similarity,
                          config.flags, config.window_days, now);
    const KnownFacts no_facts;

    std::vector<CalibrationSample> samples;
    samples.reserve(env.map.size());
    for (const auto& record : env.map.objects()) {
        CalibrationSample sample;
        sample.scores = scorer.score(factory.bundle(record.object_id), no_facts).scores;
        sample.true_owners = env.truth.at(record.object_id);
        samples.push_back(std::move(sample));
    }
    return samples;
}

CalibrationRun calibrate_on_environments(const datagen::ScenarioSpec& spec,
                                         std::uint64_t base_seed,
                                         std::size_t n_envs,
                                         Scorer& scorer,
                                         const PipelineConfig& config,
                                         double alpha,
                                         double alpha_cp) {
    CalibrationRun run;
    for (std::size_t i = 0; i < n_envs; ++i) {
        datagen::ScenarioSpec seeded = spec;
        seeded.seed = base_seed + i;
        const datagen::Environment env = datagen::generate_environment(seeded);
        auto samples = score_environment(env, scorer, config);
        run.samples.insert(run.samples.end(), samples.begin(), samples.end());
    }

    for (const auto& sample : run.samples)
        run.nc_scores.push_back(nonconformity(sample.scores, sample.true_owners));

    run.model.alpha = alpha;
    run.model.alpha_cp = alpha_cp;
    run.model.n_calibration = run.samples.size();
    run.model.q_alpha = calibrate(run.nc_scores, alpha);

    for (const auto& sample : run.samples)
        run.cp_scores.push_back(prediction_set(sample.scores, run.model.q_alpha).cp_score);
    run.model.q_cp = stopping_threshold(run.cp_scores, alpha_cp);
    return run;
}

}  // namespace ownmap
