// ownmap CLI: generate household datasets, calibrate the conformal
// thresholds, run the question loop, evaluate predictions, replay traces.

#include <deque>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ownmap/acquisition.hpp"
#include "ownmap/baselines.hpp"
#include "ownmap/chat.hpp"
#include "ownmap/errors.hpp"
#include "ownmap/storage.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunConfig {
    // paths
    std::string map_path;
    std::string events_path;
    std::string roster_path;
    std::string truth_path;
    std::string calibration_path;
    std::string out_dir = "out";

    // backends
    std::string scorer = "heuristic";  // heuristic | llm | replay:<file>
    std::string respondent = "oracle"; // oracle | scripted:<file> | console
    std::string record_path;           // record transcript here when set
    ownmap::LlmEndpoint endpoint;

    // parameters
    ownmap::PipelineConfig pipeline;
    double alpha = 0.2;
    double alpha_cp = 0.05;

    std::optional<std::size_t> q_max;  // defaults to the object count
    std::uint64_t seed = 1;
    std::size_t trials = 1;
};

ownmap::AffinityTable affinity_from_json(const json& value) {
    if (value.is_string()) {
        if (value.get<std::string>() == "household") return ownmap::household_affinity();
        if (value.get<std::string>() == "flat") return ownmap::AffinityTable{};
        throw ownmap::ValidationError("config: unknown affinity preset '" +
                                      value.get<std::string>() + "'");
    }
    ownmap::AffinityTable table;
    for (const auto& [role, classes] : value.items())
        for (const auto& [class_label, affinity] : classes.items())
            table.set(role, class_label, affinity.get<double>());
    return table;
}

void load_config_file(RunConfig& cfg, const fs::path& path) {
    const json doc = json::parse(ownmap::storage::read_text(path), nullptr, false);
    if (doc.is_discarded())
        throw ownmap::ValidationError("config: malformed JSON in " + path.string());

    if (doc.contains("paths")) {
        const auto& paths = doc.at("paths");
        cfg.map_path = paths.value("map", cfg.map_path);
        cfg.events_path = paths.value("events", cfg.events_path);
        cfg.roster_path = paths.value("roster", cfg.roster_path);
        cfg.truth_path = paths.value("truth", cfg.truth_path);
        cfg.calibration_path = paths.value("calibration", cfg.calibration_path);
        cfg.out_dir = paths.value("out", cfg.out_dir);
    }
    cfg.scorer = doc.value("scorer", cfg.scorer);
    cfg.respondent = doc.value("respondent", cfg.respondent);
    cfg.record_path = doc.value("record", cfg.record_path);

    if (doc.contains("endpoint")) {
        const auto& ep = doc.at("endpoint");
        cfg.endpoint.base_url = ep.value("base_url", cfg.endpoint.base_url);
        cfg.endpoint.model = ep.value("model", cfg.endpoint.model);
        cfg.endpoint.temperature = ep.value("temperature", cfg.endpoint.temperature);
        cfg.endpoint.api_key_env = ep.value("api_key_env", cfg.endpoint.api_key_env);
        cfg.endpoint.timeout_seconds = ep.value("timeout_seconds",
                                                cfg.endpoint.timeout_seconds);
    }
    if (doc.contains("spatial")) {
        const auto& sp = doc.at("spatial");
        cfg.pipeline.spatial.gamma = sp.value("gamma", cfg.pipeline.spatial.gamma);
        cfg.pipeline.spatial.sigma = sp.value("sigma", cfg.pipeline.spatial.sigma);
        cfg.pipeline.spatial.weight_floor =
            sp.value("weight_floor", cfg.pipeline.spatial.weight_floor);
        cfg.pipeline.spatial.k_near = sp.value("k_near", cfg.pipeline.spatial.k_near);
    }
    if (doc.contains("similarity"))
        cfg.pipeline.similarity.k_sim =
            doc.at("similarity").value("k_sim", cfg.pipeline.similarity.k_sim);
    if (doc.contains("share")) {
        const auto& sh = doc.at("share");
        cfg.pipeline.share.eps_min = sh.value("eps_min", cfg.pipeline.share.eps_min);
        cfg.pipeline.share.eps_in = sh.value("eps_in", cfg.pipeline.share.eps_in);
        cfg.pipeline.share.eps_out = sh.value("eps_out", cfg.pipeline.share.eps_out);
    }
    if (doc.contains("conformal")) {
        cfg.alpha = doc.at("conformal").value("alpha", cfg.alpha);
        cfg.alpha_cp = doc.at("conformal").value("alpha_cp", cfg.alpha_cp);
    }
    if (doc.contains("ablation")) {
        const auto& ab = doc.at("ablation");
        cfg.pipeline.flags.use_background =
            ab.value("use_background", cfg.pipeline.flags.use_background);
        cfg.pipeline.flags.use_history =
            ab.value("use_history", cfg.pipeline.flags.use_history);
        cfg.pipeline.flags.use_neighbors =
            ab.value("use_neighbors", cfg.pipeline.flags.use_neighbors);
        cfg.pipeline.flags.use_similars =
            ab.value("use_similars", cfg.pipeline.flags.use_similars);
    }
    if (doc.contains("heuristic")) {
        const auto& h = doc.at("heuristic");
        if (h.contains("weights")) {
            const auto& w = h.at("weights");
            cfg.pipeline.weights.frequency = w.at(0).get<double>();
            cfg.pipeline.weights.recency = w.at(1).get<double>();
            cfg.pipeline.weights.prior = w.at(2).get<double>();
            cfg.pipeline.weights.context = w.at(3).get<double>();
        }
        cfg.pipeline.weights.recency_tau_days =
            h.value("tau_days", cfg.pipeline.weights.recency_tau_days);
        if (h.contains("affinity"))
            cfg.pipeline.affinity = affinity_from_json(h.at("affinity"));
    }
    cfg.pipeline.window_days = doc.value("window_days", cfg.pipeline.window_days);
    cfg.pipeline.known_confidence =
        doc.value("known_confidence", cfg.pipeline.known_confidence);
    if (doc.contains("q_max") && !doc.at("q_max").is_null())
        cfg.q_max = doc.at("q_max").get<std::size_t>();
    cfg.seed = doc.value("seed", cfg.seed);
    cfg.trials = doc.value("trials", cfg.trials);
}

// ---- backend assembly ----------------------------------------------------

struct Backends {
    std::unique_ptr<ownmap::Scorer> scorer;
    std::unique_ptr<ownmap::QuestionBackend> questions;
    std::unique_ptr<ownmap::AnswerInterpreter> interpreter;
    std::shared_ptr<ownmap::Transcript> recording;  // set when --record is active
};

Backends make_backends(const RunConfig& cfg) {
    Backends out;
    if (cfg.scorer == "heuristic") {
        out.scorer = std::make_unique<ownmap::HeuristicScorer>(cfg.pipeline.weights,
                                                               cfg.pipeline.affinity);
        out.questions = std::make_unique<ownmap::TemplateQuestionBackend>();
        out.interpreter = std::make_unique<ownmap::RuleAnswerInterpreter>();
        return out;
    }

    std::shared_ptr<ownmap::ChatClient> client;
    if (cfg.scorer == "llm") {
        client = std::make_shared<ownmap::HttpChatClient>(cfg.endpoint);
    } else if (cfg.scorer.rfind("replay:", 0) == 0) {
        auto transcript = std::make_shared<ownmap::Transcript>(
            ownmap::storage::load_transcript(cfg.scorer.substr(7)));
        client = std::make_shared<ownmap::ReplayChatClient>(transcript);
    } else {
        throw ownmap::ValidationError("unknown scorer backend '" + cfg.scorer +
                                      "' (expected heuristic | llm | replay:<file>)");
    }
    if (!cfg.record_path.empty()) {
        out.recording = std::make_shared<ownmap::Transcript>();
        client = std::make_shared<ownmap::RecordingChatClient>(client, out.recording);
    }
    out.scorer = std::make_unique<ownmap::LlmScorer>(client, cfg.pipeline.weights,
                                                     cfg.pipeline.affinity);
    out.questions = std::make_unique<ownmap::LlmQuestionBackend>(client);
    out.interpreter = std::make_unique<ownmap::LlmAnswerInterpreter>(client);
    return out;
}

std::unique_ptr<ownmap::Respondent> make_respondent(const RunConfig& cfg,
                                                    const ownmap::TruthMap* truth) {
    if (cfg.respondent == "oracle") {
        if (!truth)
            throw ownmap::ValidationError("oracle respondent requires --truth");
        std::map<std::string, std::vector<std::string>> owners;
        for (const auto& [id, entry] : *truth)
            owners[id] = {entry.owners.begin(), entry.owners.end()};
        return std::make_unique<ownmap::OracleRespondent>(std::move(owners));
    }
    if (cfg.respondent.rfind("scripted:", 0) == 0) {
        return std::make_unique<ownmap::ScriptedRespondent>(
            ownmap::storage::read_lines(cfg.respondent.substr(9)));
    }
    if (cfg.respondent == "console")
        return std::make_unique<ownmap::ConsoleRespondent>();
    throw ownmap::ValidationError("unknown respondent '" + cfg.respondent +
                                  "' (expected oracle | scripted:<file> | console)");
}

ownmap::datagen::ScenarioSpec resolve_spec(const std::string& spec_path,
                                           const std::string& builtin,
                                           std::optional<std::uint64_t> seed) {
    ownmap::datagen::ScenarioSpec spec;
    if (!spec_path.empty()) {
        spec = ownmap::storage::load_spec(spec_path);
    } else if (builtin == "house34") {
        spec = ownmap::datagen::bundled_house34();
    } else if (builtin == "house5") {
        spec = ownmap::datagen::bundled_house5();
    } else {
        throw ownmap::ValidationError("unknown builtin spec '" + builtin +
                                      "' (expected house34 | house5)");
    }
    if (seed) spec.seed = *seed;
    return spec;
}

// ---- subcommands -----------------------------------------------------------

int cmd_gen(const std::string& spec_path, const std::string& builtin,
            std::optional<std::uint64_t> seed, const std::string& out_dir,
            bool with_jsonl) {
    const auto spec = resolve_spec(spec_path, builtin, seed);
    const auto env = ownmap::datagen::generate_environment(spec);

    const fs::path out(out_dir);
    ownmap::storage::save_roster(env.roster, out / "roster.json");
    ownmap::storage::save_map(env.map, out / "map.json");
    ownmap::storage::save_events_text(env.log, out / "events.txt");
    ownmap::storage::save_truth(env.truth, env.scenarios, out / "truth.json");
    if (with_jsonl) ownmap::storage::save_events_jsonl(env.log, out / "events.jsonl");

    std::cout << "generated " << env.map.size() << " objects, " << env.roster.size()
              << " users, " << env.log.size() << " events over " << spec.days
              << " days -> " << out.string() << "\n";
    return 0;
}

int cmd_calibrate(const RunConfig& cfg, const std::string& spec_path,
                  const std::string& builtin, std::size_t n_envs) {
    auto spec = resolve_spec(spec_path, builtin, std::nullopt);
    Backends backends = make_backends(cfg);

    const auto run = ownmap::calibrate_on_environments(
        spec, cfg.seed, n_envs, *backends.scorer, cfg.pipeline, cfg.alpha, cfg.alpha_cp);

    const fs::path out = cfg.calibration_path.empty()
                             ? fs::path(cfg.out_dir) / "calibration.json"
                             : fs::path(cfg.calibration_path);
    ownmap::storage::save_calibration(run.model, out);
    std::cout << "calibrated on " << run.model.n_calibration << " samples: q_alpha="
              << run.model.q_alpha << " (alpha=" << run.model.alpha
              << "), q_cp=" << run.model.q_cp << " (alpha_cp=" << run.model.alpha_cp
              << ") -> " << out.string() << "\n";
    return 0;
}

int cmd_run(const RunConfig& cfg) {
    const auto roster = ownmap::storage::load_roster(cfg.roster_path);
    const auto map = ownmap::storage::load_map(cfg.map_path, roster);
    const auto log = ownmap::storage::load_events_text(cfg.events_path, roster);
    const auto calibration = ownmap::storage::load_calibration(cfg.calibration_path);

    std::optional<ownmap::TruthMap> truth;
    if (!cfg.truth_path.empty())
        truth = ownmap::storage::load_truth(cfg.truth_path).truth;

    const std::size_t q_max = cfg.q_max.value_or(map.size());
    const fs::path out(cfg.out_dir);
    bool any_aborted = false;

    for (std::size_t trial = 0; trial < cfg.trials; ++trial) {
        const std::uint64_t trial_seed = cfg.seed + trial;
        (void)trial_seed;  // reserved for stochastic backends

        Backends backends = make_backends(cfg);
        auto respondent = make_respondent(cfg, truth ? &*truth : nullptr);

        const ownmap::RunTrace trace = ownmap::run_acquisition(
            map, log, *backends.scorer, *backends.questions, *respondent,
            *backends.interpreter, calibration, q_max, cfg.pipeline,
            truth ? &*truth : nullptr);

        const std::string suffix = "_" + std::to_string(trial);
        ownmap::storage::save_trace(trace, out / ("trace" + suffix + ".json"));

        ownmap::storage::PredictionsFile predictions;
        predictions.method = "ownmap";
        predictions.trial = trial;
        predictions.n_questions = trace.question_count;
        predictions.predictions = ownmap::final_predictions(trace);
        predictions.needs_revisit = trace.needs_revisit;
        ownmap::storage::save_predictions(predictions,
                                          out / ("predictions" + suffix + ".json"));

        if (backends.recording && !cfg.record_path.empty())
            ownmap::storage::save_transcript(*backends.recording, cfg.record_path);

        std::cout << "trial " << trial << ": " << trace.question_count << " questions";
        if (!trace.needs_revisit.empty())
            std::cout << ", " << trace.needs_revisit.size() << " objects flagged needs-revisit";
        if (trace.aborted) {
            std::cout << ", ABORTED: " << trace.error;
            any_aborted = true;
        }
        std::cout << "\n";
        if (trace.aborted) break;  // partial trace preserved on disk
    }
    return any_aborted ? 2 : 0;
}

int cmd_eval(const std::string& truth_path, const std::vector<std::string>& pred_paths,
             const std::vector<std::string>& trace_paths, const std::string& events_path,
             const std::string& roster_path, const std::string& out_dir) {
    const auto truth = ownmap::storage::load_truth(truth_path).truth;
    const fs::path out(out_dir);

    std::map<std::string, ownmap::storage::MethodReport> methods;
    std::map<std::string, std::vector<std::size_t>> method_questions;
    for (const auto& path : pred_paths) {
        const auto file = ownmap::storage::load_predictions(path);
        const std::string method = file.method.empty() ? "unknown" : file.method;
        ownmap::MetricsReport report = ownmap::compute_metrics(file.predictions, truth);
        report.n_questions = file.n_questions;
        methods[method].method = method;
        methods[method].trials.push_back(std::move(report));
        if (!file.needs_revisit.empty())
            std::cout << method << " trial " << file.trial << ": "
                      << file.needs_revisit.size() << " needs-revisit objects\n";
    }

    if (!events_path.empty()) {
        if (roster_path.empty())
            throw ownmap::ValidationError("eval: --events also needs --roster");
        const auto roster = ownmap::storage::load_roster(roster_path);
        const auto log = ownmap::storage::load_events_text(events_path, roster);
        std::vector<std::string> ids;
        for (const auto& [id, entry] : truth) {
            (void)entry;
            ids.push_back(id);
        }
        for (const std::string method : {"last_user", "frequency"}) {
            const auto predictions = ownmap::baselines::predict_all(log, ids, method);
            ownmap::MetricsReport report = ownmap::compute_metrics(predictions, truth);
            methods[method].method = method;
            methods[method].trials.push_back(std::move(report));

            ownmap::storage::PredictionsFile file;
            file.method = method;
            file.predictions = predictions;
            ownmap::storage::save_predictions(
                file, out / ("predictions_" + method + ".json"));
        }
    }

    if (methods.empty())
        throw ownmap::ValidationError("eval: nothing to evaluate (no --pred, no --events)");

    std::vector<ownmap::storage::MethodReport> ordered;
    for (auto& [name, report] : methods) {
        (void)name;
        ordered.push_back(std::move(report));
    }
    ownmap::storage::save_report(ordered, out / "report.json", out / "report.tsv");

    if (!trace_paths.empty()) {
        std::vector<std::vector<ownmap::MetricsReport>> curves;
        for (const auto& path : trace_paths) {
            const auto trace = ownmap::storage::load_trace(path);
            curves.push_back(ownmap::step_curve(trace, truth));
        }
        ownmap::storage::save_curves("ownmap", curves, out / "curves.tsv");
    }

    for (const auto& method : ordered) {
        double mean = 0.0;
        for (const auto& trial : method.trials) mean += trial.subset_accuracy;
        mean /= static_cast<double>(method.trials.size());
        std::cout << method.method << ": subset_accuracy mean " << mean << " over "
                  << method.trials.size() << " trial(s)\n";
    }
    std::cout << "report -> " << (out / "report.json").string() << "\n";
    return 0;
}

// Replays recorded per-pass scores/answers through the real loop and
// verifies the reproduced trace is bit-identical.

class TraceReplayScorer final : public ownmap::Scorer {
public:
    explicit TraceReplayScorer(const ownmap::RunTrace& trace) {
        const auto& order = trace.final_state.object_ids();
        for (const auto& step : trace.steps)
            for (const auto& id : order) {
                auto it = step.refreshed.find(id);
                if (it == step.refreshed.end()) continue;
                const bool fallback =
                    std::find(step.fallbacks.begin(), step.fallbacks.end(), id) !=
                    step.fallbacks.end();
                queue_.push_back({id, it->second, fallback});
            }
    }

    ownmap::ScoreResult score(const ownmap::ContextBundle& bundle,
                              const ownmap::KnownFacts&) override {
        if (queue_.empty())
            throw ownmap::BackendError("trace replay: ran out of recorded scores",
                                       bundle.object_id);
        Entry entry = std::move(queue_.front());
        queue_.pop_front();
        if (entry.object_id != bundle.object_id)
            throw ownmap::BackendError("trace replay: diverged, expected scores for '" +
                                           entry.object_id + "' but loop asked for '" +
                                           bundle.object_id + "'",
                                       bundle.object_id);
        return ownmap::ScoreResult{std::move(entry.scores), entry.fallback};
    }

    std::string name() const override { return "trace-replay"; }

private:
    struct Entry {
        std::string object_id;
        ownmap::OwnershipScores scores;
        bool fallback;
    };
    std::deque<Entry> queue_;
};

class TraceReplayRespondent final : public ownmap::Respondent {
public:
    explicit TraceReplayRespondent(const ownmap::RunTrace& trace) {
        for (const auto& step : trace.steps)
            if (step.answer_text) queue_.push_back(*step.answer_text);
    }
    std::string respond(const ownmap::Question&) override {
        if (queue_.empty())
            throw ownmap::StateError("trace replay: ran out of recorded answers");
        std::string answer = std::move(queue_.front());
        queue_.pop_front();
        return answer;
    }
    std::string kind() const override { return "trace-replay"; }

private:
    std::deque<std::string> queue_;
};

class TraceReplayInterpreter final : public ownmap::AnswerInterpreter {
public:
    explicit TraceReplayInterpreter(const ownmap::RunTrace& trace) {
        for (const auto& step : trace.steps)
            if (step.answer) queue_.push_back({*step.answer, step.answer_fallback});
    }
    ownmap::InterpretResult interpret(const ownmap::Question&, const std::string&,
                                      const ownmap::Roster&) override {
        if (queue_.empty())
            throw ownmap::StateError("trace replay: ran out of recorded answer vectors");
        auto [vector, fallback] = std::move(queue_.front());
        queue_.pop_front();
        return ownmap::InterpretResult{std::move(vector), fallback};
    }

private:
    std::deque<std::pair<ownmap::AnswerVector, bool>> queue_;
};

int cmd_replay(const RunConfig& cfg, const std::string& trace_path) {
    const auto roster = ownmap::storage::load_roster(cfg.roster_path);
    const auto map = ownmap::storage::load_map(cfg.map_path, roster);
    const auto log = ownmap::storage::load_events_text(cfg.events_path, roster);
    const auto calibration = ownmap::storage::load_calibration(cfg.calibration_path);
    const auto original = ownmap::storage::load_trace(trace_path);

    std::optional<ownmap::TruthMap> truth;
    if (!cfg.truth_path.empty())
        truth = ownmap::storage::load_truth(cfg.truth_path).truth;
    const bool original_has_metrics =
        !original.steps.empty() && original.steps.front().metrics_before.has_value();
    if (original_has_metrics && !truth)
        throw ownmap::ValidationError(
            "replay: the trace carries metrics; pass --truth to reproduce them");

    TraceReplayScorer scorer(original);
    TraceReplayRespondent respondent(original);
    TraceReplayInterpreter interpreter(original);
    ownmap::TemplateQuestionBackend template_questions;

    // Question texts come from the recorded steps, not the backend; feed a
    // pass-through backend that re-emits them in order.
    class RecordedQuestions final : public ownmap::QuestionBackend {
    public:
        explicit RecordedQuestions(const ownmap::RunTrace& trace) {
            for (const auto& step : trace.steps)
                if (step.question) queue_.push_back(*step.question);
        }
        ownmap::Question generate(const ownmap::ObjectRecord& object,
                                  const ownmap::OwnershipScores&,
                                  const ownmap::Roster&) override {
            if (queue_.empty())
                throw ownmap::StateError("trace replay: ran out of recorded questions");
            ownmap::Question q = std::move(queue_.front());
            queue_.pop_front();
            if (q.object_id != object.object_id)
                throw ownmap::StateError("trace replay: question order diverged at '" +
                                         object.object_id + "'");
            return q;
        }

    private:
        std::deque<ownmap::Question> queue_;
    } questions(original);

    const ownmap::RunTrace reproduced = ownmap::run_acquisition(
        map, log, scorer, questions, respondent, interpreter, calibration,
        original.final_state.q_max(), cfg.pipeline,
        (original_has_metrics && truth) ? &*truth : nullptr);

    const fs::path out(cfg.out_dir);
    const fs::path reproduced_path = out / "trace_replayed.json";
    ownmap::storage::save_trace(reproduced, reproduced_path);

    // byte-level comparison against the original normalized through one
    // load/save round trip
    const fs::path normalized_path = out / "trace_original_normalized.json";
    ownmap::storage::save_trace(original, normalized_path);

    const std::string a = ownmap::storage::read_text(normalized_path);
    const std::string b = ownmap::storage::read_text(reproduced_path);
    if (a == b) {
        std::cout << "replay: " << reproduced.question_count
                  << " questions reproduced, traces identical\n";
        return 0;
    }
    std::cerr << "replay: traces differ (see " << reproduced_path.string() << " vs "
              << normalized_path.string() << ")\n";
    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ownership-aware object maps: conformal scoring and active questioning"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand

    RunConfig cfg;
    std::string config_path;
    std::optional<std::uint64_t> seed_flag;
    app.add_option("--config", config_path, "JSON run configuration")
        ->check(CLI::ExistingFile);
    app.add_option("--seed", seed_flag, "override the configured seed");
    std::string out_flag;
    app.add_option("--out", out_flag, "override the output directory");
    app.add_option("--scorer", cfg.scorer, "heuristic | llm | replay:<file>");
    bool no_background = false, no_history = false, no_neighbors = false,
         no_similars = false, no_questioning = false;
    app.add_flag("--no-background", no_background, "ablation: drop user background");
    app.add_flag("--no-history", no_history, "ablation: drop usage history");
    app.add_flag("--no-neighbors", no_neighbors, "ablation: drop spatial context");
    app.add_flag("--no-similars", no_similars, "ablation: drop visual context");
    app.add_flag("--no-questioning", no_questioning,
                 "ablation: single-shot inference (q_max = 0)");
    app.add_option("--endpoint-url", cfg.endpoint.base_url, "chat completions base URL");
    app.add_option("--model", cfg.endpoint.model, "model name");

    // gen
    auto* gen = app.add_subcommand("gen", "generate a synthetic household dataset");
    std::string gen_spec, gen_builtin = "house34";
    bool gen_jsonl = false;
    gen->add_option("--spec", gen_spec, "scenario spec JSON")->check(CLI::ExistingFile);
    gen->add_option("--builtin", gen_builtin, "bundled spec: house34 | house5");
    gen->add_flag("--jsonl", gen_jsonl, "also write events.jsonl");

    // calibrate
    auto* calibrate = app.add_subcommand("calibrate",
                                         "fit conformal thresholds on generated data");
    std::string cal_spec, cal_builtin = "house34";
    std::size_t cal_envs = 10;
    calibrate->add_option("--spec", cal_spec, "scenario spec JSON")
        ->check(CLI::ExistingFile);
    calibrate->add_option("--builtin", cal_builtin, "bundled spec: house34 | house5");
    calibrate->add_option("--envs", cal_envs, "number of calibration environments");
    calibrate->add_option("--alpha", cfg.alpha, "coverage error level");
    calibrate->add_option("--alpha-cp", cfg.alpha_cp, "stopping quantile level");
    calibrate->add_option("--calibration", cfg.calibration_path,
                          "output calibration file");

    // run
    auto* run = app.add_subcommand("run", "run the active acquisition loop");
    run->add_option("--map", cfg.map_path, "map file");
    run->add_option("--events", cfg.events_path, "caption file");
    run->add_option("--roster", cfg.roster_path, "roster file");
    run->add_option("--truth", cfg.truth_path, "ground truth (oracle + metrics)");
    run->add_option("--calibration", cfg.calibration_path, "calibration file");
    run->add_option("--respondent", cfg.respondent,
                    "oracle | scripted:<file> | console");
    run->add_option("--record", cfg.record_path, "record the LLM transcript here");
    run->add_option("--trials", cfg.trials, "number of trials");
    std::optional<std::size_t> q_max_flag;
    run->add_option("--q-max", q_max_flag, "question budget (default: object count)");

    // eval
    auto* eval = app.add_subcommand("eval", "score predictions against ground truth");
    std::string eval_truth;
    std::vector<std::string> eval_preds, eval_traces;
    std::string eval_events, eval_roster;
    eval->add_option("--truth", eval_truth, "ground truth file")->required();
    eval->add_option("--pred", eval_preds, "prediction files (repeatable)");
    eval->add_option("--trace", eval_traces, "trace files for step curves (repeatable)");
    eval->add_option("--events", eval_events,
                     "caption file; adds last_user/frequency baselines");
    eval->add_option("--roster", eval_roster, "roster file (needed with --events)");

    // replay
    auto* replay = app.add_subcommand("replay", "re-execute a trace and verify it");
    std::string replay_trace;
    replay->add_option("--trace", replay_trace, "trace file")->required();
    replay->add_option("--map", cfg.map_path, "map file");
    replay->add_option("--events", cfg.events_path, "caption file");
    replay->add_option("--roster", cfg.roster_path, "roster file");
    replay->add_option("--truth", cfg.truth_path, "ground truth file");
    replay->add_option("--calibration", cfg.calibration_path, "calibration file");

    CLI11_PARSE(app, argc, argv);

    try {
        if (!config_path.empty()) load_config_file(cfg, config_path);
        if (seed_flag) cfg.seed = *seed_flag;
        if (!out_flag.empty()) cfg.out_dir = out_flag;
        if (q_max_flag) cfg.q_max = *q_max_flag;
        if (no_questioning) cfg.q_max = 0;
        if (no_background) cfg.pipeline.flags.use_background = false;
        if (no_history) cfg.pipeline.flags.use_history = false;
        if (no_neighbors) cfg.pipeline.flags.use_neighbors = false;
        if (no_similars) cfg.pipeline.flags.use_similars = false;

        if (gen->parsed())
            return cmd_gen(gen_spec, gen_builtin, seed_flag, cfg.out_dir, gen_jsonl);
        if (calibrate->parsed()) return cmd_calibrate(cfg, cal_spec, cal_builtin, cal_envs);
        if (run->parsed()) return cmd_run(cfg);
        if (eval->parsed())
            return cmd_eval(eval_truth, eval_preds, eval_traces, eval_events, eval_roster,
                            cfg.out_dir);
        if (replay->parsed()) return cmd_replay(cfg, replay_trace);
        return 1;
    } catch (const ownmap::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
