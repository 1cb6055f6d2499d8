#include <filesystem>

#include <doctest.h>

#include "helpers.hpp"
#include "ownmap/acquisition.hpp"
#include "ownmap/errors.hpp"
#include "ownmap/storage.hpp"

using namespace ownmap;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("ownmap_test_" + std::to_string(Rng(reinterpret_cast<std::uintptr_t>(this))
                                                    .next_u64()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("roster file round-trips and enforces the minimum size") {
    TempDir dir;
    const Roster roster = testutil::bmt_roster();
    storage::save_roster(roster, dir.path / "roster.json");
    const Roster loaded = storage::load_roster(dir.path / "roster.json");
    REQUIRE(loaded.size() == 3);
    CHECK(loaded.users()[0].name == "Bob");
    CHECK(loaded.users()[2].occupation == "elementary school student");

    Roster solo;
    solo.add({"Bob", "father", "office worker"});
    CHECK_THROWS_AS(storage::save_roster(solo, dir.path / "solo.json"), ValidationError);
}

TEST_CASE("map files round-trip bytes and content") {
    TempDir dir;
    const auto env = datagen::generate_environment(datagen::bundled_house5(5));
    storage::save_map(env.map, dir.path / "map.json");
    const MapStore loaded = storage::load_map(dir.path / "map.json", env.roster);
    REQUIRE(loaded.size() == env.map.size());
    for (const auto& record : env.map.objects()) {
        const auto& other = loaded.at(record.object_id);
        CHECK(other.class_label == record.class_label);
        CHECK(other.position == record.position);
        CHECK(other.feature == record.feature);
        CHECK(other.scores == record.scores);
    }

    storage::save_map(loaded, dir.path / "map2.json");
    CHECK(storage::read_text(dir.path / "map.json") ==
          storage::read_text(dir.path / "map2.json"));
}

TEST_CASE("empty object list loads as an empty map") {
    TempDir dir;
    storage::write_text(dir.path / "map.json", R"({"objects": []})");
    const MapStore map = storage::load_map(dir.path / "map.json", testutil::bmt_roster());
    CHECK(map.empty());
}

TEST_CASE("the generated household dataset has 34 loadable records") {
    TempDir dir;
    const auto env = datagen::generate_environment(datagen::bundled_house34(1));
    storage::save_map(env.map, dir.path / "map.json");
    const MapStore loaded = storage::load_map(dir.path / "map.json", env.roster);
    CHECK(loaded.size() == 34);
}

TEST_CASE("malformed map files are rejected") {
    TempDir dir;
    storage::write_text(dir.path / "bad.json", "{not json");
    CHECK_THROWS_AS(storage::load_map(dir.path / "bad.json", testutil::bmt_roster()),
                    ValidationError);
    storage::write_text(dir.path / "nofeature.json",
                        R"({"objects": [{"object_id": "a", "class": "thing"}]})");
    CHECK_THROWS_AS(
        storage::load_map(dir.path / "nofeature.json", testutil::bmt_roster()),
        ValidationError);
    CHECK_THROWS_AS(storage::load_map(dir.path / "missing.json", testutil::bmt_roster()),
                    IoError);
}

TEST_CASE("event text and jsonl forms round-trip losslessly") {
    TempDir dir;
    const auto env = datagen::generate_environment(datagen::bundled_house5(8));

    storage::save_events_text(env.log, dir.path / "events.txt");
    ParseReport report;
    const auto from_text =
        storage::load_events_text(dir.path / "events.txt", env.roster, &report);
    CHECK(report.rejected.empty());
    CHECK(from_text.size() == env.log.size());

    storage::save_events_jsonl(env.log, dir.path / "events.jsonl");
    const auto from_jsonl = storage::load_events_jsonl(dir.path / "events.jsonl");
    REQUIRE(from_jsonl.size() == env.log.size());
    for (std::size_t i = 0; i < env.log.size(); ++i) {
        CHECK(from_jsonl.events()[i].time == env.log.events()[i].time);
        CHECK(from_jsonl.events()[i].user == env.log.events()[i].user);
        CHECK(from_jsonl.events()[i].action == env.log.events()[i].action);
        CHECK(from_jsonl.events()[i].object_id == env.log.events()[i].object_id);
        CHECK(from_jsonl.events()[i].raw_text == env.log.events()[i].raw_text);
    }
}

TEST_CASE("truth, spec, calibration and transcript files round-trip") {
    TempDir dir;
    const auto env = datagen::generate_environment(datagen::bundled_house5(9));

    storage::save_truth(env.truth, env.scenarios, dir.path / "truth.json");
    const auto truth = storage::load_truth(dir.path / "truth.json");
    CHECK(truth.truth.size() == env.truth.size());
    CHECK(truth.truth.at("coffee_maker").owners == OwnerSet{"Bob", "Mary"});
    CHECK(truth.truth.at("coffee_maker").scenario == "multi_user_sharing");

    const auto spec = datagen::bundled_house34(77);
    storage::save_spec(spec, dir.path / "spec.json");
    const auto loaded_spec = storage::load_spec(dir.path / "spec.json");
    CHECK(loaded_spec.seed == 77);
    CHECK(loaded_spec.objects.size() == spec.objects.size());
    CHECK(loaded_spec.sessions_per_day_max == spec.sessions_per_day_max);
    const auto env_a = datagen::generate_environment(spec);
    const auto env_b = datagen::generate_environment(loaded_spec);
    CHECK(env_a.log.size() == env_b.log.size());

    CalibrationModel model{0.2, 0.41, 0.05, 0.12, 68};
    storage::save_calibration(model, dir.path / "cal.json");
    const auto loaded_model = storage::load_calibration(dir.path / "cal.json");
    CHECK(loaded_model.q_alpha == model.q_alpha);
    CHECK(loaded_model.q_cp == model.q_cp);
    CHECK(loaded_model.n_calibration == 68);

    Transcript transcript;
    transcript.put("prompt one", "reply one");
    transcript.put("prompt two", "reply two");
    storage::save_transcript(transcript, dir.path / "transcript.json");
    const auto loaded_transcript = storage::load_transcript(dir.path / "transcript.json");
    CHECK(loaded_transcript.size() == 2);
    CHECK(loaded_transcript.get("prompt one") == "reply one");
}

TEST_CASE("predictions files round-trip") {
    TempDir dir;
    storage::PredictionsFile file;
    file.method = "ownmap";
    file.trial = 3;
    file.n_questions = 17;
    file.predictions["marker"] = {"Bob"};
    file.predictions["sofa"] = {"Bob", "Mary", "Tom"};
    file.predictions["ghost"] = {};
    file.needs_revisit = {"ghost"};
    storage::save_predictions(file, dir.path / "pred.json");
    const auto loaded = storage::load_predictions(dir.path / "pred.json");
    CHECK(loaded.method == "ownmap");
    CHECK(loaded.trial == 3);
    CHECK(loaded.n_questions == 17);
    CHECK(loaded.predictions.at("sofa").size() == 3);
    CHECK(loaded.predictions.at("ghost").empty());
    CHECK(loaded.needs_revisit == std::vector<std::string>{"ghost"});
}

TEST_CASE("traces round-trip through save and load") {
    TempDir dir;
    const auto env = datagen::generate_environment(datagen::bundled_house5(4));
    PipelineConfig config;
    config.affinity = household_affinity();
    HeuristicScorer scorer(config.weights, config.affinity);
    const auto cal = calibrate_on_environments(datagen::bundled_house5(1), 600, 3,
                                               scorer, config, 0.2, 0.05);

    TruthMap truth;
    std::map<std::string, std::vector<std::string>> owners;
    for (const auto& [id, names] : env.truth) {
        truth[id] = TruthEntry{OwnerSet(names.begin(), names.end()),
                               datagen::to_string(env.scenarios.at(id))};
        owners[id] = names;
    }
    TemplateQuestionBackend questions;
    OracleRespondent respondent(owners);
    RuleAnswerInterpreter interpreter;
    const auto trace =
        run_acquisition(env.map, env.log, scorer, questions, respondent, interpreter,
                        cal.model, env.map.size(), config, &truth);

    storage::save_trace(trace, dir.path / "trace.json");
    const auto loaded = storage::load_trace(dir.path / "trace.json");
    storage::save_trace(loaded, dir.path / "trace2.json");
    CHECK(storage::read_text(dir.path / "trace.json") ==
          storage::read_text(dir.path / "trace2.json"));
    CHECK(loaded.question_count == trace.question_count);
    CHECK(loaded.steps.size() == trace.steps.size());
    CHECK(loaded.final_state.object_ids() == trace.final_state.object_ids());
}

TEST_CASE("reports and curves serialize with stable shapes") {
    TempDir dir;
    MetricsReport a;
    a.subset_accuracy = 1.0;
    a.mean_jaccard = 1.0;
    a.micro_precision = 1.0;
    a.micro_recall = 1.0;
    a.micro_f1 = 1.0;
    a.n_samples = 34;
    a.n_questions = 20;
    a.per_category["single_user"] = a;
    MetricsReport b = a;
    b.subset_accuracy = 0.9;
    b.n_questions = 24;

    storage::MethodReport method;
    method.method = "ownmap";
    method.trials = {a, b};
    storage::save_report({method}, dir.path / "report.json", dir.path / "report.tsv");

    const std::string tsv = storage::read_text(dir.path / "report.tsv");
    CHECK(tsv.find("method\tcategory\tmetric\tmean\tstd\tn_trials") != std::string::npos);
    CHECK(tsv.find("ownmap\toverall\tsubset_accuracy\t0.95\t") != std::string::npos);
    CHECK(tsv.find("n_questions\t22\t") != std::string::npos);

    storage::save_curves("ownmap", {{a, b}}, dir.path / "curves.tsv");
    const std::string curves = storage::read_text(dir.path / "curves.tsv");
    CHECK(curves.find("ownmap\t0\t0\t") != std::string::npos);
    CHECK(curves.find("ownmap\t0\t1\t") != std::string::npos);
}
