#include <doctest.h>

#include "helpers.hpp"
#include "ownmap/errors.hpp"
#include "ownmap/evaluation.hpp"

using namespace ownmap;

namespace {

// Brute-force reference: walk every (object, user) cell of the confusion
// grid one decision at a time.
MetricsReport brute_force_metrics(const PredictionMap& predictions,
                                  const TruthMap& truth,
                                  const std::vector<std::string>& users) {
    MetricsReport report;
    report.n_samples = truth.size();
    if (truth.empty()) return report;

    std::size_t tp = 0, fp = 0, fn = 0, exact = 0;
    double jaccard_sum = 0.0;
    for (const auto& [id, entry] : truth) {
        static const OwnerSet kEmpty;
        auto it = predictions.find(id);
        const OwnerSet& predicted = it == predictions.end() ? kEmpty : it->second;
        if (predicted == entry.owners) ++exact;

        std::size_t inter = 0, uni = 0;
        for (const auto& user : users) {
            const bool in_truth = entry.owners.count(user) > 0;
            const bool in_pred = predicted.count(user) > 0;
            if (in_truth && in_pred) ++tp, ++inter, ++uni;
            else if (!in_truth && in_pred) ++fp, ++uni;
            else if (in_truth && !in_pred) ++fn, ++uni;
        }
        jaccard_sum += uni == 0 ? 1.0 : static_cast<double>(inter) / uni;
    }
    const double n = static_cast<double>(truth.size());
    report.subset_accuracy = exact / n;
    report.mean_jaccard = jaccard_sum / n;
    report.micro_precision = tp + fp == 0 ? 0.0 : static_cast<double>(tp) / (tp + fp);
    report.micro_recall = tp + fn == 0 ? 0.0 : static_cast<double>(tp) / (tp + fn);
    const double pr = report.micro_precision + report.micro_recall;
    report.micro_f1 = pr == 0.0 ? 0.0 : 2.0 * report.micro_precision * report.micro_recall / pr;
    return report;
}

}  // namespace

TEST_CASE("predicted set resolution order: answer, share decision, argmax") {
    ObjectState entry;
    entry.scores = testutil::bmt_scores(0.5, 0.45, 0.4);

    SUBCASE("asked objects pass their answer through") {
        entry.asked = true;
        entry.answered = {"Bob", "Mary"};
        CHECK(predicted_set_from_state(entry) == OwnerSet{"Bob", "Mary"});
    }
    SUBCASE("undetermined falls back to the argmax user") {
        CHECK(predicted_set_from_state(entry) == OwnerSet{"Bob"});
    }
    SUBCASE("share decisions pass their owners through") {
        entry.share.kind = ShareKind::shared;
        entry.share.owners = {"Bob", "Tom"};
        entry.share.k = 2;
        CHECK(predicted_set_from_state(entry) == OwnerSet{"Bob", "Tom"});
    }
    SUBCASE("asked with an uninformative answer keeps using the scores") {
        entry.asked = true;
        entry.needs_revisit = true;
        CHECK(predicted_set_from_state(entry) == OwnerSet{"Bob"});
    }
    SUBCASE("argmax ties break by name") {
        entry.scores = testutil::bmt_scores(0.4, 0.4, 0.2);
        CHECK(predicted_set_from_state(entry) == OwnerSet{"Bob"});
    }
}

TEST_CASE("metric worked examples") {
    TruthMap truth;
    truth["a"] = TruthEntry{{"Bob"}, "single_user"};

    SUBCASE("exact match") {
        PredictionMap predictions{{"a", {"Bob"}}};
        const auto report = compute_metrics(predictions, truth);
        CHECK(report.subset_accuracy == 1.0);
        CHECK(report.mean_jaccard == 1.0);
    }
    SUBCASE("partial overlap") {
        truth["a"].owners = {"Bob", "Mary"};
        PredictionMap predictions{{"a", {"Bob"}}};
        const auto report = compute_metrics(predictions, truth);
        CHECK(report.subset_accuracy == 0.0);
        CHECK(report.mean_jaccard == doctest::Approx(0.5));
    }
    SUBCASE("pooled micro counts over two objects") {
        truth.clear();
        truth["a"] = TruthEntry{{"Bob"}, ""};
        truth["b"] = TruthEntry{{"Bob", "Mary"}, ""};
        PredictionMap predictions{{"a", {"Bob", "Mary"}}, {"b", {"Bob"}}};
        const auto report = compute_metrics(predictions, truth);
        CHECK(report.subset_accuracy == 0.0);
        CHECK(report.mean_jaccard == doctest::Approx(0.5));
        CHECK(report.micro_precision == doctest::Approx(2.0 / 3.0));
        CHECK(report.micro_recall == doctest::Approx(2.0 / 3.0));
        CHECK(report.micro_f1 == doctest::Approx(2.0 / 3.0));
    }
}

TEST_CASE("missing predictions count as empty sets, unknown ids are rejected") {
    TruthMap truth;
    truth["a"] = TruthEntry{{"Bob"}, ""};
    const auto report = compute_metrics({}, truth);
    CHECK(report.subset_accuracy == 0.0);
    CHECK(report.micro_recall == 0.0);
    CHECK(report.micro_f1 == 0.0);

    PredictionMap bogus{{"zzz", {"Bob"}}};
    CHECK_THROWS_AS(compute_metrics(bogus, truth), ValidationError);
}

TEST_CASE("per-category sub-reports aggregate their own objects") {
    TruthMap truth;
    truth["a"] = TruthEntry{{"Bob"}, "single_user"};
    truth["b"] = TruthEntry{{"Bob", "Mary"}, "multi_user_sharing"};
    PredictionMap predictions{{"a", {"Bob"}}, {"b", {"Bob"}}};
    const auto report = compute_metrics(predictions, truth);
    CHECK(report.per_category.at("single_user").subset_accuracy == 1.0);
    CHECK(report.per_category.at("multi_user_sharing").subset_accuracy == 0.0);
    CHECK(report.per_category.at("single_user").n_samples == 1);
}

TEST_CASE("compute_metrics matches the confusion-grid brute force") {
    const std::vector<std::string> users{"Bob", "Mary", "Tom"};
    Rng rng(777);
    for (int trial = 0; trial < 300; ++trial) {
        TruthMap truth;
        PredictionMap predictions;
        const int n = static_cast<int>(rng.uniform_int(1, 12));
        for (int i = 0; i < n; ++i) {
            const std::string id = "obj_" + std::to_string(i);
            OwnerSet owners;
            while (owners.empty())
                for (const auto& u : users)
                    if (rng.bernoulli(0.4)) owners.insert(u);
            truth[id] = TruthEntry{owners, rng.bernoulli(0.5) ? "single_user" : "other"};
            OwnerSet predicted;
            for (const auto& u : users)
                if (rng.bernoulli(0.4)) predicted.insert(u);
            if (!predicted.empty() || rng.bernoulli(0.5))
                predictions[id] = predicted;
        }
        const auto fast = compute_metrics(predictions, truth);
        const auto slow = brute_force_metrics(predictions, truth, users);
        CHECK(fast.subset_accuracy == slow.subset_accuracy);
        CHECK(fast.mean_jaccard == slow.mean_jaccard);
        CHECK(fast.micro_precision == slow.micro_precision);
        CHECK(fast.micro_recall == slow.micro_recall);
        CHECK(fast.micro_f1 == slow.micro_f1);

        // order relations the metrics must respect
        CHECK(fast.subset_accuracy <= fast.mean_jaccard + 1e-12);
    }
}

TEST_CASE("supersets give perfect recall, subsets perfect precision") {
    TruthMap truth;
    truth["a"] = TruthEntry{{"Bob"}, ""};
    truth["b"] = TruthEntry{{"Mary", "Tom"}, ""};

    PredictionMap supersets{{"a", {"Bob", "Tom"}}, {"b", {"Bob", "Mary", "Tom"}}};
    CHECK(compute_metrics(supersets, truth).micro_recall == 1.0);

    PredictionMap subsets{{"a", {"Bob"}}, {"b", {"Tom"}}};
    CHECK(compute_metrics(subsets, truth).micro_precision == 1.0);
}
