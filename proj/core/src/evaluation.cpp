#include "ownmap/evaluation.hpp"

#include <algorithm>

#include "ownmap/errors.hpp"

namespace ownmap {

namespace {

double jaccard(const OwnerSet& a, const OwnerSet& b) {
    if (a.empty() && b.empty()) return 1.0;
    std::size_t inter = 0;
    for (const auto& x : a)
        if (b.count(x)) ++inter;
    const std::size_t uni = a.size() + b.size() - inter;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

struct Counts {
    std::size_t tp = 0, fp = 0, fn = 0;
};

MetricsReport from_samples(const std::vector<std::pair<const OwnerSet*, const OwnerSet*>>&
                               samples) {  // (truth, predicted)
    MetricsReport report;
    report.n_samples = samples.size();
    if (samples.empty()) return report;

    Counts pooled;
    std::size_t exact = 0;
    double jaccard_sum = 0.0;
    for (const auto& [truth, predicted] : samples) {
        if (*truth == *predicted) ++exact;
        jaccard_sum += jaccard(*truth, *predicted);
        for (const auto& u : *predicted)
            truth->count(u) ? ++pooled.tp : ++pooled.fp;
        for (const auto& u : *truth)
            if (!predicted->count(u)) ++pooled.fn;
    }

    const double n = static_cast<double>(samples.size());
    report.subset_accuracy = static_cast<double>(exact) / n;
    report.mean_jaccard = jaccard_sum / n;
    report.micro_precision =
        pooled.tp + pooled.fp == 0
            ? 0.0
            : static_cast<double>(pooled.tp) / static_cast<double>(pooled.tp + pooled.fp);
    report.micro_recall =
        pooled.tp + pooled.fn == 0
            ? 0.0
            : static_cast<double>(pooled.tp) / static_cast<double>(pooled.tp + pooled.fn);
    const double pr = report.micro_precision + report.micro_recall;
    report.micro_f1 =
        pr == 0.0 ? 0.0 : 2.0 * report.micro_precision * report.micro_recall / pr;
    return report;
}

}  // namespace

OwnerSet predicted_set_from_state(const ObjectState& entry) {
    if (entry.asked && !entry.answered.empty())
        return OwnerSet(entry.answered.begin(), entry.answered.end());
    if (entry.share.decided())
        return OwnerSet(entry.share.owners.begin(), entry.share.owners.end());
    // argmax fallback, ties broken by name
    std::string best;
    double best_score = -1.0;
    for (const auto& [user, score] : entry.scores) {
        if (score > best_score) {
            best_score = score;
            best = user;
        }
    }
    if (best.empty()) return {};
    return {best};
}

MetricsReport compute_metrics(const PredictionMap& predictions, const TruthMap& truth) {
    for (const auto& [id, owners] : predictions) {
        (void)owners;
        if (!truth.count(id))
            throw ValidationError("metrics: prediction for unknown object '" + id + "'");
    }

    static const OwnerSet kEmpty;
    std::vector<std::pair<const OwnerSet*, const OwnerSet*>> all;
    std::map<std::string, std::vector<std::pair<const OwnerSet*, const OwnerSet*>>>
        by_category;
    for (const auto& [id, entry] : truth) {
        auto it = predictions.find(id);
        const OwnerSet* predicted = it == predictions.end() ? &kEmpty : &it->second;
        all.emplace_back(&entry.owners, predicted);
        if (!entry.scenario.empty())
            by_category[entry.scenario].emplace_back(&entry.owners, predicted);
    }

    MetricsReport report = from_samples(all);
    for (const auto& [category, samples] : by_category)
        report.per_category[category] = from_samples(samples);
    return report;
}

}  // namespace ownmap
