#include "grace/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "grace/errors.hpp"

namespace grace {

namespace {

double safe_div(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

double f1_from(double precision, double recall) {
    return (precision + recall) == 0.0 ? 0.0 : 2.0 * precision * recall / (precision + recall);
}

}  // namespace

MetricsReport classification_report(std::span<const int> predicted, std::span<const int> truth,
                                    int num_classes) {
    if (predicted.size() != truth.size()) {
        throw InputError("prediction/truth length mismatch");
    }
    if (predicted.empty()) throw InputError("cannot evaluate an empty prediction set");
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (predicted[i] < 0 || predicted[i] >= num_classes || truth[i] < 0 ||
            truth[i] >= num_classes) {
            throw InputError("label out of range at index " + std::to_string(i));
        }
    }

    std::vector<std::size_t> tp(num_classes, 0), fp(num_classes, 0), fn(num_classes, 0);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (predicted[i] == truth[i]) {
            ++correct;
            ++tp[truth[i]];
        } else {
            ++fp[predicted[i]];
            ++fn[truth[i]];
        }
    }

    MetricsReport report;
    report.task = num_classes == 2 ? "binary" : "multiclass";
    report.evaluated = truth.size();
    report.accuracy = static_cast<double>(correct) / static_cast<double>(truth.size());
    double f1_sum = 0.0;
    for (int c = 0; c < num_classes; ++c) {
        ClassMetrics m;
        m.name = "class_" + std::to_string(c);
        m.precision = safe_div(static_cast<double>(tp[c]), static_cast<double>(tp[c] + fp[c]));
        m.recall = safe_div(static_cast<double>(tp[c]), static_cast<double>(tp[c] + fn[c]));
        m.f1 = f1_from(m.precision, m.recall);
        m.support = tp[c] + fn[c];
        f1_sum += m.f1;
        report.per_class.push_back(std::move(m));
    }
    report.macro_f1 = f1_sum / static_cast<double>(num_classes);
    return report;
}

std::optional<double> auroc(std::span<const double> scores, std::span<const int> truth) {
    if (scores.size() != truth.size()) throw InputError("score/truth length mismatch");
    std::size_t positives = 0;
    for (int y : truth) {
        if (y != 0 && y != 1) throw InputError("auroc expects binary labels 0/1");
        positives += static_cast<std::size_t>(y);
    }
    const std::size_t negatives = truth.size() - positives;
    if (positives == 0 || negatives == 0) return std::nullopt;

    // Rank-sum with average ranks over ties.
    std::vector<std::size_t> idx(scores.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
    double positive_rank_sum = 0.0;
    std::size_t i = 0;
    while (i < idx.size()) {
        std::size_t j = i;
        while (j < idx.size() && scores[idx[j]] == scores[idx[i]]) ++j;
        const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);  // ranks are 1-based
        for (std::size_t t = i; t < j; ++t) {
            if (truth[idx[t]] == 1) positive_rank_sum += avg_rank;
        }
        i = j;
    }
    const double np = static_cast<double>(positives);
    const double nn = static_cast<double>(negatives);
    return (positive_rank_sum - np * (np + 1.0) / 2.0) / (np * nn);
}

MetricsReport multilabel_report(const Matrix& scores, const Matrix& truth,
                                std::span<const std::string> label_names, double threshold) {
    if (!scores.same_shape(truth)) throw InputError("score/truth shape mismatch");
    if (threshold <= 0.0 || threshold >= 1.0) {
        throw ConfigError("multilabel threshold must lie in (0, 1)");
    }
    if (!label_names.empty() && label_names.size() != scores.cols) {
        throw InputError("label name count does not match the label dimension");
    }

    MetricsReport report;
    report.task = "multilabel";
    report.evaluated = scores.rows;
    std::size_t exact_matches = 0;
    double f1_sum = 0.0;
    for (std::size_t l = 0; l < scores.cols; ++l) {
        std::size_t tp = 0, fp = 0, fn = 0;
        for (std::size_t i = 0; i < scores.rows; ++i) {
            const bool pred = scores(i, l) > threshold;
            const bool actual = truth(i, l) != 0.0;
            if (pred && actual) ++tp;
            else if (pred) ++fp;
            else if (actual) ++fn;
        }
        ClassMetrics m;
        m.name = label_names.empty() ? "label_" + std::to_string(l) : label_names[l];
        m.precision = safe_div(static_cast<double>(tp), static_cast<double>(tp + fp));
        m.recall = safe_div(static_cast<double>(tp), static_cast<double>(tp + fn));
        m.f1 = f1_from(m.precision, m.recall);
        m.support = tp + fn;
        f1_sum += m.f1;
        report.per_class.push_back(std::move(m));
    }
    for (std::size_t i = 0; i < scores.rows; ++i) {
        bool all = true;
        for (std::size_t l = 0; l < scores.cols && all; ++l) {
            all = (scores(i, l) > threshold) == (truth(i, l) != 0.0);
        }
        exact_matches += all ? 1 : 0;
    }
    report.accuracy =
        scores.rows == 0 ? 0.0 : static_cast<double>(exact_matches) / static_cast<double>(scores.rows);
    report.macro_f1 = scores.cols == 0 ? 0.0 : f1_sum / static_cast<double>(scores.cols);
    return report;
}

}  // namespace grace
