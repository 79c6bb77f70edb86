#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "grace/matrix.hpp"

namespace grace {

struct ClassMetrics {
    std::string name;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t support = 0;  // true instances of the class (or label)
};

struct MetricsReport {
    std::string task;  // "binary", "multiclass" or "multilabel"
    std::vector<ClassMetrics> per_class;
    double accuracy = 0.0;
    double macro_f1 = 0.0;
    std::optional<double> auroc;  // binary only, and only when both classes occur
    std::size_t evaluated = 0;
};

// Per-class precision/recall/F1 with the 0-convention for empty denominators,
// accuracy, and macro-F1 (unweighted mean of class F1).
MetricsReport classification_report(std::span<const int> predicted, std::span<const int> truth,
                                    int num_classes);

// Probability that a random positive outranks a random negative; ties count
// 1/2 (Mann-Whitney form). nullopt when only one class is present.
std::optional<double> auroc(std::span<const double> scores, std::span<const int> truth);

// Per-label binary F1 from thresholded scores plus macro-F1. `truth` and
// `scores` are node x label matrices; label_names may be empty.
MetricsReport multilabel_report(const Matrix& scores, const Matrix& truth,
                                std::span<const std::string> label_names, double threshold = 0.5);

}  // namespace grace
