#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "homer/dataset.hpp"
#include "homer/inference.hpp"

namespace homer {

/// Per-label true positive, false positive and false negative counts.
struct ConfusionCounts {
    std::vector<std::size_t> tp, fp, fn;

    explicit ConfusionCounts(std::size_t num_labels = 0) : tp(num_labels), fp(num_labels), fn(num_labels) {}
    std::size_t num_labels() const noexcept { return tp.size(); }
};

/// Counts over aligned per-instance label sets (each sorted and unique).
/// Throws std::invalid_argument when the sequences differ in length or a
/// label id is out of range.
ConfusionCounts confusion(std::span<const std::vector<LabelId>> truth, std::span<const std::vector<LabelId>> predicted,
                          std::size_t num_labels);

/// 2*sum(tp) / (2*sum(tp) + sum(fp) + sum(fn)); 0 when the denominator is 0.
double micro_f1(const ConfusionCounts& c);

/// Mean of per-label F1 over all labels; a label with 0/0 contributes 0.
double macro_f1(const ConfusionCounts& c);

std::vector<double> per_label_f1(const ConfusionCounts& c);

/// Training-frequency buckets: rare <= rare_max < mid < frequent_min <= frequent.
struct BucketBounds {
    std::size_t rare_max = 70;
    std::size_t frequent_min = 700;
};

struct BucketScore {
    std::size_t labels = 0;
    double micro_f = 0.0;
    double macro_f = 0.0;
};

/// Buckets without any label are absent.
struct BucketedReport {
    std::optional<BucketScore> rare, mid, frequent;
};

BucketedReport bucketed_report(const ConfusionCounts& c, std::span<const std::size_t> label_frequencies,
                               const BucketBounds& bounds = {});

struct EvaluationReport {
    double micro_f = 0.0;
    double macro_f = 0.0;
    std::vector<double> per_label_f1;
    BucketedReport buckets;
    double train_seconds = 0.0;
    double predict_seconds = 0.0;
    TraversalStats traversal;
};

/// Scores bipartition predictions against the test truth. `label_frequencies`
/// come from the training split.
EvaluationReport evaluate(const MultiLabelDataset& test, std::span<const Prediction> predictions,
                          std::span<const std::size_t> label_frequencies, const BucketBounds& bounds = {});

}  // namespace homer
