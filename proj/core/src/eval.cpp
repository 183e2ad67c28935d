#include "homer/eval.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>
#include <string>

namespace homer {

ConfusionCounts confusion(std::span<const std::vector<LabelId>> truth, std::span<const std::vector<LabelId>> predicted,
                          std::size_t num_labels) {
    if (truth.size() != predicted.size())
        throw std::invalid_argument("confusion: " + std::to_string(truth.size()) + " truth rows vs " +
                                    std::to_string(predicted.size()) + " predicted rows");
    ConfusionCounts c(num_labels);
    auto check = [num_labels](LabelId l) {
        if (l >= num_labels) throw std::invalid_argument("confusion: label id " + std::to_string(l) + " out of range");
    };
    auto normalized = [](const std::vector<LabelId>& v, std::vector<LabelId>& scratch) -> const std::vector<LabelId>& {
        if (std::adjacent_find(v.begin(), v.end(), std::greater_equal<>{}) == v.end()) return v;
        scratch = v;
        std::sort(scratch.begin(), scratch.end());
        scratch.erase(std::unique(scratch.begin(), scratch.end()), scratch.end());
        return scratch;
    };
    std::vector<LabelId> t_scratch, p_scratch;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const auto& t = normalized(truth[i], t_scratch);
        const auto& p = normalized(predicted[i], p_scratch);
        for (auto l : t) check(l);
        for (auto l : p) check(l);
        // Merge walk over the two sorted sets.
        auto a = t.begin();
        auto b = p.begin();
        while (a != t.end() || b != p.end()) {
            if (b == p.end() || (a != t.end() && *a < *b)) {
                ++c.fn[*a++];
            } else if (a == t.end() || *b < *a) {
                ++c.fp[*b++];
            } else {
                ++c.tp[*a];
                ++a;
                ++b;
            }
        }
    }
    return c;
}

double micro_f1(const ConfusionCounts& c) {
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t l = 0; l < c.num_labels(); ++l) {
        tp += c.tp[l];
        fp += c.fp[l];
        fn += c.fn[l];
    }
    const std::size_t denom = 2 * tp + fp + fn;
    return denom == 0 ? 0.0 : static_cast<double>(2 * tp) / static_cast<double>(denom);
}

std::vector<double> per_label_f1(const ConfusionCounts& c) {
    std::vector<double> out(c.num_labels(), 0.0);
    for (std::size_t l = 0; l < c.num_labels(); ++l) {
        const std::size_t denom = 2 * c.tp[l] + c.fp[l] + c.fn[l];
        if (denom) out[l] = static_cast<double>(2 * c.tp[l]) / static_cast<double>(denom);
    }
    return out;
}

double macro_f1(const ConfusionCounts& c) {
    if (c.num_labels() == 0) return 0.0;
    double sum = 0.0;
    for (double f : per_label_f1(c)) sum += f;
    return sum / static_cast<double>(c.num_labels());
}

BucketedReport bucketed_report(const ConfusionCounts& c, std::span<const std::size_t> label_frequencies,
                               const BucketBounds& bounds) {
    if (label_frequencies.size() != c.num_labels())
        throw std::invalid_argument("bucketed_report: frequency vector does not match label count");
    std::vector<LabelId> rare, mid, frequent;
    for (std::size_t l = 0; l < c.num_labels(); ++l) {
        const auto f = label_frequencies[l];
        if (f <= bounds.rare_max)
            rare.push_back(static_cast<LabelId>(l));
        else if (f >= bounds.frequent_min)
            frequent.push_back(static_cast<LabelId>(l));
        else
            mid.push_back(static_cast<LabelId>(l));
    }
    auto score = [&c](const std::vector<LabelId>& labels) -> std::optional<BucketScore> {
        if (labels.empty()) return std::nullopt;
        ConfusionCounts sub(labels.size());
        for (std::size_t i = 0; i < labels.size(); ++i) {
            sub.tp[i] = c.tp[labels[i]];
            sub.fp[i] = c.fp[labels[i]];
            sub.fn[i] = c.fn[labels[i]];
        }
        return BucketScore{labels.size(), micro_f1(sub), macro_f1(sub)};
    };
    return {score(rare), score(mid), score(frequent)};
}

EvaluationReport evaluate(const MultiLabelDataset& test, std::span<const Prediction> predictions,
                          std::span<const std::size_t> label_frequencies, const BucketBounds& bounds) {
    std::vector<std::vector<LabelId>> truth, predicted;
    truth.reserve(test.size());
    predicted.reserve(predictions.size());
    for (const auto& inst : test.instances) truth.push_back(inst.labels);
    for (const auto& p : predictions) predicted.push_back(p.labels);

    const auto counts = confusion(truth, predicted, test.vocab.size());
    EvaluationReport r;
    r.micro_f = micro_f1(counts);
    r.macro_f = macro_f1(counts);
    r.per_label_f1 = per_label_f1(counts);
    // Labels appended to the vocabulary after training have frequency 0.
    std::vector<std::size_t> freq(label_frequencies.begin(), label_frequencies.end());
    freq.resize(test.vocab.size(), 0);
    r.buckets = bucketed_report(counts, freq, bounds);
    return r;
}

}  // namespace homer
