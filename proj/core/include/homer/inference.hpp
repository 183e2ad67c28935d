#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "homer/dataset.hpp"
#include "homer/learner.hpp"

namespace homer {

struct Prediction {
    /// Bipartition mode: predicted labels, ascending.
    std::vector<LabelId> labels;
    /// Ranking mode: every label with its score, by descending score then ascending id.
    std::vector<std::pair<LabelId, double>> ranking;
    /// Nodes whose classifier was evaluated.
    std::size_t nodes_visited = 0;
    /// Leaves reached.
    std::size_t paths_taken = 0;
    /// Input features with id >= the model's feature count (ignored).
    std::size_t unknown_features = 0;
};

enum class PredictMode { bipartition, ranking };

/// Top-down prediction: the instance enters every child whose meta-label is
/// decided positive; the answer is the union of positive labels at the
/// leaves it reaches.
Prediction predict_bipartition(const HomerModel& model, std::span<const Feature> x);

/// Score propagation: a child's score is its parent's score times its
/// meta-label score, a label's score is its leaf's score times the label
/// score. With `prune`, a child whose propagated score is <= parent score /
/// (parent's child count) is not expanded and its labels score 0.
Prediction predict_ranking(const HomerModel& model, std::span<const Feature> x, bool prune);

struct TraversalStats {
    std::size_t instances = 0;
    std::size_t total_nodes = 0;
    double mean_nodes_visited = 0.0;
    std::size_t max_nodes_visited = 0;
    double mean_paths_taken = 0.0;
    std::size_t max_paths_taken = 0;
    std::size_t unknown_features = 0;
};

TraversalStats traversal_stats(std::span<const Prediction> predictions, std::size_t total_nodes);

/// Bipartition traversal over a whole test set.
TraversalStats traversal_stats(const HomerModel& model, const MultiLabelDataset& test, std::size_t threads = 1);

/// Predicts every instance of `test` in order.
std::vector<Prediction> predict_all(const HomerModel& model, const MultiLabelDataset& test, PredictMode mode,
                                    bool prune = false, std::size_t threads = 1);

}  // namespace homer
