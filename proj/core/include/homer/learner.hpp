#pragma once

#include <cstddef>
#include <vector>

#include "homer/dataset.hpp"
#include "homer/hierarchy.hpp"
#include "homer/linear_model.hpp"

namespace homer {

struct TrainOptions {
    std::size_t threads = 1;
    /// Materialize every node's training-set index list up front instead of
    /// node by node. Same result, more memory, better parallelism.
    bool cache_node_data = false;
};

/// |D_n| aggregates over the tree, split into leaf and non-leaf nodes.
struct TreeTelemetry {
    std::size_t total_nodes = 0;
    std::size_t leaf_nodes = 0;
    std::size_t nonleaf_nodes = 0;
    std::size_t sum_dn_leaf = 0;
    std::size_t sum_dn_nonleaf = 0;
    double mean_dn_leaf = 0.0;
    double mean_dn_nonleaf = 0.0;
    double mean_dn = 0.0;
    std::size_t depth = 0;
};

/// A trained hierarchy of binary-relevance node classifiers. A flat
/// binary-relevance model is the special case of a single-node tree trained
/// on every instance.
struct HomerModel {
    LabelTree tree;
    LabelVocabulary vocab;
    std::size_t num_features = 0;
    LearnerParams learner;
    bool flat_br = false;
    /// Training-split label frequencies, kept for frequency-bucketed reports.
    std::vector<std::size_t> label_frequencies;

    TreeTelemetry telemetry() const;
    /// Throws std::logic_error if some node lacks a classifier of the right size.
    void check_trained() const;

    friend bool operator==(const HomerModel&, const HomerModel&) = default;
};

/// One binary model per label: positives carry the label, negatives are all
/// other training instances.
HomerModel train_flat_br(const MultiLabelDataset& train, const LearnerParams& params, const TrainOptions& options = {});

/// Trains every node of `tree` on its D_n: internal nodes get one model per
/// child meta-label, leaves one model per label, with negatives drawn only
/// from D_n.
HomerModel train_homer(const MultiLabelDataset& train, LabelTree tree, const LearnerParams& params,
                       const TrainOptions& options = {});

}  // namespace homer
