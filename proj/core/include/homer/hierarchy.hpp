#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "homer/clustering.hpp"
#include "homer/dataset.hpp"
#include "homer/linear_model.hpp"

namespace homer {

using NodeId = std::uint32_t;
inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();

struct HierarchyParams {
    std::size_t k = 3;
    std::size_t nmax = 20;
    std::size_t iterations = 3;
    std::uint64_t seed = 0;
    ClustererKind clusterer = ClustererKind::balanced_kmeans;

    friend bool operator==(const HierarchyParams&, const HierarchyParams&) = default;
};

/// A node of the label tree. For an internal node, meta-label i stands for
/// children[i] and is positive for an instance carrying any label of that
/// child's subtree; for a leaf the targets are the node's own labels.
struct TreeNode {
    NodeId id = 0;
    NodeId parent = kNoNode;
    std::size_t depth = 0;
    std::vector<LabelId> labels;
    std::vector<NodeId> children;
    /// |D_n| seen when the node was trained (0 before training).
    std::size_t train_size = 0;
    std::optional<NodeClassifier> classifier;

    bool is_leaf() const noexcept { return children.empty(); }
    std::size_t num_meta_labels() const noexcept { return is_leaf() ? labels.size() : children.size(); }

    friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

struct LabelTree {
    std::vector<TreeNode> nodes;
    NodeId root = 0;
    HierarchyParams params;

    const TreeNode& node(NodeId id) const { return nodes.at(id); }
    TreeNode& node(NodeId id) { return nodes.at(id); }
    std::size_t size() const noexcept { return nodes.size(); }
    std::vector<NodeId> leaves() const;
    std::size_t depth() const;

    /// Checks the structural invariants against a vocabulary of `num_labels`
    /// labels: root holds every label, internal nodes are the disjoint union of
    /// >= 2 children, leaves partition the labels and have at most nmax labels.
    /// Throws std::logic_error describing the first violation.
    void validate(std::size_t num_labels) const;

    friend bool operator==(const LabelTree&, const LabelTree&) = default;
};

struct HierarchyStats {
    ClusteringStats clustering;
    std::size_t splits = 0;
    /// Splits where k was clamped to the node's label count.
    std::size_t clamped_splits = 0;
};

/// A tree holding every label in one leaf.
LabelTree single_node_tree(std::size_t num_labels);

/// Recursively clusters the label set until every leaf has at most nmax
/// labels. Labels are represented by their occurrence vectors over `train`.
/// Labels never seen in `train` are dealt round-robin to the children after
/// the seen labels are clustered.
LabelTree build_hierarchy(const MultiLabelDataset& train, const HierarchyParams& params,
                          HierarchyStats* stats = nullptr);

/// D_n: the training instances carrying at least one of the node's labels.
MultiLabelDataset node_training_set(const TreeNode& node, const MultiLabelDataset& train);

/// Indices into the node's meta-labels that are positive for `instance`.
std::vector<std::size_t> meta_label_targets(const LabelTree& tree, NodeId node, const SparseInstance& instance);

/// For an internal node: owner[l] = index of the child whose subtree holds
/// label l, or -1 for labels outside the node.
std::vector<int> child_owner_map(const LabelTree& tree, NodeId node, std::size_t num_labels);

}  // namespace homer
