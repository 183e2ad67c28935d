#include "homer/hierarchy.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>
#include <string>

namespace homer {

namespace {

// SplitMix64 finalizer; derives independent per-node seeds from the global one.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Occurrence vectors of `labels` restricted to the instances in `rows`. Zero
// coordinates outside D_n add nothing to either Jaccard sum, so distances
// equal those over the full training set.
std::vector<LabelVector> local_label_vectors(const MultiLabelDataset& train, const std::vector<std::size_t>& rows,
                                             const std::vector<LabelId>& labels) {
    std::vector<std::size_t> slot(train.vocab.size(), labels.size());
    std::vector<LabelVector> out(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        slot[labels[i]] = i;
        out[i].label_id = labels[i];
        out[i].dimension = rows.size();
    }
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (auto l : train.instances[rows[r]].labels)
            if (slot[l] < labels.size()) out[slot[l]].bits.push_back(static_cast<std::uint32_t>(r));
    return out;
}

}  // namespace

std::vector<NodeId> LabelTree::leaves() const {
    std::vector<NodeId> out;
    for (const auto& n : nodes)
        if (n.is_leaf()) out.push_back(n.id);
    return out;
}

std::size_t LabelTree::depth() const {
    std::size_t d = 0;
    for (const auto& n : nodes) d = std::max(d, n.depth);
    return d;
}

void LabelTree::validate(std::size_t num_labels) const {
    auto fail = [](const std::string& msg) { throw std::logic_error("LabelTree: " + msg); };
    if (nodes.empty()) fail("no nodes");
    if (root >= nodes.size()) fail("root out of range");
    if (node(root).labels.size() != num_labels) fail("root does not hold every label");

    std::vector<int> leaf_of(num_labels, -1);
    for (const auto& n : nodes) {
        if (!std::is_sorted(n.labels.begin(), n.labels.end())) fail("node " + std::to_string(n.id) + " labels unsorted");
        for (auto c : n.children)
            if (c >= nodes.size() || nodes[c].parent != n.id) fail("bad child link at node " + std::to_string(n.id));
        if (n.is_leaf()) {
            if (n.labels.size() > params.nmax)
                fail("leaf " + std::to_string(n.id) + " exceeds nmax");
            for (auto l : n.labels) {
                if (l >= num_labels) fail("label id out of range");
                if (leaf_of[l] != -1) fail("label " + std::to_string(l) + " in two leaves");
                leaf_of[l] = static_cast<int>(n.id);
            }
        } else {
            if (n.children.size() < 2) fail("internal node " + std::to_string(n.id) + " has < 2 children");
            std::vector<LabelId> merged;
            for (auto c : n.children) merged.insert(merged.end(), nodes[c].labels.begin(), nodes[c].labels.end());
            std::sort(merged.begin(), merged.end());
            if (std::adjacent_find(merged.begin(), merged.end()) != merged.end())
                fail("children of node " + std::to_string(n.id) + " overlap");
            if (merged != n.labels) fail("children of node " + std::to_string(n.id) + " do not cover its labels");
        }
    }
    for (std::size_t l = 0; l < num_labels; ++l)
        if (leaf_of[l] == -1) fail("label " + std::to_string(l) + " in no leaf");
}

LabelTree single_node_tree(std::size_t num_labels) {
    LabelTree tree;
    tree.params.nmax = num_labels;
    TreeNode root;
    root.labels.resize(num_labels);
    for (std::size_t l = 0; l < num_labels; ++l) root.labels[l] = static_cast<LabelId>(l);
    tree.nodes.push_back(std::move(root));
    return tree;
}

LabelTree build_hierarchy(const MultiLabelDataset& train, const HierarchyParams& params, HierarchyStats* stats) {
    if (params.k < 2) throw std::invalid_argument("build_hierarchy: k must be >= 2");
    if (params.nmax < 1) throw std::invalid_argument("build_hierarchy: nmax must be >= 1");
    if (train.vocab.empty()) throw std::invalid_argument("build_hierarchy: empty label vocabulary");

    HierarchyStats local;
    HierarchyStats& st = stats ? *stats : local;

    const auto freq = label_frequencies(train);
    LabelTree tree = single_node_tree(train.vocab.size());
    tree.params = params;

    // Breadth-first: node ids follow creation order level by level.
    std::deque<NodeId> pending{tree.root};
    while (!pending.empty()) {
        const NodeId id = pending.front();
        pending.pop_front();
        if (tree.node(id).labels.size() <= params.nmax) continue;

        const std::vector<LabelId> labels = tree.node(id).labels;
        const std::size_t k = std::min(params.k, labels.size());
        ++st.splits;
        if (k < params.k) ++st.clamped_splits;

        std::vector<LabelId> seen, unseen;
        for (auto l : labels) (freq[l] > 0 ? seen : unseen).push_back(l);

        std::vector<std::vector<LabelId>> groups;
        std::size_t next_unseen_slot = 0;
        if (seen.size() >= k) {
            const auto rows = filter_indices(train, seen);
            const auto points = local_label_vectors(train, rows, seen);
            ClusterParams cp{k, params.iterations, mix_seed(params.seed, id), {}};
            groups = cluster(params.clusterer, points, cp, &st.clustering).clusters;
        } else {
            groups.resize(k);
            for (std::size_t i = 0; i < seen.size(); ++i) groups[i].push_back(seen[i]);
            next_unseen_slot = seen.size();
        }
        for (auto l : unseen) {
            groups[next_unseen_slot].push_back(l);
            next_unseen_slot = (next_unseen_slot + 1) % groups.size();
        }
        std::erase_if(groups, [](const auto& g) { return g.empty(); });
        if (groups.size() < 2) throw std::logic_error("build_hierarchy: split produced fewer than two children");

        for (auto& g : groups) {
            std::sort(g.begin(), g.end());
            TreeNode child;
            child.id = static_cast<NodeId>(tree.nodes.size());
            child.parent = id;
            child.depth = tree.node(id).depth + 1;
            child.labels = std::move(g);
            tree.node(id).children.push_back(child.id);
            pending.push_back(child.id);
            tree.nodes.push_back(std::move(child));
        }
    }
    return tree;
}

MultiLabelDataset node_training_set(const TreeNode& node, const MultiLabelDataset& train) {
    return filter_by_labels(train, node.labels);
}

std::vector<int> child_owner_map(const LabelTree& tree, NodeId node, std::size_t num_labels) {
    std::vector<int> owner(num_labels, -1);
    const auto& n = tree.node(node);
    for (std::size_t c = 0; c < n.children.size(); ++c)
        for (auto l : tree.node(n.children[c]).labels) owner.at(l) = static_cast<int>(c);
    return owner;
}

std::vector<std::size_t> meta_label_targets(const LabelTree& tree, NodeId node, const SparseInstance& instance) {
    const auto& n = tree.node(node);
    std::vector<std::size_t> out;
    if (n.is_leaf()) {
        for (std::size_t i = 0; i < n.labels.size(); ++i)
            if (instance.has_label(n.labels[i])) out.push_back(i);
        return out;
    }
    for (std::size_t c = 0; c < n.children.size(); ++c) {
        const auto& child_labels = tree.node(n.children[c]).labels;
        const bool hit = std::any_of(instance.labels.begin(), instance.labels.end(), [&](LabelId l) {
            return std::binary_search(child_labels.begin(), child_labels.end(), l);
        });
        if (hit) out.push_back(c);
    }
    return out;
}

}  // namespace homer
