#include "homer/learner.hpp"

#include <stdexcept>
#include <string>

#include "homer/parallel.hpp"

namespace homer {

namespace {

struct NodeJob {
    NodeId node;
    std::vector<std::size_t> rows;
};

// Target matrix for one node: targets[m][r] says whether row r is positive
// for meta-label m.
std::vector<std::vector<char>> node_targets(const LabelTree& tree, NodeId id, const MultiLabelDataset& train,
                                            const std::vector<std::size_t>& rows) {
    const auto& n = tree.node(id);
    std::vector<std::vector<char>> targets(n.num_meta_labels(), std::vector<char>(rows.size(), 0));
    if (n.is_leaf()) {
        std::vector<int> slot(train.vocab.size(), -1);
        for (std::size_t i = 0; i < n.labels.size(); ++i) slot[n.labels[i]] = static_cast<int>(i);
        for (std::size_t r = 0; r < rows.size(); ++r)
            for (auto l : train.instances[rows[r]].labels)
                if (slot[l] >= 0) targets[slot[l]][r] = 1;
    } else {
        const auto owner = child_owner_map(tree, id, train.vocab.size());
        for (std::size_t r = 0; r < rows.size(); ++r)
            for (auto l : train.instances[rows[r]].labels)
                if (owner[l] >= 0) targets[owner[l]][r] = 1;
    }
    return targets;
}

void train_node(LabelTree& tree, NodeId id, const MultiLabelDataset& train, const std::vector<std::size_t>& rows,
                const LearnerParams& params, std::size_t threads) {
    auto& node = tree.node(id);
    node.train_size = rows.size();
    NodeClassifier classifier;
    classifier.models.resize(node.num_meta_labels());

    if (rows.empty()) {
        for (auto& m : classifier.models) m.kind = ModelKind::constant_negative;
        node.classifier = std::move(classifier);
        return;
    }

    const auto targets = node_targets(tree, id, train, rows);
    parallel_for(classifier.models.size(), threads, [&](std::size_t m) {
        BinaryProblem problem;
        problem.rows.reserve(rows.size());
        problem.targets.reserve(rows.size());
        for (std::size_t r = 0; r < rows.size(); ++r)
            problem.add(train.instances[rows[r]].features, targets[m][r] != 0);
        classifier.models[m] = train_linear(problem, params);
    });
    node.classifier = std::move(classifier);
}

HomerModel make_shell(const MultiLabelDataset& train, LabelTree tree, const LearnerParams& params) {
    if (train.empty()) throw std::invalid_argument("training set is empty");
    if (train.vocab.empty()) throw std::invalid_argument("training set has no labels");
    HomerModel model;
    model.tree = std::move(tree);
    model.tree.validate(train.vocab.size());
    model.vocab = train.vocab;
    model.num_features = train.num_features;
    model.learner = params;
    model.label_frequencies = label_frequencies(train);
    return model;
}

}  // namespace

TreeTelemetry HomerModel::telemetry() const {
    TreeTelemetry t;
    t.total_nodes = tree.size();
    t.depth = tree.depth();
    for (const auto& n : tree.nodes) {
        if (n.is_leaf()) {
            ++t.leaf_nodes;
            t.sum_dn_leaf += n.train_size;
        } else {
            ++t.nonleaf_nodes;
            t.sum_dn_nonleaf += n.train_size;
        }
    }
    if (t.leaf_nodes) t.mean_dn_leaf = static_cast<double>(t.sum_dn_leaf) / static_cast<double>(t.leaf_nodes);
    if (t.nonleaf_nodes)
        t.mean_dn_nonleaf = static_cast<double>(t.sum_dn_nonleaf) / static_cast<double>(t.nonleaf_nodes);
    if (t.total_nodes)
        t.mean_dn = static_cast<double>(t.sum_dn_leaf + t.sum_dn_nonleaf) / static_cast<double>(t.total_nodes);
    return t;
}

void HomerModel::check_trained() const {
    for (const auto& n : tree.nodes) {
        if (!n.classifier) throw std::logic_error("model: node " + std::to_string(n.id) + " is untrained");
        if (n.classifier->models.size() != n.num_meta_labels())
            throw std::logic_error("model: node " + std::to_string(n.id) + " has a misaligned classifier");
        for (const auto& m : n.classifier->models)
            if (m.kind == ModelKind::untrained)
                throw std::logic_error("model: node " + std::to_string(n.id) + " has an untrained model");
    }
}

HomerModel train_flat_br(const MultiLabelDataset& train, const LearnerParams& params, const TrainOptions& options) {
    HomerModel model = make_shell(train, single_node_tree(train.vocab.size()), params);
    model.flat_br = true;
    std::vector<std::size_t> all(train.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    train_node(model.tree, model.tree.root, train, all, params, options.threads);
    return model;
}

HomerModel train_homer(const MultiLabelDataset& train, LabelTree tree, const LearnerParams& params,
                       const TrainOptions& options) {
    HomerModel model = make_shell(train, std::move(tree), params);

    if (options.cache_node_data) {
        std::vector<NodeJob> jobs;
        for (const auto& n : model.tree.nodes) jobs.push_back({n.id, filter_indices(train, n.labels)});
        // Nodes are independent; the per-node fits run sequentially inside.
        parallel_for(jobs.size(), options.threads, [&](std::size_t j) {
            train_node(model.tree, jobs[j].node, train, jobs[j].rows, params, 1);
        });
    } else {
        for (const auto& n : model.tree.nodes) {
            const auto rows = filter_indices(train, n.labels);
            train_node(model.tree, n.id, train, rows, params, options.threads);
        }
    }
    return model;
}

}  // namespace homer
