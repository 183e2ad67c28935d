#include "homer/inference.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "homer/parallel.hpp"

namespace homer {

namespace {

// Drops feature ids the model has never seen, counting them.
std::span<const Feature> known_features(const HomerModel& model, std::span<const Feature> x, std::size_t& unknown) {
    auto end = std::lower_bound(x.begin(), x.end(), model.num_features,
                                [](const Feature& f, std::size_t n) { return f.id < n; });
    unknown = static_cast<std::size_t>(x.end() - end);
    return x.first(static_cast<std::size_t>(end - x.begin()));
}

const NodeClassifier& classifier_of(const TreeNode& node) {
    if (!node.classifier) throw std::logic_error("predict: node " + std::to_string(node.id) + " is untrained");
    return *node.classifier;
}

void descend_bipartition(const HomerModel& model, NodeId id, std::span<const Feature> x, Prediction& out) {
    const auto& node = model.tree.node(id);
    const auto& clf = classifier_of(node);
    ++out.nodes_visited;
    if (node.is_leaf()) {
        ++out.paths_taken;
        for (std::size_t i = 0; i < node.labels.size(); ++i)
            if (clf.models[i].decide(x)) out.labels.push_back(node.labels[i]);
        return;
    }
    for (std::size_t c = 0; c < node.children.size(); ++c)
        if (clf.models[c].decide(x)) descend_bipartition(model, node.children[c], x, out);
}

void descend_ranking(const HomerModel& model, NodeId id, double incoming, std::span<const Feature> x, bool prune,
                     std::vector<double>& scores, Prediction& out) {
    const auto& node = model.tree.node(id);
    const auto& clf = classifier_of(node);
    ++out.nodes_visited;
    if (node.is_leaf()) {
        ++out.paths_taken;
        for (std::size_t i = 0; i < node.labels.size(); ++i) scores[node.labels[i]] = incoming * clf.models[i].score(x);
        return;
    }
    const double threshold = incoming / static_cast<double>(node.children.size());
    for (std::size_t c = 0; c < node.children.size(); ++c) {
        const double propagated = incoming * clf.models[c].score(x);
        if (prune && propagated <= threshold) continue;
        descend_ranking(model, node.children[c], propagated, x, prune, scores, out);
    }
}

}  // namespace

Prediction predict_bipartition(const HomerModel& model, std::span<const Feature> x) {
    Prediction out;
    const auto known = known_features(model, x, out.unknown_features);
    descend_bipartition(model, model.tree.root, known, out);
    std::sort(out.labels.begin(), out.labels.end());
    return out;
}

Prediction predict_ranking(const HomerModel& model, std::span<const Feature> x, bool prune) {
    Prediction out;
    const auto known = known_features(model, x, out.unknown_features);
    std::vector<double> scores(model.vocab.size(), 0.0);
    descend_ranking(model, model.tree.root, 1.0, known, prune, scores, out);
    out.ranking.reserve(scores.size());
    for (std::size_t l = 0; l < scores.size(); ++l) out.ranking.emplace_back(static_cast<LabelId>(l), scores[l]);
    std::stable_sort(out.ranking.begin(), out.ranking.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    return out;
}

std::vector<Prediction> predict_all(const HomerModel& model, const MultiLabelDataset& test, PredictMode mode,
                                    bool prune, std::size_t threads) {
    std::vector<Prediction> out(test.size());
    parallel_for(test.size(), threads, [&](std::size_t i) {
        const auto& x = test.instances[i].features;
        out[i] = mode == PredictMode::bipartition ? predict_bipartition(model, x) : predict_ranking(model, x, prune);
    });
    return out;
}

TraversalStats traversal_stats(std::span<const Prediction> predictions, std::size_t total_nodes) {
    TraversalStats st;
    st.instances = predictions.size();
    st.total_nodes = total_nodes;
    double visited = 0.0, paths = 0.0;
    for (const auto& p : predictions) {
        visited += static_cast<double>(p.nodes_visited);
        paths += static_cast<double>(p.paths_taken);
        st.max_nodes_visited = std::max(st.max_nodes_visited, p.nodes_visited);
        st.max_paths_taken = std::max(st.max_paths_taken, p.paths_taken);
        st.unknown_features += p.unknown_features;
    }
    if (!predictions.empty()) {
        st.mean_nodes_visited = visited / static_cast<double>(predictions.size());
        st.mean_paths_taken = paths / static_cast<double>(predictions.size());
    }
    return st;
}

TraversalStats traversal_stats(const HomerModel& model, const MultiLabelDataset& test, std::size_t threads) {
    const auto preds = predict_all(model, test, PredictMode::bipartition, false, threads);
    return traversal_stats(preds, model.tree.size());
}

}  // namespace homer
