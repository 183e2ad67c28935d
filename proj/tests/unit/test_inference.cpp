#include <cmath>
#include <random>

#include "doctest.h"
#include "homer/inference.hpp"
#include "test_support.hpp"

using namespace homer;
using homer::testing::bias_model;

namespace {

double logit(double p) { return std::log(p / (1.0 - p)); }

// Root with three children, each a leaf with two labels:
// child i holds labels 2i and 2i+1.
HomerModel three_leaf_model(std::vector<double> root_bias, std::vector<std::vector<double>> leaf_bias) {
    HomerModel model;
    model.vocab = LabelVocabulary(homer::testing::label_names(6));
    model.num_features = 4;
    model.tree.params.nmax = 2;
    TreeNode root;
    root.labels = {0, 1, 2, 3, 4, 5};
    root.children = {1, 2, 3};
    NodeClassifier rc;
    for (double b : root_bias) rc.models.push_back(bias_model(b));
    root.classifier = rc;
    model.tree.nodes.push_back(root);
    for (NodeId c = 0; c < 3; ++c) {
        TreeNode leaf;
        leaf.id = c + 1;
        leaf.parent = 0;
        leaf.depth = 1;
        leaf.labels = {2 * c, 2 * c + 1};
        NodeClassifier lc;
        for (double b : leaf_bias[c]) lc.models.push_back(bias_model(b));
        leaf.classifier = lc;
        model.tree.nodes.push_back(leaf);
    }
    model.tree.validate(6);
    return model;
}

}  // namespace

TEST_CASE("root rejecting every child gives an empty prediction") {
    const auto model = three_leaf_model({-10, -10, -10}, {{10, 10}, {10, 10}, {10, 10}});
    const auto p = predict_bipartition(model, std::vector<Feature>{});
    CHECK(p.labels.empty());
    CHECK(p.nodes_visited == 1);
    CHECK(p.paths_taken == 0);
}

TEST_CASE("two of three paths") {
    const auto model = three_leaf_model({10, -10, 10}, {{10, -10}, {10, 10}, {-10, 10}});
    const auto p = predict_bipartition(model, std::vector<Feature>{});
    CHECK(p.labels == std::vector<LabelId>{0, 5});
    CHECK(p.nodes_visited == 3);
    CHECK(p.paths_taken == 2);
}

TEST_CASE("all-positive classifiers visit every node") {
    const auto model = three_leaf_model({10, 10, 10}, {{10, 10}, {10, 10}, {10, 10}});
    const auto p = predict_bipartition(model, std::vector<Feature>{});
    CHECK(p.labels.size() == 6);
    CHECK(p.nodes_visited == model.tree.size());
}

TEST_CASE("ranking with certain classifiers") {
    auto model = three_leaf_model({0, 0, 0}, {{0, 0}, {0, 0}, {0, 0}});
    for (auto& n : model.tree.nodes)
        for (auto& m : n.classifier->models) m.kind = ModelKind::constant_positive;
    const auto p = predict_ranking(model, std::vector<Feature>{}, false);
    CHECK(p.nodes_visited == model.tree.size());
    REQUIRE(p.ranking.size() == 6);
    for (std::size_t i = 0; i < 6; ++i) {
        CHECK(p.ranking[i].first == i);
        CHECK(p.ranking[i].second == 1.0);
    }
}

TEST_CASE("pruning rule p_child <= p_parent / k") {
    // Root: children A (score 0.9) and B (score 0.5). A has three leaf
    // children scored 0.2, 0.5, 0.3; B is a leaf.
    HomerModel model;
    model.vocab = LabelVocabulary(homer::testing::label_names(4));
    model.num_features = 1;
    model.tree.params.nmax = 1;
    auto node = [&](NodeId id, NodeId parent, std::size_t depth, std::vector<LabelId> labels,
                    std::vector<NodeId> children, std::vector<double> scores) {
        TreeNode n;
        n.id = id;
        n.parent = parent;
        n.depth = depth;
        n.labels = std::move(labels);
        n.children = std::move(children);
        NodeClassifier c;
        for (double s : scores) c.models.push_back(bias_model(logit(s)));
        n.classifier = c;
        model.tree.nodes.push_back(n);
    };
    node(0, kNoNode, 0, {0, 1, 2, 3}, {1, 2}, {0.9, 0.5});
    node(1, 0, 1, {0, 1, 2}, {3, 4, 5}, {0.2, 0.5, 0.3});
    node(2, 0, 1, {3}, {}, {0.8});
    node(3, 1, 2, {0}, {}, {0.7});
    node(4, 1, 2, {1}, {}, {0.7});
    node(5, 1, 2, {2}, {}, {0.7});
    model.tree.validate(4);

    const std::vector<Feature> x;
    const auto full = predict_ranking(model, x, false);
    const auto pruned = predict_ranking(model, x, true);
    auto score_of = [](const Prediction& p, LabelId l) {
        for (const auto& [id, s] : p.ranking)
            if (id == l) return s;
        return -1.0;
    };
    // 0.9 * 0.2 = 0.18 <= 0.9 / 3: pruned. 0.9 * 0.3 = 0.27 <= 0.3: pruned.
    CHECK(score_of(pruned, 0) == 0.0);
    CHECK(score_of(pruned, 2) == 0.0);
    CHECK(score_of(pruned, 1) == score_of(full, 1));
    CHECK(score_of(full, 1) == doctest::Approx(0.9 * 0.5 * 0.7));
    // Root: B at 0.5 > 1/2? No: 0.5 <= 0.5 is pruned as well.
    CHECK(score_of(pruned, 3) == 0.0);
    CHECK(score_of(full, 3) == doctest::Approx(0.5 * 0.8));
    CHECK(pruned.nodes_visited == 3);
    CHECK(full.nodes_visited == 6);
}

TEST_CASE("ranking equals the path product on random trees") {
    std::mt19937_64 rng(5);
    for (int rep = 0; rep < 30; ++rep) {
        const auto model = homer::testing::random_tree_model(rng, 3 + rep % 10, 1 + rep % 3);
        const auto x = homer::testing::random_features(rng, 5);
        const auto full = predict_ranking(model, x, false);
        const auto pruned = predict_ranking(model, x, true);
        CHECK(full.nodes_visited == model.tree.size());
        for (const auto& [label, score] : full.ranking) {
            CHECK(score == doctest::Approx(homer::testing::path_product(model, label, x)).epsilon(1e-12));
            CHECK(score >= 0.0);
            CHECK(score <= 1.0);
        }
        for (const auto& [label, score] : pruned.ranking)
            CHECK(score == doctest::Approx(homer::testing::pruned_path_product(model, label, x)).epsilon(1e-12));
        for (std::size_t i = 1; i < full.ranking.size(); ++i) {
            const auto& a = full.ranking[i - 1];
            const auto& b = full.ranking[i];
            CHECK((a.second > b.second || (a.second == b.second && a.first < b.first)));
        }
    }
}

TEST_CASE("bipartition agrees with ranking on a single node") {
    std::mt19937_64 rng(6);
    for (int rep = 0; rep < 20; ++rep) {
        const auto model = homer::testing::random_tree_model(rng, 6, 6);
        const auto x = homer::testing::random_features(rng, 5);
        const auto bip = predict_bipartition(model, x);
        const auto rank = predict_ranking(model, x, false);
        for (const auto& [label, score] : rank.ranking) {
            const bool in = std::binary_search(bip.labels.begin(), bip.labels.end(), label);
            CHECK(in == (score >= 0.5));
        }
    }
}

TEST_CASE("bipartition path soundness") {
    std::mt19937_64 rng(7);
    for (int rep = 0; rep < 30; ++rep) {
        const auto model = homer::testing::random_tree_model(rng, 10, 2);
        const auto x = homer::testing::random_features(rng, 5);
        const auto p = predict_bipartition(model, x);
        CHECK(p.nodes_visited <= model.tree.size());
        for (auto label : p.labels) {
            // Every meta-label on the path is decided positive.
            NodeId id = model.tree.root;
            while (!model.tree.node(id).is_leaf()) {
                const auto& n = model.tree.node(id);
                for (std::size_t c = 0; c < n.children.size(); ++c) {
                    const auto& cl = model.tree.node(n.children[c]).labels;
                    if (!std::binary_search(cl.begin(), cl.end(), label)) continue;
                    CHECK(n.classifier->models[c].decide(x));
                    id = n.children[c];
                    break;
                }
            }
        }
    }
}

TEST_CASE("unknown feature ids are ignored and counted") {
    std::mt19937_64 rng(8);
    const auto model = homer::testing::random_tree_model(rng, 5, 2, 3);
    auto x = homer::testing::random_features(rng, 3);
    const auto base = predict_ranking(model, x, false);
    x.push_back({7, 4.0});
    x.push_back({9, 1.0});
    const auto with_unknown = predict_ranking(model, x, false);
    CHECK(with_unknown.unknown_features == 2);
    CHECK(with_unknown.ranking == base.ranking);
}

TEST_CASE("batch prediction and traversal stats") {
    std::mt19937_64 rng(9);
    const auto model = homer::testing::random_tree_model(rng, 12, 3);
    MultiLabelDataset test;
    test.vocab = model.vocab;
    test.num_features = 5;
    for (int i = 0; i < 40; ++i) test.instances.push_back({homer::testing::random_features(rng, 5), {}});
    const auto one = predict_all(model, test, PredictMode::bipartition, false, 1);
    const auto four = predict_all(model, test, PredictMode::bipartition, false, 4);
    double visited = 0.0;
    for (std::size_t i = 0; i < one.size(); ++i) {
        CHECK(one[i].labels == four[i].labels);
        visited += static_cast<double>(one[i].nodes_visited);
    }
    const auto st = traversal_stats(model, test, 2);
    CHECK(st.instances == 40);
    CHECK(st.total_nodes == model.tree.size());
    CHECK(st.mean_nodes_visited == doctest::Approx(visited / 40.0));
    CHECK(st.max_nodes_visited <= model.tree.size());
}

TEST_CASE("untrained nodes are rejected") {
    HomerModel model;
    model.vocab = LabelVocabulary({"a"});
    model.tree = single_node_tree(1);
    CHECK_THROWS_AS(predict_bipartition(model, std::vector<Feature>{}), std::logic_error);
}
