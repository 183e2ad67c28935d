#include <random>

#include "doctest.h"
#include "homer/hierarchy.hpp"
#include "homer/synthetic.hpp"
#include "test_support.hpp"

using namespace homer;

namespace {

// Nine labels in three instance-disjoint groups of three.
MultiLabelDataset grouped_nine() {
    SyntheticSpec spec;
    spec.num_labels = 9;
    spec.group_size = 3;
    spec.train_instances = 300;
    spec.test_instances = 0;
    spec.extra_label_prob = 0.6;
    spec.seed = 4;
    return generate_corpus(spec).train;
}

}  // namespace

TEST_CASE("few labels stay in a single leaf") {
    std::mt19937_64 rng(1);
    const auto ds = homer::testing::random_dataset(rng, 30, 5, 10);
    const auto tree = build_hierarchy(ds, {3, 10, 3, 1});
    REQUIRE(tree.size() == 1);
    CHECK(tree.node(0).is_leaf());
    CHECK(tree.node(0).labels == std::vector<LabelId>{0, 1, 2, 3, 4});
    CHECK(tree.node(0).num_meta_labels() == 5);
}

TEST_CASE("nine labels, k = 3, nmax = 3") {
    const auto ds = grouped_nine();
    const auto tree = build_hierarchy(ds, {3, 3, 3, 7});
    tree.validate(9);
    REQUIRE(tree.size() == 4);
    const std::size_t k = 3, depth = tree.depth();
    CHECK(depth == 1);
    std::size_t expected = 1, power = 1;
    for (std::size_t d = 1; d <= depth; ++d) expected += (power *= k);
    CHECK(tree.size() == expected);
    for (auto leaf : tree.leaves()) CHECK(tree.node(leaf).labels.size() == 3);
    // Groups never share instances, so each leaf is exactly one group.
    for (auto leaf : tree.leaves()) {
        const auto& labels = tree.node(leaf).labels;
        CHECK(labels[0] / 3 == labels[2] / 3);
    }
}

TEST_CASE("tree invariants on random builds") {
    std::mt19937_64 rng(2);
    for (int rep = 0; rep < 25; ++rep) {
        const std::size_t labels = 2 + rep * 3;
        const auto ds = homer::testing::random_dataset(rng, 120, labels, 30);
        const HierarchyParams params{2 + static_cast<std::size_t>(rep % 4), 1 + static_cast<std::size_t>(rep % 6), 3,
                                     static_cast<std::uint64_t>(rep),
                                     rep % 2 ? ClustererKind::kmeans : ClustererKind::balanced_kmeans};
        const auto tree = build_hierarchy(ds, params);
        CHECK_NOTHROW(tree.validate(labels));
        for (const auto& n : tree.nodes) {
            if (n.parent == kNoNode) continue;
            CHECK(n.depth == tree.node(n.parent).depth + 1);
            CHECK(node_training_set(n, ds).size() <= node_training_set(tree.node(n.parent), ds).size());
            CHECK(tree.node(n.parent).labels.size() > params.nmax);
        }
        // Root D_n is every labeled instance.
        CHECK(node_training_set(tree.node(tree.root), ds).size() == ds.size());
    }
}

TEST_CASE("small nodes clamp k") {
    std::mt19937_64 rng(3);
    const auto ds = homer::testing::random_dataset(rng, 60, 5, 10);
    HierarchyStats stats;
    const auto tree = build_hierarchy(ds, {3, 1, 3, 0}, &stats);
    tree.validate(5);
    CHECK(stats.clamped_splits > 0);
    for (auto leaf : tree.leaves()) CHECK(tree.node(leaf).labels.size() == 1);
    CHECK(tree.leaves().size() == 5);
}

TEST_CASE("labels without training occurrences still land in one leaf") {
    auto ds = homer::testing::parse("a 0:1\nb 1:1\na,b 2:1\nc 0:1\n");
    ds.vocab.intern("ghost1");
    ds.vocab.intern("ghost2");
    ds.vocab.intern("ghost3");
    const auto tree = build_hierarchy(ds, {2, 1, 3, 5});
    CHECK_NOTHROW(tree.validate(6));

    // A node holding only unseen labels has an empty D_n.
    bool found_empty = false;
    for (auto leaf : tree.leaves()) {
        const auto& labels = tree.node(leaf).labels;
        if (std::all_of(labels.begin(), labels.end(), [](LabelId l) { return l >= 3; }))
            found_empty = found_empty || node_training_set(tree.node(leaf), ds).empty();
    }
    CHECK(found_empty);
}

TEST_CASE("deterministic builds") {
    std::mt19937_64 rng(4);
    const auto ds = homer::testing::random_dataset(rng, 200, 40, 30);
    CHECK(build_hierarchy(ds, {3, 4, 3, 9}) == build_hierarchy(ds, {3, 4, 3, 9}));
}

TEST_CASE("invalid hierarchy parameters") {
    std::mt19937_64 rng(5);
    const auto ds = homer::testing::random_dataset(rng, 20, 6, 10);
    CHECK_THROWS_AS(build_hierarchy(ds, {1, 3, 3, 0}), std::invalid_argument);
    CHECK_THROWS_AS(build_hierarchy(ds, {3, 0, 3, 0}), std::invalid_argument);
}

TEST_CASE("meta-label targets") {
    // Root with children {a,x}, {b,y}, {z,w}: ids a=0 b=1 x=2 y=3 z=4 w=5.
    LabelTree tree;
    tree.params.nmax = 2;
    TreeNode root;
    root.labels = {0, 1, 2, 3, 4, 5};
    root.children = {1, 2, 3};
    tree.nodes.push_back(root);
    const std::vector<std::vector<LabelId>> groups{{0, 2}, {1, 3}, {4, 5}};
    for (NodeId c = 0; c < 3; ++c) {
        TreeNode child;
        child.id = c + 1;
        child.parent = 0;
        child.depth = 1;
        child.labels = groups[c];
        tree.nodes.push_back(child);
    }
    tree.validate(6);

    SparseInstance inst;
    inst.labels = {0, 1};
    CHECK(meta_label_targets(tree, 0, inst) == std::vector<std::size_t>{0, 1});

    SparseInstance outside;
    outside.labels = {4};
    CHECK(meta_label_targets(tree, 1, outside).empty());

    // Leaf {a, x} with instance {x, q}: target is x only.
    SparseInstance leaf_inst;
    leaf_inst.labels = {2, 5};
    CHECK(meta_label_targets(tree, 1, leaf_inst) == std::vector<std::size_t>{1});

    const auto owner = child_owner_map(tree, 0, 6);
    CHECK(owner == std::vector<int>{0, 1, 0, 1, 2, 2});
}

TEST_CASE("meta-label positives are the union of child positives") {
    std::mt19937_64 rng(6);
    const auto ds = homer::testing::random_dataset(rng, 150, 20, 20);
    const auto tree = build_hierarchy(ds, {3, 3, 3, 2});
    for (const auto& n : tree.nodes) {
        if (n.is_leaf()) continue;
        const auto dn = filter_indices(ds, n.labels);
        for (std::size_t c = 0; c < n.children.size(); ++c) {
            const auto child_rows = filter_indices(ds, tree.node(n.children[c]).labels);
            std::vector<std::size_t> positive;
            for (auto r : dn) {
                const auto t = meta_label_targets(tree, n.id, ds.instances[r]);
                if (std::find(t.begin(), t.end(), c) != t.end()) positive.push_back(r);
            }
            CHECK(positive == child_rows);
        }
    }
}

TEST_CASE("validate catches broken trees") {
    auto tree = single_node_tree(3);
    CHECK_NOTHROW(tree.validate(3));
    CHECK_THROWS_AS(tree.validate(4), std::logic_error);
    tree.params.nmax = 2;
    CHECK_THROWS_AS(tree.validate(3), std::logic_error);
}
