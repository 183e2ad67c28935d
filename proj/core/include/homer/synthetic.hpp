#pragma once

#include <cstddef>
#include <cstdint>

#include "homer/dataset.hpp"

namespace homer {

/// Generator for labeled sparse corpora with controllable label frequency
/// skew and co-occurrence structure.
///
/// Labels are arranged in consecutive groups of `group_size`. Each instance
/// draws a primary label (Zipf-weighted by label id when `zipf_exponent` > 0,
/// uniform otherwise) and then, with probability `extra_label_prob` per draw
/// and at most `max_labels` in total, more labels from the same group. Every
/// label owns `signature_features` features, each emitted with probability
/// `signature_prob` when the label is present; every group owns
/// `group_features` features emitted likewise. `noise_features` uniformly
/// drawn features from the whole feature range are added to each instance.
struct SyntheticSpec {
    std::size_t train_instances = 1000;
    std::size_t test_instances = 500;
    std::size_t num_labels = 27;
    std::size_t group_size = 3;
    double zipf_exponent = 0.0;
    double extra_label_prob = 0.3;
    std::size_t max_labels = 3;
    std::size_t signature_features = 4;
    std::size_t group_features = 4;
    double signature_prob = 0.7;
    std::size_t noise_features = 5;
    /// Extra features beyond the signature/group blocks, drawn only as noise.
    std::size_t noise_pool = 200;
    std::uint64_t seed = 1;
};

struct SyntheticCorpus {
    MultiLabelDataset train;
    MultiLabelDataset test;
};

/// Both splits share one vocabulary with names "L0", "L1", ... in id order.
/// Every generated instance carries at least one label.
SyntheticCorpus generate_corpus(const SyntheticSpec& spec);

}  // namespace homer
