#include "homer/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace homer {

namespace {

SparseInstance draw_instance(const SyntheticSpec& spec, std::discrete_distribution<std::size_t>& primary_dist,
                             std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const std::size_t groups = (spec.num_labels + spec.group_size - 1) / spec.group_size;
    const std::size_t label_block = spec.num_labels * spec.signature_features;
    const std::size_t group_block = groups * spec.group_features;
    const std::size_t total_features = label_block + group_block + spec.noise_pool;

    const std::size_t primary = primary_dist(rng);
    const std::size_t group = primary / spec.group_size;
    const std::size_t group_begin = group * spec.group_size;
    const std::size_t group_end = std::min(spec.num_labels, group_begin + spec.group_size);

    std::vector<LabelId> labels{static_cast<LabelId>(primary)};
    std::uniform_int_distribution<std::size_t> in_group(group_begin, group_end - 1);
    while (labels.size() < spec.max_labels && unit(rng) < spec.extra_label_prob) {
        const auto l = static_cast<LabelId>(in_group(rng));
        if (std::find(labels.begin(), labels.end(), l) == labels.end()) labels.push_back(l);
    }
    std::sort(labels.begin(), labels.end());

    std::vector<FeatureId> ids;
    for (auto l : labels)
        for (std::size_t s = 0; s < spec.signature_features; ++s)
            if (unit(rng) < spec.signature_prob) ids.push_back(static_cast<FeatureId>(l * spec.signature_features + s));
    for (std::size_t s = 0; s < spec.group_features; ++s)
        if (unit(rng) < spec.signature_prob)
            ids.push_back(static_cast<FeatureId>(label_block + group * spec.group_features + s));
    if (total_features > 0) {
        std::uniform_int_distribution<std::size_t> any(0, total_features - 1);
        for (std::size_t s = 0; s < spec.noise_features; ++s) ids.push_back(static_cast<FeatureId>(any(rng)));
    }
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());

    SparseInstance inst;
    inst.labels = std::move(labels);
    for (auto id : ids) inst.features.push_back({id, 1.0});
    return inst;
}

}  // namespace

SyntheticCorpus generate_corpus(const SyntheticSpec& spec) {
    if (spec.num_labels == 0) throw std::invalid_argument("generate_corpus: num_labels must be > 0");
    if (spec.group_size == 0) throw std::invalid_argument("generate_corpus: group_size must be > 0");
    if (spec.max_labels == 0) throw std::invalid_argument("generate_corpus: max_labels must be > 0");

    std::vector<std::string> names;
    for (std::size_t l = 0; l < spec.num_labels; ++l) names.push_back("L" + std::to_string(l));
    LabelVocabulary vocab(std::move(names));

    std::vector<double> weights(spec.num_labels);
    for (std::size_t l = 0; l < spec.num_labels; ++l)
        weights[l] = spec.zipf_exponent > 0 ? 1.0 / std::pow(static_cast<double>(l + 1), spec.zipf_exponent) : 1.0;
    std::discrete_distribution<std::size_t> primary(weights.begin(), weights.end());

    const std::size_t groups = (spec.num_labels + spec.group_size - 1) / spec.group_size;
    const std::size_t num_features =
        spec.num_labels * spec.signature_features + groups * spec.group_features + spec.noise_pool;

    std::mt19937_64 rng(spec.seed);
    SyntheticCorpus out;
    for (auto* ds : {&out.train, &out.test}) {
        ds->vocab = vocab;
        ds->num_features = num_features;
    }
    for (std::size_t i = 0; i < spec.train_instances; ++i) out.train.instances.push_back(draw_instance(spec, primary, rng));
    for (std::size_t i = 0; i < spec.test_instances; ++i) out.test.instances.push_back(draw_instance(spec, primary, rng));
    return out;
}

}  // namespace homer
