#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "homer/dataset.hpp"

namespace homer {

/// Binary occurrence vector of one label over the training instances: bit d is
/// set iff the label annotates instance d. Stored as sorted instance indices.
struct LabelVector {
    LabelId label_id = 0;
    std::vector<std::uint32_t> bits;
    std::size_t dimension = 0;
};

/// Dense cluster center; components are means of binary coordinates.
using Centroid = std::vector<double>;

/// k disjoint lists of label ids covering the clustered points.
struct Clustering {
    std::vector<std::vector<LabelId>> clusters;

    std::size_t k() const noexcept { return clusters.size(); }
};

/// Counters gathered while clustering.
struct ClusteringStats {
    std::size_t passes = 0;
    std::size_t distance_evaluations = 0;
    std::size_t insertions = 0;
    std::size_t evictions = 0;
    /// Longest eviction cascade triggered by inserting a single point.
    std::size_t max_cascade = 0;
    /// Points evicted from every cluster and placed in the smallest one.
    std::size_t forced_insertions = 0;
    /// Plain k-means: centers re-seeded because their cluster went empty.
    std::size_t reseeds = 0;
};

enum class ClustererKind { balanced_kmeans, kmeans };

std::string_view to_string(ClustererKind kind);
ClustererKind parse_clusterer(std::string_view name);

struct ClusterParams {
    std::size_t k = 2;
    std::size_t iterations = 3;
    std::uint64_t seed = 0;
    /// Point indices used as the initial centers instead of a seeded sample.
    /// Must hold k distinct indices when non-empty.
    std::vector<std::size_t> initial_centers;
};

/// Label vectors for `labels` over the instances of `ds` (dimension |ds|).
std::vector<LabelVector> make_label_vectors(const MultiLabelDataset& ds, std::span<const LabelId> labels);

/// Generalized (Tanimoto) Jaccard distance 1 - sum(min)/sum(max) between a
/// binary point and a non-negative center. Two all-zero vectors are at 1.0.
/// Throws std::invalid_argument on a dimension mismatch.
double distance(const LabelVector& v, const Centroid& c);

/// Same as above with the center's coordinate sum precomputed.
double distance(const LabelVector& v, const Centroid& c, double center_sum);

/// Balanced k-means over label vectors. Every cluster ends with at most
/// ceil(|points|/k) members. Points are processed in order; each is inserted
/// into the sorted list of its nearest cluster and, when that list overflows,
/// the farthest member moves on to its next-nearest cluster (the cluster it
/// left is marked unreachable for it). A point unreachable from every cluster
/// goes to the currently smallest one. Centers are recomputed as coordinate
/// means after each of exactly `iterations` passes.
Clustering balanced_kmeans(std::span<const LabelVector> points, const ClusterParams& params,
                           ClusteringStats* stats = nullptr);

/// Lloyd iterations with the same distance, initialization and pass count.
/// A cluster left empty after a pass re-seeds its center at the point farthest
/// from its previous center. The returned clustering has no empty cluster.
Clustering plain_kmeans(std::span<const LabelVector> points, const ClusterParams& params,
                        ClusteringStats* stats = nullptr);

Clustering cluster(ClustererKind kind, std::span<const LabelVector> points, const ClusterParams& params,
                   ClusteringStats* stats = nullptr);

}  // namespace homer
