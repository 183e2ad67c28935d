#include "homer/clustering.hpp"

#include <algorithm>
#include <cassert>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

namespace homer {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_inputs(std::span<const LabelVector> points, const ClusterParams& params) {
    if (params.k == 0) throw std::invalid_argument("clustering: k must be >= 1");
    if (params.iterations == 0) throw std::invalid_argument("clustering: iterations must be >= 1");
    if (points.size() < params.k)
        throw std::invalid_argument("clustering: fewer points (" + std::to_string(points.size()) +
                                    ") than clusters (" + std::to_string(params.k) + ")");
    for (const auto& p : points)
        if (p.dimension != points.front().dimension)
            throw std::invalid_argument("clustering: points have different dimensions");
    if (!params.initial_centers.empty()) {
        auto init = params.initial_centers;
        std::sort(init.begin(), init.end());
        if (init.size() != params.k || std::adjacent_find(init.begin(), init.end()) != init.end() ||
            init.back() >= points.size())
            throw std::invalid_argument("clustering: initial_centers must be k distinct point indices");
    }
}

Centroid to_centroid(const LabelVector& v) {
    Centroid c(v.dimension, 0.0);
    for (auto b : v.bits) c[b] = 1.0;
    return c;
}

// k distinct point indices drawn without replacement (partial Fisher-Yates).
std::vector<std::size_t> sample_distinct(std::size_t n, std::size_t k, std::mt19937_64& rng) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t i = 0; i < k; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, n - 1);
        std::swap(idx[i], idx[pick(rng)]);
    }
    idx.resize(k);
    return idx;
}

std::vector<std::size_t> initial_indices(std::size_t n, const ClusterParams& params) {
    if (!params.initial_centers.empty()) return params.initial_centers;
    std::mt19937_64 rng(params.seed);
    return sample_distinct(n, params.k, rng);
}

double sum_of(const Centroid& c) { return std::accumulate(c.begin(), c.end(), 0.0); }

// Centers become the coordinate means of their members.
void recompute_centers(std::span<const LabelVector> points, const std::vector<std::vector<std::size_t>>& members,
                       std::vector<Centroid>& centers) {
    for (std::size_t i = 0; i < centers.size(); ++i) {
        if (members[i].empty()) continue;
        std::fill(centers[i].begin(), centers[i].end(), 0.0);
        const double w = 1.0 / static_cast<double>(members[i].size());
        for (auto p : members[i])
            for (auto b : points[p].bits) centers[i][b] += w;
    }
}

Clustering to_clustering(std::span<const LabelVector> points, const std::vector<std::vector<std::size_t>>& members) {
    Clustering out;
    out.clusters.resize(members.size());
    for (std::size_t i = 0; i < members.size(); ++i) {
        for (auto p : members[i]) out.clusters[i].push_back(points[p].label_id);
        std::sort(out.clusters[i].begin(), out.clusters[i].end());
    }
    return out;
}

}  // namespace

std::string_view to_string(ClustererKind kind) {
    switch (kind) {
        case ClustererKind::balanced_kmeans: return "balanced-kmeans";
        case ClustererKind::kmeans: return "kmeans";
    }
    return "unknown";
}

ClustererKind parse_clusterer(std::string_view name) {
    if (name == "balanced-kmeans" || name == "balanced_kmeans") return ClustererKind::balanced_kmeans;
    if (name == "kmeans") return ClustererKind::kmeans;
    throw std::invalid_argument("unknown clusterer '" + std::string(name) + "'");
}

std::vector<LabelVector> make_label_vectors(const MultiLabelDataset& ds, std::span<const LabelId> labels) {
    std::vector<std::size_t> slot(ds.vocab.size(), labels.size());
    std::vector<LabelVector> out(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        slot.at(labels[i]) = i;
        out[i].label_id = labels[i];
        out[i].dimension = ds.size();
    }
    for (std::size_t d = 0; d < ds.size(); ++d)
        for (auto l : ds.instances[d].labels)
            if (slot[l] < labels.size()) out[slot[l]].bits.push_back(static_cast<std::uint32_t>(d));
    return out;
}

double distance(const LabelVector& v, const Centroid& c, double center_sum) {
    if (v.dimension != c.size())
        throw std::invalid_argument("distance: dimension mismatch (" + std::to_string(v.dimension) + " vs " +
                                    std::to_string(c.size()) + ")");
    // Binary v: sum(min) runs over the set bits only; sum(max) is the bits'
    // max(1, c_j) plus the center mass outside the bits.
    double inter = 0.0;
    double on_bits = 0.0;
    double max_on_bits = 0.0;
    for (auto b : v.bits) {
        if (b >= c.size()) throw std::invalid_argument("distance: bit index out of range");
        const double cj = c[b];
        inter += std::min(1.0, cj);
        max_on_bits += std::max(1.0, cj);
        on_bits += cj;
    }
    const double uni = max_on_bits + (center_sum - on_bits);
    if (uni <= 0.0) return 1.0;
    return std::clamp(1.0 - inter / uni, 0.0, 1.0);
}

double distance(const LabelVector& v, const Centroid& c) { return distance(v, c, sum_of(c)); }

Clustering balanced_kmeans(std::span<const LabelVector> points, const ClusterParams& params,
                           ClusteringStats* stats) {
    check_inputs(points, params);
    ClusteringStats local;
    ClusteringStats& st = stats ? *stats : local;

    const std::size_t n = points.size();
    const std::size_t k = params.k;
    const std::size_t cap = (n + k - 1) / k;

    std::vector<Centroid> centers;
    for (auto i : initial_indices(n, params)) centers.push_back(to_centroid(points[i]));

    struct Entry {
        double dist;
        std::size_t point;
    };
    std::vector<double> dist(n * k);
    std::vector<std::vector<Entry>> lists(k);
    std::vector<std::vector<std::size_t>> members(k);

    for (std::size_t pass = 0; pass < params.iterations; ++pass) {
        ++st.passes;
        std::vector<double> sums(k);
        for (std::size_t i = 0; i < k; ++i) sums[i] = sum_of(centers[i]);
        for (auto& l : lists) {
            l.clear();
            l.reserve(cap + 1);
        }

        for (std::size_t p = 0; p < n; ++p) {
            double* row = &dist[p * k];
            for (std::size_t i = 0; i < k; ++i) row[i] = distance(points[p], centers[i], sums[i]);
            st.distance_evaluations += k;

            std::size_t nu = p;
            std::size_t cascade = 0;
            while (true) {
                double* d = &dist[nu * k];
                std::size_t j = k;
                for (std::size_t i = 0; i < k; ++i)
                    if (d[i] != kInf && (j == k || d[i] < d[j])) j = i;

                if (j == k) {
                    // Evicted from every cluster: place into the smallest list,
                    // which has room because fewer than |S| points are placed.
                    j = 0;
                    for (std::size_t i = 1; i < k; ++i)
                        if (lists[i].size() < lists[j].size()) j = i;
                    assert(lists[j].size() < cap);
                    lists[j].push_back({kInf, nu});
                    ++st.forced_insertions;
                    ++st.insertions;
                    break;
                }

                auto& list = lists[j];
                auto pos = std::upper_bound(list.begin(), list.end(), d[j],
                                            [](double value, const Entry& e) { return value < e.dist; });
                list.insert(pos, Entry{d[j], nu});
                ++st.insertions;
                if (list.size() <= cap) break;

                nu = list.back().point;
                list.pop_back();
                dist[nu * k + j] = kInf;
                ++st.evictions;
                ++cascade;
            }
            st.max_cascade = std::max(st.max_cascade, cascade);
        }

        for (std::size_t i = 0; i < k; ++i) {
            members[i].clear();
            for (const auto& e : lists[i]) members[i].push_back(e.point);
        }
        recompute_centers(points, members, centers);
    }
    return to_clustering(points, members);
}

Clustering plain_kmeans(std::span<const LabelVector> points, const ClusterParams& params, ClusteringStats* stats) {
    check_inputs(points, params);
    ClusteringStats local;
    ClusteringStats& st = stats ? *stats : local;

    const std::size_t n = points.size();
    const std::size_t k = params.k;

    std::vector<Centroid> centers;
    for (auto i : initial_indices(n, params)) centers.push_back(to_centroid(points[i]));

    std::vector<std::size_t> assign(n, 0);
    std::vector<double> assigned_dist(n, 0.0);
    std::vector<std::vector<std::size_t>> members(k);

    for (std::size_t pass = 0; pass < params.iterations; ++pass) {
        ++st.passes;
        std::vector<double> sums(k);
        for (std::size_t i = 0; i < k; ++i) sums[i] = sum_of(centers[i]);
        for (auto& m : members) m.clear();

        for (std::size_t p = 0; p < n; ++p) {
            std::size_t best = 0;
            double best_d = kInf;
            for (std::size_t i = 0; i < k; ++i) {
                const double d = distance(points[p], centers[i], sums[i]);
                if (d < best_d) {
                    best_d = d;
                    best = i;
                }
            }
            st.distance_evaluations += k;
            assign[p] = best;
            assigned_dist[p] = best_d;
            members[best].push_back(p);
        }

        const auto previous = centers;
        recompute_centers(points, members, centers);

        std::vector<char> taken(n, 0);
        for (std::size_t i = 0; i < k; ++i) {
            if (!members[i].empty()) continue;
            const double prev_sum = sum_of(previous[i]);
            std::size_t far = n;
            double far_d = -1.0;
            for (std::size_t p = 0; p < n; ++p) {
                if (taken[p]) continue;
                const double d = distance(points[p], previous[i], prev_sum);
                if (d > far_d) {
                    far_d = d;
                    far = p;
                }
            }
            taken[far] = 1;
            centers[i] = to_centroid(points[far]);
            ++st.reseeds;
        }
    }

    // Hand every still-empty cluster the worst-fitting point of a cluster that
    // can spare one, so exactly k non-empty clusters come out.
    for (std::size_t i = 0; i < k; ++i) {
        if (!members[i].empty()) continue;
        std::size_t donor_point = n;
        double worst = -1.0;
        for (std::size_t p = 0; p < n; ++p) {
            if (members[assign[p]].size() < 2) continue;
            if (assigned_dist[p] > worst) {
                worst = assigned_dist[p];
                donor_point = p;
            }
        }
        auto& from = members[assign[donor_point]];
        from.erase(std::find(from.begin(), from.end(), donor_point));
        assign[donor_point] = i;
        members[i].push_back(donor_point);
    }
    return to_clustering(points, members);
}

Clustering cluster(ClustererKind kind, std::span<const LabelVector> points, const ClusterParams& params,
                   ClusteringStats* stats) {
    switch (kind) {
        case ClustererKind::balanced_kmeans: return balanced_kmeans(points, params, stats);
        case ClustererKind::kmeans: return plain_kmeans(points, params, stats);
    }
    throw std::invalid_argument("unknown clusterer");
}

}  // namespace homer
