#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "homer/dataset.hpp"

namespace homer {

enum class LossKind { logistic, squared_hinge };

std::string_view to_string(LossKind loss);
LossKind parse_loss(std::string_view name);

struct LearnerParams {
    /// L2 penalty on the weights (bias is not penalized); the loss is averaged over examples.
    double lambda = 1e-4;
    std::size_t epochs = 100;
    LossKind loss = LossKind::logistic;
    std::uint64_t seed = 0;
    /// L-BFGS history length.
    std::size_t memory = 10;
    /// Stop early once the gradient's infinity norm drops below this.
    double gradient_tolerance = 1e-10;

    friend bool operator==(const LearnerParams&, const LearnerParams&) = default;
};

enum class ModelKind : std::uint8_t { untrained, trained, constant_negative, constant_positive };

/// One binary linear scorer. Weights are sparse (sorted by feature id, no zeros).
struct LinearModel {
    ModelKind kind = ModelKind::untrained;
    std::vector<Feature> weights;
    double bias = 0.0;

    double margin(std::span<const Feature> x) const;
    /// Logistic sigmoid of the margin; 0 and 1 for constant models.
    double score(std::span<const Feature> x) const;
    bool decide(std::span<const Feature> x) const { return score(x) >= 0.5; }

    friend bool operator==(const LinearModel&, const LinearModel&) = default;
};

/// One model per meta-label (or label, at leaves), aligned by index.
struct NodeClassifier {
    std::vector<LinearModel> models;

    friend bool operator==(const NodeClassifier&, const NodeClassifier&) = default;
};

/// Rows with +1/-1 targets in a fixed order.
struct BinaryProblem {
    std::vector<std::span<const Feature>> rows;
    std::vector<std::int8_t> targets;

    void add(std::span<const Feature> x, bool positive) {
        rows.push_back(x);
        targets.push_back(positive ? 1 : -1);
    }
    std::size_t size() const noexcept { return rows.size(); }
};

/// Regularized empirical risk over `params` = (w_0..w_{F-1}, bias), where
/// feature ids index `params` directly. Writes the gradient when `grad` is non-empty.
double objective(const BinaryProblem& problem, std::span<const double> params, LossKind loss, double lambda,
                 std::span<double> grad = {});

struct TrainTrace {
    /// Objective after each accepted optimizer step, starting with the initial point.
    std::vector<double> losses;
};

/// Fits one binary model. No positives gives a constant-negative model, no
/// negatives a constant-positive one. Throws std::invalid_argument when empty.
LinearModel train_linear(const BinaryProblem& problem, const LearnerParams& params, TrainTrace* trace = nullptr);

LinearModel train_linear(std::span<const std::span<const Feature>> positives,
                         std::span<const std::span<const Feature>> negatives, const LearnerParams& params);

inline double sigmoid(double z) {
    if (z >= 0) {
        const double e = std::exp(-z);
        return 1.0 / (1.0 + e);
    }
    const double e = std::exp(z);
    return e / (1.0 + e);
}

}  // namespace homer
