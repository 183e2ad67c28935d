#include "homer/linear_model.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <string>

namespace homer {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double max_abs(std::span<const double> a) {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::abs(v));
    return m;
}

// log(1 + exp(-z)) without overflow.
double logistic_loss(double z) { return z > 0 ? std::log1p(std::exp(-z)) : -z + std::log1p(std::exp(z)); }

struct Pair {
    std::vector<double> s;
    std::vector<double> y;
    double rho;
};

// Rows rewritten over a dense id range covering only the features they use.
struct CompactProblem {
    std::vector<FeatureId> global_ids;
    std::vector<std::vector<Feature>> storage;
    BinaryProblem problem;
};

CompactProblem compact(const BinaryProblem& in) {
    CompactProblem out;
    for (const auto& row : in.rows)
        for (const auto& f : row) out.global_ids.push_back(f.id);
    std::sort(out.global_ids.begin(), out.global_ids.end());
    out.global_ids.erase(std::unique(out.global_ids.begin(), out.global_ids.end()), out.global_ids.end());

    out.storage.resize(in.rows.size());
    for (std::size_t i = 0; i < in.rows.size(); ++i) {
        auto& dst = out.storage[i];
        dst.reserve(in.rows[i].size());
        for (const auto& f : in.rows[i]) {
            auto pos = std::lower_bound(out.global_ids.begin(), out.global_ids.end(), f.id);
            dst.push_back({static_cast<FeatureId>(pos - out.global_ids.begin()), f.value});
        }
    }
    out.problem.targets = in.targets;
    out.problem.rows.reserve(out.storage.size());
    for (const auto& r : out.storage) out.problem.rows.emplace_back(r);
    return out;
}

}  // namespace

std::string_view to_string(LossKind loss) {
    switch (loss) {
        case LossKind::logistic: return "logistic";
        case LossKind::squared_hinge: return "hinge";
    }
    return "unknown";
}

LossKind parse_loss(std::string_view name) {
    if (name == "logistic") return LossKind::logistic;
    if (name == "hinge" || name == "squared-hinge") return LossKind::squared_hinge;
    throw std::invalid_argument("unknown loss '" + std::string(name) + "'");
}

double LinearModel::margin(std::span<const Feature> x) const {
    switch (kind) {
        case ModelKind::untrained: throw std::logic_error("LinearModel: scoring an untrained model");
        case ModelKind::constant_negative: return -std::numeric_limits<double>::infinity();
        case ModelKind::constant_positive: return std::numeric_limits<double>::infinity();
        case ModelKind::trained: break;
    }
    double m = bias;
    auto w = weights.begin();
    for (const auto& f : x) {
        while (w != weights.end() && w->id < f.id) ++w;
        if (w == weights.end()) break;
        if (w->id == f.id) m += w->value * f.value;
    }
    return m;
}

double LinearModel::score(std::span<const Feature> x) const {
    switch (kind) {
        case ModelKind::untrained: throw std::logic_error("LinearModel: scoring an untrained model");
        case ModelKind::constant_negative: return 0.0;
        case ModelKind::constant_positive: return 1.0;
        case ModelKind::trained: break;
    }
    return sigmoid(margin(x));
}

double objective(const BinaryProblem& problem, std::span<const double> params, LossKind loss, double lambda,
                 std::span<double> grad) {
    if (params.empty()) throw std::invalid_argument("objective: empty parameter vector");
    const std::size_t dim = params.size() - 1;
    const double bias = params[dim];
    const bool want_grad = !grad.empty();
    if (want_grad) {
        if (grad.size() != params.size()) throw std::invalid_argument("objective: gradient size mismatch");
        std::fill(grad.begin(), grad.end(), 0.0);
    }

    const std::size_t n = problem.size();
    const double inv_n = n ? 1.0 / static_cast<double>(n) : 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& row = problem.rows[i];
        const double y = problem.targets[i];
        double m = bias;
        for (const auto& f : row) m += params[f.id] * f.value;
        const double z = y * m;

        double dz = 0.0;
        if (loss == LossKind::logistic) {
            total += logistic_loss(z);
            dz = -sigmoid(-z);
        } else {
            const double t = 1.0 - z;
            if (t > 0) {
                total += t * t;
                dz = -2.0 * t;
            }
        }
        if (want_grad && dz != 0.0) {
            const double c = dz * y * inv_n;
            for (const auto& f : row) grad[f.id] += c * f.value;
            grad[dim] += c;
        }
    }

    double reg = 0.0;
    for (std::size_t j = 0; j < dim; ++j) {
        reg += params[j] * params[j];
        if (want_grad) grad[j] += lambda * params[j];
    }
    return total * inv_n + 0.5 * lambda * reg;
}

LinearModel train_linear(const BinaryProblem& problem, const LearnerParams& params, TrainTrace* trace) {
    if (problem.size() == 0) throw std::invalid_argument("train_linear: no training instances");
    if (problem.targets.size() != problem.rows.size())
        throw std::invalid_argument("train_linear: rows and targets differ in length");

    const auto positives = std::count(problem.targets.begin(), problem.targets.end(), std::int8_t{1});
    LinearModel model;
    if (positives == 0) {
        model.kind = ModelKind::constant_negative;
        return model;
    }
    if (static_cast<std::size_t>(positives) == problem.size()) {
        model.kind = ModelKind::constant_positive;
        return model;
    }

    const CompactProblem cp = compact(problem);
    const std::size_t dim = cp.global_ids.size() + 1;

    std::vector<double> x(dim, 0.0), g(dim), xn(dim), gn(dim), d(dim);
    double f = objective(cp.problem, x, params.loss, params.lambda, g);
    if (trace) trace->losses.assign(1, f);

    std::deque<Pair> history;
    std::vector<double> alpha(params.memory);

    for (std::size_t epoch = 0; epoch < params.epochs; ++epoch) {
        if (max_abs(g) < params.gradient_tolerance) break;

        // Two-loop recursion: d = -H g.
        for (std::size_t j = 0; j < dim; ++j) d[j] = -g[j];
        for (std::size_t h = history.size(); h-- > 0;) {
            alpha[h] = history[h].rho * dot(history[h].s, d);
            for (std::size_t j = 0; j < dim; ++j) d[j] -= alpha[h] * history[h].y[j];
        }
        if (!history.empty()) {
            const auto& last = history.back();
            const double gamma = dot(last.s, last.y) / dot(last.y, last.y);
            for (double& v : d) v *= gamma;
        }
        for (std::size_t h = 0; h < history.size(); ++h) {
            const double beta = history[h].rho * dot(history[h].y, d);
            for (std::size_t j = 0; j < dim; ++j) d[j] += (alpha[h] - beta) * history[h].s[j];
        }

        double gd = dot(g, d);
        if (!(gd < 0.0)) {
            history.clear();
            for (std::size_t j = 0; j < dim; ++j) d[j] = -g[j];
            gd = -dot(g, g);
        }

        double step = history.empty() ? std::min(1.0, 1.0 / std::sqrt(dot(g, g))) : 1.0;
        bool accepted = false;
        double fn = f;
        for (int trial = 0; trial < 40; ++trial) {
            for (std::size_t j = 0; j < dim; ++j) xn[j] = x[j] + step * d[j];
            fn = objective(cp.problem, xn, params.loss, params.lambda, gn);
            if (fn <= f + 1e-4 * step * gd) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;

        Pair p;
        p.s.resize(dim);
        p.y.resize(dim);
        for (std::size_t j = 0; j < dim; ++j) {
            p.s[j] = xn[j] - x[j];
            p.y[j] = gn[j] - g[j];
        }
        const double sy = dot(p.s, p.y);
        if (sy > 1e-12) {
            p.rho = 1.0 / sy;
            history.push_back(std::move(p));
            if (history.size() > params.memory) history.pop_front();
        }
        x.swap(xn);
        g.swap(gn);
        f = fn;
        if (trace) trace->losses.push_back(f);
    }

    model.kind = ModelKind::trained;
    model.bias = x[dim - 1];
    for (std::size_t j = 0; j + 1 < dim; ++j)
        if (x[j] != 0.0) model.weights.push_back({cp.global_ids[j], x[j]});
    return model;
}

LinearModel train_linear(std::span<const std::span<const Feature>> positives,
                         std::span<const std::span<const Feature>> negatives, const LearnerParams& params) {
    BinaryProblem problem;
    for (auto x : positives) problem.add(x, true);
    for (auto x : negatives) problem.add(x, false);
    return train_linear(problem, params);
}

}  // namespace homer
