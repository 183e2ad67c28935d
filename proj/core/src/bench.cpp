#include "homer/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "homer/hierarchy.hpp"
#include "homer/inference.hpp"
#include "homer/learner.hpp"
#include "json.hpp"

namespace homer {

namespace {

using json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct SeedRun {
    EvaluationReport eval;
    double train_s = 0.0;
    double predict_s = 0.0;
    TreeTelemetry tree;
};

SeedRun run_one(const MultiLabelDataset& train, const MultiLabelDataset& test, const BenchConfig& config,
                bool homer, std::size_t k, std::size_t nmax, std::uint64_t seed) {
    LearnerParams lp = config.learner;
    lp.seed = seed;
    TrainOptions options{config.threads, false};

    SeedRun run;
    const auto t0 = Clock::now();
    HomerModel model;
    if (homer) {
        HierarchyParams hp{k, nmax, config.iterations, seed, config.clusterer};
        model = train_homer(train, build_hierarchy(train, hp), lp, options);
    } else {
        model = train_flat_br(train, lp, options);
    }
    run.train_s = seconds_since(t0);
    run.tree = model.telemetry();

    const auto t1 = Clock::now();
    const auto preds = predict_all(model, test, PredictMode::bipartition, false, config.threads);
    run.predict_s = seconds_since(t1);

    run.eval = evaluate(test, preds, model.label_frequencies, config.buckets);
    run.eval.train_seconds = run.train_s;
    run.eval.predict_seconds = run.predict_s;
    run.eval.traversal = traversal_stats(preds, model.tree.size());
    return run;
}

double mean(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

// Sample standard deviation; 0 for fewer than two values.
double stddev(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

std::optional<BucketScore> mean_bucket(const std::vector<std::optional<BucketScore>>& per_seed) {
    if (per_seed.empty() || !per_seed.front()) return std::nullopt;
    BucketScore out;
    out.labels = per_seed.front()->labels;
    for (const auto& b : per_seed) {
        out.micro_f += b->micro_f;
        out.macro_f += b->macro_f;
    }
    out.micro_f /= static_cast<double>(per_seed.size());
    out.macro_f /= static_cast<double>(per_seed.size());
    return out;
}

BenchRow aggregate(std::string method, std::size_t k, std::size_t nmax, const BenchConfig& config,
                   const std::vector<SeedRun>& runs) {
    BenchRow row;
    row.method = std::move(method);
    row.k = k;
    row.nmax = nmax;
    row.seeds = config.seeds;
    std::vector<double> micro, macro, train_s, predict_s, dn_nl, dn_l, visited;
    std::vector<std::optional<BucketScore>> rare, mid, frequent;
    for (const auto& r : runs) {
        micro.push_back(r.eval.micro_f);
        macro.push_back(r.eval.macro_f);
        train_s.push_back(r.train_s);
        predict_s.push_back(r.predict_s);
        dn_nl.push_back(r.tree.mean_dn_nonleaf);
        dn_l.push_back(r.tree.mean_dn_leaf);
        visited.push_back(r.eval.traversal.mean_nodes_visited);
        rare.push_back(r.eval.buckets.rare);
        mid.push_back(r.eval.buckets.mid);
        frequent.push_back(r.eval.buckets.frequent);
        row.nodes = r.tree.total_nodes;
    }
    row.micro_f = mean(micro);
    row.macro_f = mean(macro);
    row.micro_f_std = stddev(micro);
    row.macro_f_std = stddev(macro);
    row.train_s = mean(train_s);
    row.predict_s = mean(predict_s);
    row.mean_dn_nonleaf = mean(dn_nl);
    row.mean_dn_leaf = mean(dn_l);
    row.mean_nodes_visited = mean(visited);
    row.buckets = {mean_bucket(rare), mean_bucket(mid), mean_bucket(frequent)};
    return row;
}

BenchRow run_grid_point(const MultiLabelDataset& train, const MultiLabelDataset& test, const BenchConfig& config,
                        bool homer, std::size_t k, std::size_t nmax) {
    const std::string method = homer ? "HOMER-BR" : "BR";
    try {
        std::vector<SeedRun> runs;
        for (auto seed : config.seeds) runs.push_back(run_one(train, test, config, homer, k, nmax, seed));
        return aggregate(method, k, nmax, config, runs);
    } catch (const std::exception& e) {
        BenchRow row;
        row.method = method;
        row.k = k;
        row.nmax = nmax;
        row.seeds = config.seeds;
        row.error = e.what();
        return row;
    }
}

json bucket_json(const std::optional<BucketScore>& b) {
    if (!b) return nullptr;
    return {{"labels", b->labels}, {"micro_f", b->micro_f}, {"macro_f", b->macro_f}};
}

std::string fixed(double v, int digits) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(digits) << v;
    return os.str();
}

const BenchRow* br_row(const BenchReport& report) {
    for (const auto& r : report.rows)
        if (r.method == "BR" && r.error.empty()) return &r;
    return nullptr;
}

std::vector<const BenchRow*> homer_rows(const BenchReport& report, bool by_nmax_first) {
    std::vector<const BenchRow*> rows;
    for (const auto& r : report.rows)
        if (r.method != "BR") rows.push_back(&r);
    std::stable_sort(rows.begin(), rows.end(), [by_nmax_first](const BenchRow* a, const BenchRow* b) {
        return by_nmax_first ? std::tie(a->nmax, a->k) < std::tie(b->nmax, b->k)
                             : std::tie(a->k, a->nmax) < std::tie(b->k, b->nmax);
    });
    return rows;
}

}  // namespace

BenchReport run_benchmark(const MultiLabelDataset& train, const MultiLabelDataset& test, const BenchConfig& config) {
    if (config.seeds.empty()) throw std::invalid_argument("run_benchmark: at least one seed is required");
    BenchReport report;
    report.train_instances = train.size();
    report.test_instances = test.size();
    report.num_labels = train.vocab.size();
    report.config = config;

    if (config.include_br) report.rows.push_back(run_grid_point(train, test, config, false, 0, 0));
    if (config.include_homer)
        for (auto nmax : config.nmax_values)
            for (auto k : config.k_values) report.rows.push_back(run_grid_point(train, test, config, true, k, nmax));
    return report;
}

BenchReport run_benchmark(const BenchConfig& config) {
    auto train = load_dataset(config.train_path);
    LoadOptions test_options;
    test_options.vocab = train.vocab;
    auto test = load_dataset(config.test_path, test_options);
    // Labels first seen in the test split widen the vocabulary for both splits.
    train.vocab = test.vocab;
    return run_benchmark(train, test, config);
}

void write_report_json(std::ostream& out, const BenchReport& report) {
    json j;
    j["schema_version"] = kReportSchemaVersion;
    j["dataset"] = {{"train_instances", report.train_instances},
                    {"test_instances", report.test_instances},
                    {"labels", report.num_labels}};
    json rows = json::array();
    for (const auto& r : report.rows) {
        json row;
        row["method"] = r.method;
        json params = {{"seeds", r.seeds},
                       {"lambda", report.config.learner.lambda},
                       {"epochs", report.config.learner.epochs},
                       {"loss", std::string(to_string(report.config.learner.loss))}};
        if (r.method != "BR") {
            params["k"] = r.k;
            params["nmax"] = r.nmax;
            params["clusterer"] = std::string(to_string(report.config.clusterer));
            params["iterations"] = report.config.iterations;
        }
        row["params"] = std::move(params);
        if (!r.error.empty()) {
            row["error"] = r.error;
            rows.push_back(std::move(row));
            continue;
        }
        row["micro_f"] = r.micro_f;
        row["macro_f"] = r.macro_f;
        row["micro_f_std"] = r.micro_f_std;
        row["macro_f_std"] = r.macro_f_std;
        row["train_s"] = r.train_s;
        row["predict_s"] = r.predict_s;
        row["nodes"] = r.nodes;
        row["mean_Dn_nonleaf"] = r.mean_dn_nonleaf;
        row["mean_Dn_leaf"] = r.mean_dn_leaf;
        row["mean_nodes_visited"] = r.mean_nodes_visited;
        row["buckets"] = {{"rare", bucket_json(r.buckets.rare)},
                          {"mid", bucket_json(r.buckets.mid)},
                          {"frequent", bucket_json(r.buckets.frequent)}};
        rows.push_back(std::move(row));
    }
    j["rows"] = std::move(rows);
    out << j.dump(2) << '\n';
}

void write_report_markdown(std::ostream& out, const BenchReport& report) {
    out << "| Classifier | Clusterer | Micro-F | Macro-F | Training (s) | Test (s) | D_NL+D_L | nodes |\n";
    out << "|---|---|---|---|---|---|---|---|\n";
    for (const auto& r : report.rows) {
        const bool br = r.method == "BR";
        const std::string clusterer =
            br ? "" : std::string(to_string(report.config.clusterer)) + " (" + std::to_string(r.k) + ", " +
                          std::to_string(r.nmax) + ")";
        if (!r.error.empty()) {
            out << "| " << r.method << " | " << clusterer << " | error: " << r.error << " | | | | | |\n";
            continue;
        }
        out << "| " << r.method << " | " << clusterer << " | " << fixed(r.micro_f, 5) << " | " << fixed(r.macro_f, 5)
            << " | " << fixed(r.train_s, 2) << " | " << fixed(r.predict_s, 2) << " | ";
        if (br)
            out << report.train_instances << " | " << r.nodes << " |\n";
        else
            out << fixed(r.mean_dn_nonleaf, 1) << "+" << fixed(r.mean_dn_leaf, 1) << " | " << r.nodes << " |\n";
    }
}

void write_k_sweep_csv(std::ostream& out, const BenchReport& report) {
    out << "method,k,nmax,micro_f,macro_f,micro_f_std,macro_f_std\n";
    out << std::setprecision(17);
    if (const auto* br = br_row(report))
        out << "BR,,," << br->micro_f << ',' << br->macro_f << ',' << br->micro_f_std << ',' << br->macro_f_std << '\n';
    for (const auto* r : homer_rows(report, true)) {
        if (!r->error.empty()) continue;
        out << r->method << ',' << r->k << ',' << r->nmax << ',' << r->micro_f << ',' << r->macro_f << ','
            << r->micro_f_std << ',' << r->macro_f_std << '\n';
    }
}

void write_nmax_sweep_csv(std::ostream& out, const BenchReport& report) {
    out << "nmax,k,micro_f,macro_f,micro_f_std,macro_f_std,br_micro_f,br_macro_f\n";
    out << std::setprecision(17);
    const auto* br = br_row(report);
    for (const auto* r : homer_rows(report, false)) {
        if (!r->error.empty()) continue;
        out << r->nmax << ',' << r->k << ',' << r->micro_f << ',' << r->macro_f << ',' << r->micro_f_std << ','
            << r->macro_f_std << ',';
        if (br) out << br->micro_f << ',' << br->macro_f;
        else out << ',';
        out << '\n';
    }
}

std::vector<std::string> write_report_files(const BenchReport& report, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    std::vector<std::string> written;
    auto emit = [&](const std::string& name, auto&& writer) {
        const auto path = (fs::path(dir) / name).string();
        std::ofstream out(path);
        if (!out) throw std::runtime_error("cannot write '" + path + "'");
        writer(out, report);
        written.push_back(path);
    };
    emit("report.json", write_report_json);
    emit("report.md", write_report_markdown);
    if (report.config.k_values.size() > 1) emit("k_sweep.csv", write_k_sweep_csv);
    if (report.config.nmax_values.size() > 1) emit("nmax_sweep.csv", write_nmax_sweep_csv);
    return written;
}

}  // namespace homer
