#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "homer/clustering.hpp"
#include "homer/dataset.hpp"
#include "homer/eval.hpp"
#include "homer/linear_model.hpp"

namespace homer {

inline constexpr int kReportSchemaVersion = 1;

struct BenchConfig {
    std::string train_path;
    std::string test_path;
    std::vector<std::size_t> k_values{3};
    std::vector<std::size_t> nmax_values{20};
    std::vector<std::uint64_t> seeds{1, 2, 3};
    std::size_t iterations = 3;
    ClustererKind clusterer = ClustererKind::balanced_kmeans;
    LearnerParams learner;
    BucketBounds buckets;
    bool include_br = true;
    bool include_homer = true;
    std::size_t threads = 1;
};

/// One method/configuration, aggregated over seeds.
struct BenchRow {
    std::string method;
    std::size_t k = 0;
    std::size_t nmax = 0;
    std::vector<std::uint64_t> seeds;
    double micro_f = 0.0;
    double macro_f = 0.0;
    double micro_f_std = 0.0;
    double macro_f_std = 0.0;
    double train_s = 0.0;
    double predict_s = 0.0;
    std::size_t nodes = 0;
    double mean_dn_nonleaf = 0.0;
    double mean_dn_leaf = 0.0;
    double mean_nodes_visited = 0.0;
    BucketedReport buckets;
    /// Set when the grid point failed; metrics are then meaningless.
    std::string error;
};

struct BenchReport {
    std::size_t train_instances = 0;
    std::size_t test_instances = 0;
    std::size_t num_labels = 0;
    BenchConfig config;
    std::vector<BenchRow> rows;
};

/// Trains flat BR (once per seed) and HOMER for every (k, nmax) grid point
/// and seed, scoring each on `test`. Grid points that throw are recorded with
/// their error and the run continues.
BenchReport run_benchmark(const MultiLabelDataset& train, const MultiLabelDataset& test, const BenchConfig& config);

/// Loads `config.train_path` and `config.test_path` (the test split against
/// the training vocabulary) and runs the grid.
BenchReport run_benchmark(const BenchConfig& config);

void write_report_json(std::ostream& out, const BenchReport& report);
void write_report_markdown(std::ostream& out, const BenchReport& report);
/// BR row, then HOMER rows ordered by (nmax, k). No timings: reruns are byte-identical.
void write_k_sweep_csv(std::ostream& out, const BenchReport& report);
/// One row per HOMER (k, nmax) ordered by (k, nmax), with the BR scores as extra columns.
void write_nmax_sweep_csv(std::ostream& out, const BenchReport& report);

/// Writes report.json and report.md into `dir`, plus k_sweep.csv and
/// nmax_sweep.csv when the grid varies k or nmax. Returns the written paths.
std::vector<std::string> write_report_files(const BenchReport& report, const std::string& dir);

}  // namespace homer
