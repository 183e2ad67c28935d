// Bibtex acceptance checks. Reads train.txt and test.txt from the directory
// named by HOMER_BIBTEX_DIR and exits 77 (skipped) when they are absent.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>

#include "homer/bench.hpp"
#include "homer/dataset.hpp"
#include "homer/hierarchy.hpp"
#include "homer/inference.hpp"
#include "homer/learner.hpp"

using namespace homer;

namespace {

int failures = 0;

void line(bool pass, const char* name, const std::string& detail) {
    std::printf("%s %s: %s\n", pass ? "PASS" : "FAIL", name, detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c, d);
    return buf;
}

}  // namespace

int main() {
    const char* dir = std::getenv("HOMER_BIBTEX_DIR");
    if (!dir || !std::filesystem::exists(std::filesystem::path(dir) / "train.txt") ||
        !std::filesystem::exists(std::filesystem::path(dir) / "test.txt")) {
        std::printf("SKIP bibtex: set HOMER_BIBTEX_DIR to a directory holding train.txt and test.txt\n");
        return 77;
    }
    BenchConfig config;
    config.train_path = (std::filesystem::path(dir) / "train.txt").string();
    config.test_path = (std::filesystem::path(dir) / "test.txt").string();

    auto train = load_dataset(config.train_path);
    LoadOptions opts;
    opts.vocab = train.vocab;
    const auto test = load_dataset(config.test_path, opts);
    train.vocab = test.vocab;
    train.num_features = std::max(train.num_features, test.num_features);

    const auto stats = compute_stats(train);
    const bool stats_ok = train.size() == 4880 && test.size() == 2515 && train.vocab.size() == 159 &&
                          std::abs(stats.cardinality - 2.38) <= 0.01;
    line(stats_ok, "bibtex-dataset-stats",
         fmt("%.0f train, %.0f test, %.0f labels, cardinality %.3f", static_cast<double>(train.size()),
             static_cast<double>(test.size()), static_cast<double>(train.vocab.size()), stats.cardinality) +
             ", " + std::to_string(train.num_features) + " features");

    config.k_values = {3};
    config.nmax_values = {20};
    config.seeds = {1, 2, 3};
    const auto report = run_benchmark(train, test, config);
    const auto& br = report.rows.at(0);
    const auto& homer = report.rows.at(1);

    line(br.error.empty() && br.micro_f >= 0.36 && br.micro_f <= 0.46, "bibtex-br-micro-f",
         fmt("BR Micro-F %.4f (band [0.36, 0.46])", br.micro_f));
    line(homer.error.empty() && homer.macro_f - br.macro_f > 0.005, "bibtex-homer-macro-gain",
         fmt("HOMER-BR Macro-F %.4f vs BR %.4f, margin %.4f (need > 0.005)", homer.macro_f, br.macro_f,
             homer.macro_f - br.macro_f));
    line(homer.error.empty() && homer.mean_nodes_visited < 0.8 * static_cast<double>(homer.nodes),
         "bibtex-traversal-efficiency",
         fmt("mean nodes visited %.2f of %.0f nodes (need < %.2f)", homer.mean_nodes_visited,
             static_cast<double>(homer.nodes), 0.8 * static_cast<double>(homer.nodes)));
    return failures == 0 ? 0 : 1;
}
