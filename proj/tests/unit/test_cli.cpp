#include <sstream>

#include "commands.hpp"
#include "doctest.h"
#include "homer/bench.hpp"
#include "homer/model_io.hpp"
#include "homer/synthetic.hpp"
#include "json.hpp"
#include "test_support.hpp"

using namespace homer;
using homer::testing::slurp;
using homer::testing::TempDir;
using homer::testing::write_text;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = homer::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return lines;
}

/// Writes a small synthetic corpus to train.txt / test.txt.
struct Corpus {
    TempDir dir{"cli"};
    SyntheticCorpus data;
    std::string train;
    std::string test;

    Corpus() {
        SyntheticSpec spec;
        spec.num_labels = 12;
        spec.train_instances = 200;
        spec.test_instances = 80;
        spec.seed = 9;
        data = generate_corpus(spec);
        train = dir.file("train.txt");
        test = dir.file("test.txt");
        write_text(train, homer::testing::dataset_text(data.train));
        write_text(test, homer::testing::dataset_text(data.test));
    }
};

}  // namespace

TEST_CASE("help and usage errors") {
    CHECK(run({"--help"}).code == 0);
    CHECK(run({}).code == 2);
    CHECK(run({"bogus"}).code == 2);
    CHECK(run({"train", "--k", "3"}).code == 2);
}

TEST_CASE("train writes deterministic models") {
    Corpus c;
    const auto a = c.dir.file("a.json"), b = c.dir.file("b.json");
    for (const auto& path : {a, b}) {
        const auto r = run({"train", "--train", c.train, "-o", path, "--k", "2", "--nmax", "4", "--epochs", "20"});
        REQUIRE(r.code == 0);
        CHECK(r.err.find("train: {") != std::string::npos);
    }
    CHECK(slurp(a) == slurp(b));
    CHECK(load_model(a).tree.nodes.size() > 1);

    const auto flat = c.dir.file("flat.json");
    REQUIRE(run({"train", "--train", c.train, "-o", flat, "--flat-br", "--epochs", "20"}).code == 0);
    const auto m = load_model(flat);
    CHECK(m.flat_br);
    CHECK(m.tree.nodes.size() == 1);
}

TEST_CASE("missing and malformed inputs exit 2 and name the file") {
    Corpus c;
    const auto missing = c.dir.file("nope.txt");
    auto r = run({"train", "--train", missing, "-o", c.dir.file("m.json")});
    CHECK(r.code == 2);
    CHECK(r.err.find(missing) != std::string::npos);

    const auto bad = c.dir.file("bad.txt");
    write_text(bad, "L0 1:x\n");
    r = run({"train", "--train", bad, "-o", c.dir.file("m.json")});
    CHECK(r.code == 2);
    CHECK(r.err.find("bad.txt:1") != std::string::npos);

    const auto junk = c.dir.file("junk.json");
    write_text(junk, "{}");
    CHECK(run({"predict", "-m", junk, "--test", c.test}).code == 2);
}

TEST_CASE("predict output formats") {
    Corpus c;
    const auto model = c.dir.file("m.json");
    REQUIRE(run({"train", "--train", c.train, "-o", model, "--k", "2", "--nmax", "4", "--epochs", "20"}).code == 0);

    auto r = run({"predict", "-m", model, "--test", c.test});
    REQUIRE(r.code == 0);
    CHECK(lines_of(r.out).size() == c.data.test.size());

    r = run({"predict", "-m", model, "--test", c.test, "--mode", "ranking", "--top", "5"});
    REQUIRE(r.code == 0);
    const auto lines = lines_of(r.out);
    REQUIRE(lines.size() == c.data.test.size());
    for (const auto& line : lines) {
        CHECK(std::count(line.begin(), line.end(), ':') <= 5);
    }

    const auto empty = c.dir.file("empty.txt");
    write_text(empty, "");
    r = run({"predict", "-m", model, "--test", empty});
    CHECK(r.code == 0);
    CHECK(r.out.empty());
}

TEST_CASE("vocabulary mismatches exit 3") {
    Corpus c;
    const auto model = c.dir.file("m.json");
    REQUIRE(run({"train", "--train", c.train, "-o", model, "--flat-br", "--epochs", "10"}).code == 0);

    const auto other = c.dir.file("other.txt");
    write_text(other, "Zzz 1:1\n");
    CHECK(run({"predict", "-m", model, "--test", other}).code == 3);
    const auto names = c.dir.file("labels.txt");
    save_vocabulary(names, load_model(model).vocab);
    CHECK(run({"predict", "-m", model, "--test", c.test, "--vocab", names}).code == 0);
    save_vocabulary(names, LabelVocabulary(homer::testing::label_names(3)));
    CHECK(run({"predict", "-m", model, "--test", c.test, "--vocab", names}).code == 3);
}

TEST_CASE("predict then evaluate matches the in-process benchmark") {
    Corpus c;
    const auto model = c.dir.file("m.json");
    const auto pred = c.dir.file("pred.txt");
    REQUIRE(run({"train", "--train", c.train, "-o", model, "--k", "3", "--nmax", "4", "--seed", "1", "--epochs",
                 "20"})
                .code == 0);
    REQUIRE(run({"predict", "-m", model, "--test", c.test, "-o", pred}).code == 0);
    const auto r = run({"evaluate", "--truth", c.test, "--pred", pred, "-m", model});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);

    BenchConfig config;
    config.train_path = c.train;
    config.test_path = c.test;
    config.include_br = false;
    config.seeds = {1};
    config.k_values = {3};
    config.nmax_values = {4};
    config.learner.epochs = 20;
    const auto report = run_benchmark(config);
    REQUIRE(report.rows.size() == 1);
    CHECK(j["micro_f"].get<double>() == report.rows[0].micro_f);
    CHECK(j["macro_f"].get<double>() == report.rows[0].macro_f);
    CHECK(j["per_label"].size() == c.data.train.vocab.size());
}

TEST_CASE("evaluate edge cases") {
    Corpus c;
    const auto truth_pred = c.dir.file("truth_pred.txt");
    std::string text;
    for (const auto& inst : c.data.test.instances) {
        for (std::size_t i = 0; i < inst.labels.size(); ++i)
            text += (i ? "," : "") + c.data.train.vocab.name(inst.labels[i]);
        text += "\n";
    }
    write_text(truth_pred, text);
    auto r = run({"evaluate", "--truth", c.test, "--pred", truth_pred});
    REQUIRE(r.code == 0);
    auto j = nlohmann::json::parse(r.out);
    CHECK(j["micro_f"].get<double>() == 1.0);

    const auto blank = c.dir.file("blank.txt");
    write_text(blank, std::string(c.data.test.size(), '\n'));
    r = run({"evaluate", "--truth", c.test, "--pred", blank});
    REQUIRE(r.code == 0);
    j = nlohmann::json::parse(r.out);
    CHECK(j["micro_f"].get<double>() == 0.0);
    CHECK(j["macro_f"].get<double>() == 0.0);

    const auto short_pred = c.dir.file("short.txt");
    write_text(short_pred, "L0\n");
    CHECK(run({"evaluate", "--truth", c.test, "--pred", short_pred}).code == 2);

    const auto ranked = c.dir.file("ranked.txt");
    write_text(ranked, std::string(c.data.test.size() - 1, '\n') + "L0:0.5\n");
    CHECK(run({"evaluate", "--truth", c.test, "--pred", ranked}).code == 2);
}

TEST_CASE("config files fill options that flags leave unset") {
    Corpus c;
    const auto cfg = c.dir.file("train.toml");
    write_text(cfg, "k = 2\nnmax = 3\nepochs = 10\nflat_br = false\n");
    const auto model = c.dir.file("m.json");
    REQUIRE(run({"train", "--config", cfg, "--train", c.train, "-o", model, "--nmax", "6"}).code == 0);
    const auto m = load_model(model);
    CHECK(m.tree.params.k == 2);
    CHECK(m.tree.params.nmax == 6);
    CHECK(m.learner.epochs == 10);

    write_text(cfg, "no_such_key = 1\n");
    CHECK(run({"train", "--config", cfg, "--train", c.train, "-o", model}).code == 2);
}

TEST_CASE("bench writes reports") {
    Corpus c;
    const auto out = c.dir.file("bench");
    const auto r = run({"bench", "--train", c.train, "--test", c.test, "--k", "2", "3", "--nmax", "4", "--seeds", "1",
                        "--epochs", "10", "--out-dir", out});
    REQUIRE(r.code == 0);
    CHECK(r.out.rfind("| Classifier |", 0) == 0);
    const auto csv = lines_of(slurp(out + "/k_sweep.csv"));
    CHECK(csv.size() == 4);
    CHECK(std::filesystem::exists(out + "/report.json"));
}

TEST_CASE("cluster, inspect and inspect-tree") {
    Corpus c;
    auto r = run({"cluster", "--train", c.train, "--k", "3", "--dump"});
    REQUIRE(r.code == 0);
    const auto clusters = nlohmann::json::parse(r.out);
    REQUIRE(clusters.size() == 3);
    std::size_t total = 0;
    for (const auto& cl : clusters) total += cl.size();
    CHECK(total == c.data.train.vocab.size());

    r = run({"inspect", c.train});
    REQUIRE(r.code == 0);
    auto j = nlohmann::json::parse(r.out);
    CHECK(j["instances"] == c.data.train.size());

    const auto model = c.dir.file("m.json");
    REQUIRE(run({"train", "--train", c.train, "-o", model, "--k", "2", "--nmax", "4", "--epochs", "10"}).code == 0);
    r = run({"inspect-tree", "-m", model});
    REQUIRE(r.code == 0);
    j = nlohmann::json::parse(r.out);
    CHECK(j["nodes"].size() == load_model(model).tree.nodes.size());
    CHECK(j["nodes"][0]["labels"].size() == c.data.train.vocab.size());
}
