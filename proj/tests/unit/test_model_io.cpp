#include <random>
#include <sstream>

#include "doctest.h"
#include "homer/model_io.hpp"
#include "json.hpp"
#include "test_support.hpp"

using namespace homer;

namespace {

HomerModel trained_model(std::uint64_t seed, bool flat) {
    std::mt19937_64 rng(seed);
    const auto ds = homer::testing::random_dataset(rng, 120, 14, 30);
    LearnerParams lp;
    lp.epochs = 30;
    lp.seed = seed;
    if (flat) return train_flat_br(ds, lp);
    return train_homer(ds, build_hierarchy(ds, {3, 4, 3, seed}), lp);
}

std::string to_text(const HomerModel& m) {
    std::ostringstream os;
    write_model(os, m);
    return os.str();
}

HomerModel from_text(const std::string& s) {
    std::istringstream in(s);
    return read_model(in);
}

}  // namespace

TEST_CASE("models round-trip exactly") {
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        for (bool flat : {false, true}) {
            const auto m = trained_model(seed, flat);
            const auto text = to_text(m);
            const auto back = from_text(text);
            CHECK(back == m);
            CHECK(to_text(back) == text);
        }
    }
}

TEST_CASE("model header fields") {
    const auto m = trained_model(5, true);
    const auto j = nlohmann::json::parse(to_text(m));
    CHECK(j["format"] == "homer-model");
    CHECK(j["version"] == kModelFormatVersion);
    CHECK(j["flat_br"] == true);
    CHECK(j["vocab_hash"] == m.vocab.hash());
    CHECK(j["tree"]["nodes"].size() == 1);
}

TEST_CASE("unknown versions and tampering are hard errors") {
    const auto text = to_text(trained_model(6, false));
    auto j = nlohmann::ordered_json::parse(text);

    auto bad_version = j;
    bad_version["version"] = kModelFormatVersion + 1;
    CHECK_THROWS_AS(from_text(bad_version.dump()), ModelError);

    auto bad_hash = j;
    bad_hash["vocab"][0] = "renamed";
    CHECK_THROWS_AS(from_text(bad_hash.dump()), ModelError);

    auto bad_tree = j;
    bad_tree["tree"]["nodes"][1]["labels"].push_back(0);
    CHECK_THROWS_AS(from_text(bad_tree.dump()), ModelError);

    auto missing = j;
    missing.erase("learner");
    CHECK_THROWS_AS(from_text(missing.dump()), ModelError);

    CHECK_THROWS_AS(from_text("{not json"), ModelError);
    CHECK_THROWS_AS(from_text(R"({"format":"other"})"), ModelError);
    CHECK_THROWS_AS(load_model("/nonexistent/model.json"), ModelError);
}

TEST_CASE("save and load through files") {
    homer::testing::TempDir dir("model");
    const auto m = trained_model(7, false);
    save_model(dir.file("m.json"), m);
    CHECK(load_model(dir.file("m.json")) == m);
}
