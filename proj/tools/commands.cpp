#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "homer/bench.hpp"
#include "homer/clustering.hpp"
#include "homer/dataset.hpp"
#include "homer/eval.hpp"
#include "homer/hierarchy.hpp"
#include "homer/inference.hpp"
#include "homer/learner.hpp"
#include "homer/model_io.hpp"
#include "json.hpp"

namespace homer::cli {

namespace {

using json = nlohmann::ordered_json;

constexpr int kSchemaVersion = 1;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class MismatchError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// key = value file; values fill options not given on the command line.
void apply_config(CLI::App& cmd, const std::string& path) {
    if (path.empty()) return;
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open config file '" + path + "'");
    CLI::ConfigTOML toml;
    std::vector<CLI::ConfigItem> items;
    try {
        items = toml.from_config(in);
    } catch (const CLI::Error& e) {
        throw UsageError(path + ": " + e.what());
    }
    for (const auto& item : items) {
        if (item.name == "++" || item.name == "--") continue;  // section markers
        std::string name = item.name;
        std::replace(name.begin(), name.end(), '_', '-');
        auto* opt = cmd.get_option_no_throw("--" + name);
        if (!opt || name == "config") throw UsageError(path + ": unknown key '" + item.name + "'");
        if (opt->count() > 0) continue;
        for (const auto& v : item.inputs) opt->add_result(v);
        try {
            opt->run_callback();
        } catch (const CLI::Error& e) {
            throw UsageError(path + ": " + item.name + ": " + e.what());
        }
    }
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw UsageError("cannot write '" + path + "'");
    return out;
}

json bucket_json(const std::optional<BucketScore>& b) {
    if (!b) return nullptr;
    return {{"labels", b->labels}, {"micro_f", b->micro_f}, {"macro_f", b->macro_f}};
}

json buckets_json(const BucketedReport& r) {
    return {{"rare", bucket_json(r.rare)}, {"mid", bucket_json(r.mid)}, {"frequent", bucket_json(r.frequent)}};
}

json telemetry_json(const TreeTelemetry& t) {
    return {{"nodes", t.total_nodes},         {"leaves", t.leaf_nodes},
            {"depth", t.depth},               {"mean_Dn", t.mean_dn},
            {"mean_Dn_nonleaf", t.mean_dn_nonleaf}, {"mean_Dn_leaf", t.mean_dn_leaf}};
}

// ---- train ----

struct TrainArgs {
    std::string train_path, model_path;
    bool flat_br = false;
    HierarchyParams hierarchy;
    LearnerParams learner;
    std::string clusterer = "balanced-kmeans";
    std::string loss = "logistic";
    std::size_t threads = 1;
    bool cache_node_data = false;
    std::uint64_t seed = 0;
};

void add_learner_options(CLI::App* cmd, LearnerParams& lp, std::string& loss) {
    cmd->add_option("--lambda", lp.lambda, "L2 penalty")->capture_default_str();
    cmd->add_option("--epochs", lp.epochs, "optimizer iterations per binary model")->capture_default_str();
    cmd->add_option("--loss", loss, "logistic or hinge")->capture_default_str();
}

int cmd_train(TrainArgs& a, std::ostream& out, std::ostream& err) {
    (void)out;
    a.hierarchy.clusterer = parse_clusterer(a.clusterer);
    a.learner.loss = parse_loss(a.loss);
    a.hierarchy.seed = a.seed;
    a.learner.seed = a.seed;
    if (!a.flat_br) {
        if (a.hierarchy.k < 2) throw UsageError("--k must be >= 2");
        if (a.hierarchy.nmax < 1) throw UsageError("--nmax must be >= 1");
        if (a.hierarchy.iterations < 1) throw UsageError("--iterations must be >= 1");
    }
    if (a.learner.lambda < 0) throw UsageError("--lambda must be >= 0");

    const auto train = load_dataset(a.train_path);
    TrainOptions options{a.threads, a.cache_node_data};
    const auto t0 = std::chrono::steady_clock::now();
    HierarchyStats hstats;
    HomerModel model = a.flat_br ? train_flat_br(train, a.learner, options)
                                 : train_homer(train, build_hierarchy(train, a.hierarchy, &hstats), a.learner, options);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    save_model(a.model_path, model);

    json log = telemetry_json(model.telemetry());
    log["train_s"] = seconds;
    log["instances"] = train.size();
    log["labels"] = train.vocab.size();
    if (!a.flat_br) log["clamped_splits"] = hstats.clamped_splits;
    err << "train: " << log.dump() << '\n';
    return kOk;
}

// ---- predict ----

struct PredictArgs {
    std::string model_path, test_path, out_path, vocab_path, mode = "bipartition";
    std::size_t top = 20;
    bool prune = false;
    bool omit_zero = false;
    std::size_t threads = 1;
};

MultiLabelDataset load_against_model(const std::string& path, const HomerModel& model) {
    LoadOptions opts;
    opts.vocab = model.vocab;
    auto ds = load_dataset(path, opts);
    if (ds.vocab.hash() != model.vocab.hash())
        throw MismatchError(path + ": labels not in the model vocabulary (first: '" +
                            ds.vocab.name(static_cast<LabelId>(model.vocab.size())) + "')");
    return ds;
}

int cmd_predict(const PredictArgs& a, std::ostream& out, std::ostream& err) {
    PredictMode mode;
    if (a.mode == "bipartition") mode = PredictMode::bipartition;
    else if (a.mode == "ranking") mode = PredictMode::ranking;
    else throw UsageError("--mode must be bipartition or ranking");

    const auto model = load_model(a.model_path);
    if (!a.vocab_path.empty()) {
        const auto vocab = load_vocabulary(a.vocab_path);
        if (vocab.hash() != model.vocab.hash())
            throw MismatchError("vocabulary hash " + vocab.hash() + " of '" + a.vocab_path +
                                "' differs from the model's " + model.vocab.hash());
    }
    const auto test = load_against_model(a.test_path, model);
    const auto preds = predict_all(model, test, mode, a.prune, a.threads);

    std::ofstream file;
    if (!a.out_path.empty()) file = open_out(a.out_path);
    std::ostream& dst = a.out_path.empty() ? out : file;
    dst << std::setprecision(6);
    std::size_t unknown = 0;
    for (const auto& p : preds) {
        unknown += p.unknown_features;
        if (mode == PredictMode::bipartition) {
            for (std::size_t i = 0; i < p.labels.size(); ++i) dst << (i ? "," : "") << model.vocab.name(p.labels[i]);
        } else {
            std::size_t written = 0;
            for (const auto& [label, score] : p.ranking) {
                if (written == a.top) break;
                if (a.omit_zero && score == 0.0) continue;
                dst << (written ? " " : "") << model.vocab.name(label) << ':' << score;
                ++written;
            }
        }
        dst << '\n';
    }
    if (unknown > 0) err << "predict: ignored " << unknown << " features with ids >= " << model.num_features << '\n';
    return kOk;
}

// ---- evaluate ----

struct EvaluateArgs {
    std::string truth_path, pred_path, model_path, vocab_path, train_path, out_path;
    BucketBounds bounds;
};

std::vector<std::vector<LabelId>> read_predictions(const std::string& path, LabelVocabulary& vocab, bool fixed) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open predictions file '" + path + "'");
    std::vector<std::vector<LabelId>> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::vector<LabelId> labels;
        std::stringstream ss(line);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            if (tok.empty()) continue;
            if (tok.find(':') != std::string::npos || tok.find(' ') != std::string::npos)
                throw UsageError(path + ":" + std::to_string(line_no) + ": expected bipartition output (lab1,lab2)");
            auto id = vocab.find(tok);
            if (!id) {
                if (fixed) throw MismatchError(path + ":" + std::to_string(line_no) + ": unknown label '" + tok + "'");
                id = vocab.intern(tok);
            }
            labels.push_back(*id);
        }
        std::sort(labels.begin(), labels.end());
        labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
        out.push_back(std::move(labels));
    }
    return out;
}

int cmd_evaluate(const EvaluateArgs& a, std::ostream& out, std::ostream& err) {
    (void)err;
    std::optional<HomerModel> model;
    LoadOptions opts;
    if (!a.model_path.empty()) {
        model = load_model(a.model_path);
        opts.vocab = model->vocab;
    } else if (!a.vocab_path.empty()) {
        opts.vocab = load_vocabulary(a.vocab_path);
    }
    const bool fixed = opts.vocab.has_value();
    const std::string fixed_hash = fixed ? opts.vocab->hash() : "";
    auto truth = load_dataset(a.truth_path, opts);
    if (fixed && truth.vocab.hash() != fixed_hash)
        throw MismatchError(a.truth_path + ": labels not in the given vocabulary");

    LabelVocabulary vocab = truth.vocab;
    auto predicted = read_predictions(a.pred_path, vocab, fixed);
    if (predicted.size() != truth.size())
        throw UsageError("predictions have " + std::to_string(predicted.size()) + " lines but the truth file has " +
                         std::to_string(truth.size()) + " instances");
    truth.vocab = vocab;

    std::vector<std::size_t> freqs;
    if (model) {
        freqs = model->label_frequencies;
    } else if (!a.train_path.empty()) {
        LoadOptions t;
        t.vocab = vocab;
        auto train = load_dataset(a.train_path, t);
        if (train.vocab.size() != vocab.size()) throw MismatchError(a.train_path + ": labels outside the label set");
        freqs = label_frequencies(train);
    }

    std::vector<std::vector<LabelId>> truth_sets;
    for (const auto& inst : truth.instances) truth_sets.push_back(inst.labels);
    const auto counts = confusion(truth_sets, predicted, vocab.size());
    const auto per_label = per_label_f1(counts);

    json j;
    j["schema_version"] = kSchemaVersion;
    j["instances"] = truth.size();
    j["labels"] = vocab.size();
    j["micro_f"] = micro_f1(counts);
    j["macro_f"] = macro_f1(counts);
    if (!freqs.empty()) {
        freqs.resize(vocab.size(), 0);
        j["buckets"] = buckets_json(bucketed_report(counts, freqs, a.bounds));
    }
    json labels = json::array();
    for (std::size_t l = 0; l < vocab.size(); ++l)
        labels.push_back({{"label", vocab.name(static_cast<LabelId>(l))},
                          {"tp", counts.tp[l]},
                          {"fp", counts.fp[l]},
                          {"fn", counts.fn[l]},
                          {"f1", per_label[l]}});
    j["per_label"] = std::move(labels);

    if (a.out_path.empty()) {
        out << j.dump(2) << '\n';
    } else {
        auto file = open_out(a.out_path);
        file << j.dump(2) << '\n';
    }
    return kOk;
}

// ---- inspect / inspect-tree ----

int cmd_inspect(const std::string& data_path, const std::string& model_path, std::ostream& out) {
    json j;
    j["schema_version"] = kSchemaVersion;
    if (!model_path.empty()) {
        const auto model = load_model(model_path);
        j["flat_br"] = model.flat_br;
        j["labels"] = model.vocab.size();
        j["features"] = model.num_features;
        j["vocab_hash"] = model.vocab.hash();
        j["tree"] = telemetry_json(model.telemetry());
    } else {
        const auto ds = load_dataset(data_path);
        const auto stats = compute_stats(ds);
        j["instances"] = stats.num_instances;
        j["labels"] = stats.num_labels;
        j["features"] = stats.num_features;
        j["cardinality"] = stats.cardinality;
        j["avg_label_frequency"] = stats.avg_label_frequency;
        json freqs = json::object();
        for (std::size_t l = 0; l < ds.vocab.size(); ++l)
            freqs[ds.vocab.name(static_cast<LabelId>(l))] = stats.label_frequencies[l];
        j["label_frequencies"] = std::move(freqs);
    }
    out << j.dump(2) << '\n';
    return kOk;
}

int cmd_inspect_tree(const std::string& model_path, std::ostream& out) {
    const auto model = load_model(model_path);
    json j;
    j["schema_version"] = kSchemaVersion;
    j["root"] = model.tree.root;
    json nodes = json::array();
    for (const auto& n : model.tree.nodes) {
        json names = json::array();
        for (auto l : n.labels) names.push_back(model.vocab.name(l));
        nodes.push_back({{"id", n.id},
                         {"parent", n.parent == kNoNode ? -1 : static_cast<long long>(n.parent)},
                         {"depth", n.depth},
                         {"labels", std::move(names)},
                         {"children", n.children},
                         {"Dn", n.train_size}});
    }
    j["nodes"] = std::move(nodes);
    out << j.dump(2) << '\n';
    return kOk;
}

// ---- cluster ----

struct ClusterArgs {
    std::string train_path, clusterer = "balanced-kmeans";
    ClusterParams params{3, 3, 0, {}};
    bool dump = false;
};

int cmd_cluster(const ClusterArgs& a, std::ostream& out) {
    const auto train = load_dataset(a.train_path);
    std::vector<LabelId> labels(train.vocab.size());
    for (std::size_t l = 0; l < labels.size(); ++l) labels[l] = static_cast<LabelId>(l);
    const auto points = make_label_vectors(train, labels);
    if (a.params.k < 1 || a.params.k > points.size())
        throw UsageError("--k must be in [1, " + std::to_string(points.size()) + "]");
    ClusteringStats stats;
    const auto result = cluster(parse_clusterer(a.clusterer), points, a.params, &stats);
    if (a.dump) {
        out << json(result.clusters).dump() << '\n';
        return kOk;
    }
    json sizes = json::array();
    for (const auto& c : result.clusters) sizes.push_back(c.size());
    out << json{{"schema_version", kSchemaVersion},
                {"k", result.k()},
                {"sizes", std::move(sizes)},
                {"passes", stats.passes},
                {"distance_evaluations", stats.distance_evaluations},
                {"evictions", stats.evictions},
                {"max_cascade", stats.max_cascade},
                {"forced_insertions", stats.forced_insertions},
                {"reseeds", stats.reseeds}}
                .dump(2)
        << '\n';
    return kOk;
}

// ---- bench ----

struct BenchArgs {
    BenchConfig config;
    std::string out_dir = "bench_out";
    std::string clusterer = "balanced-kmeans";
    std::string loss = "logistic";
    bool no_br = false;
    bool no_homer = false;
    std::string config_path;
};

int cmd_bench(BenchArgs& a, std::ostream& out, std::ostream& err) {
    auto& c = a.config;
    c.clusterer = parse_clusterer(a.clusterer);
    c.learner.loss = parse_loss(a.loss);
    c.include_br = !a.no_br;
    c.include_homer = !a.no_homer;
    if (c.seeds.empty()) throw UsageError("--seeds needs at least one value");
    for (auto k : c.k_values)
        if (k < 2) throw UsageError("--k values must be >= 2");
    for (auto n : c.nmax_values)
        if (n < 1) throw UsageError("--nmax values must be >= 1");
    if (c.buckets.rare_max >= c.buckets.frequent_min) throw UsageError("--rare-max must be < --frequent-min");

    const auto report = run_benchmark(c);
    const auto files = write_report_files(report, a.out_dir);
    write_report_markdown(out, report);
    for (const auto& f : files) err << "bench: wrote " << f << '\n';
    for (const auto& r : report.rows)
        if (!r.error.empty()) err << "bench: " << r.method << " k=" << r.k << " nmax=" << r.nmax << " failed: " << r.error << '\n';
    return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"HOMER: hierarchy of multi-label classifiers"};
    app.name("homer");
    app.require_subcommand(1);

    TrainArgs train;
    auto* train_cmd = app.add_subcommand("train", "Build the label hierarchy and train node classifiers");
    train_cmd->add_option("--train", train.train_path, "training data")->required();
    train_cmd->add_option("-o,--model", train.model_path, "output model file")->required();
    train_cmd->add_flag("--flat-br", train.flat_br, "train flat binary relevance (single-node tree)");
    train_cmd->add_option("--k", train.hierarchy.k, "children per split")->capture_default_str();
    train_cmd->add_option("--nmax", train.hierarchy.nmax, "max labels per leaf")->capture_default_str();
    train_cmd->add_option("--iterations", train.hierarchy.iterations, "clustering passes")->capture_default_str();
    train_cmd->add_option("--seed", train.seed, "random seed")->capture_default_str();
    train_cmd->add_option("--clusterer", train.clusterer, "balanced-kmeans or kmeans")->capture_default_str();
    add_learner_options(train_cmd, train.learner, train.loss);
    train_cmd->add_option("--threads", train.threads, "worker threads")->capture_default_str();
    train_cmd->add_flag("--cache-node-data", train.cache_node_data, "materialize all node training sets up front");
    std::string train_config;
    train_cmd->add_option("--config", train_config, "key = value file; flags win");

    PredictArgs predict;
    auto* predict_cmd = app.add_subcommand("predict", "Predict labels for a test file");
    predict_cmd->add_option("-m,--model", predict.model_path, "model file")->required();
    predict_cmd->add_option("--test", predict.test_path, "test data")->required();
    predict_cmd->add_option("-o,--out", predict.out_path, "output file (default stdout)");
    predict_cmd->add_option("--vocab", predict.vocab_path, "label-name file that must match the model");
    predict_cmd->add_option("--mode", predict.mode, "bipartition or ranking")->capture_default_str();
    predict_cmd->add_option("--top", predict.top, "labels per line in ranking mode")->capture_default_str();
    predict_cmd->add_flag("--prune", predict.prune, "prune low-probability subtrees in ranking mode");
    predict_cmd->add_flag("--omit-zero", predict.omit_zero, "drop zero-score labels from rankings");
    predict_cmd->add_option("--threads", predict.threads, "worker threads")->capture_default_str();

    EvaluateArgs evaluate;
    auto* eval_cmd = app.add_subcommand("evaluate", "Score bipartition predictions against a truth file");
    eval_cmd->add_option("--truth", evaluate.truth_path, "labeled test data")->required();
    eval_cmd->add_option("--pred", evaluate.pred_path, "predictions, one line per instance")->required();
    eval_cmd->add_option("-m,--model", evaluate.model_path, "model fixing the label set and training frequencies");
    eval_cmd->add_option("--vocab", evaluate.vocab_path, "label-name file fixing the label set");
    eval_cmd->add_option("--train", evaluate.train_path, "training data for frequency buckets");
    eval_cmd->add_option("--rare-max", evaluate.bounds.rare_max)->capture_default_str();
    eval_cmd->add_option("--frequent-min", evaluate.bounds.frequent_min)->capture_default_str();
    eval_cmd->add_option("-o,--out", evaluate.out_path, "report file (default stdout)");

    std::string inspect_data, inspect_model;
    auto* inspect_cmd = app.add_subcommand("inspect", "Dataset or model statistics as JSON");
    auto* inspect_data_opt = inspect_cmd->add_option("data", inspect_data, "dataset file");
    auto* inspect_model_opt = inspect_cmd->add_option("-m,--model", inspect_model, "model file");
    inspect_data_opt->excludes(inspect_model_opt);
    inspect_cmd->require_option(1);

    std::string tree_model;
    auto* tree_cmd = app.add_subcommand("inspect-tree", "Label tree of a model as JSON");
    tree_cmd->add_option("-m,--model", tree_model, "model file")->required();

    ClusterArgs cl;
    auto* cluster_cmd = app.add_subcommand("cluster", "Cluster all labels of a training file once");
    cluster_cmd->add_option("--train", cl.train_path, "training data")->required();
    cluster_cmd->add_option("--k", cl.params.k)->capture_default_str();
    cluster_cmd->add_option("--iterations", cl.params.iterations)->capture_default_str();
    cluster_cmd->add_option("--seed", cl.params.seed)->capture_default_str();
    cluster_cmd->add_option("--clusterer", cl.clusterer)->capture_default_str();
    cluster_cmd->add_flag("--dump", cl.dump, "print the partition as [[ids...], ...]");

    BenchArgs bench;
    auto* bench_cmd = app.add_subcommand("bench", "Compare flat BR and HOMER over a parameter grid");
    bench_cmd->add_option("--train", bench.config.train_path, "training data")->required();
    bench_cmd->add_option("--test", bench.config.test_path, "test data")->required();
    bench_cmd->add_option("--k", bench.config.k_values, "k values")->capture_default_str();
    bench_cmd->add_option("--nmax", bench.config.nmax_values, "nmax values")->capture_default_str();
    bench_cmd->add_option("--seeds", bench.config.seeds, "seeds averaged per grid point")->capture_default_str();
    bench_cmd->add_option("--iterations", bench.config.iterations)->capture_default_str();
    bench_cmd->add_option("--clusterer", bench.clusterer)->capture_default_str();
    add_learner_options(bench_cmd, bench.config.learner, bench.loss);
    bench_cmd->add_option("--rare-max", bench.config.buckets.rare_max)->capture_default_str();
    bench_cmd->add_option("--frequent-min", bench.config.buckets.frequent_min)->capture_default_str();
    bench_cmd->add_flag("--no-br", bench.no_br, "skip the flat BR baseline");
    bench_cmd->add_flag("--no-homer", bench.no_homer, "skip HOMER grid points");
    bench_cmd->add_option("--threads", bench.config.threads)->capture_default_str();
    bench_cmd->add_option("--out-dir", bench.out_dir, "report directory")->capture_default_str();
    bench_cmd->add_option("--config", bench.config_path, "key = value file; flags win");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*train_cmd) {
            apply_config(*train_cmd, train_config);
            return cmd_train(train, out, err);
        }
        if (*predict_cmd) return cmd_predict(predict, out, err);
        if (*eval_cmd) return cmd_evaluate(evaluate, out, err);
        if (*inspect_cmd) return cmd_inspect(inspect_data, inspect_model, out);
        if (*tree_cmd) return cmd_inspect_tree(tree_model, out);
        if (*cluster_cmd) return cmd_cluster(cl, out);
        if (*bench_cmd) {
            apply_config(*bench_cmd, bench.config_path);
            return cmd_bench(bench, out, err);
        }
        return kUsage;
    } catch (const MismatchError& e) {
        err << "error: " << e.what() << '\n';
        return kMismatch;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const DataError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const ModelError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return kInternal;
    }
}

}  // namespace homer::cli
