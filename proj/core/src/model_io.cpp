#include "homer/model_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include "json.hpp"

namespace homer {

namespace {

using json = nlohmann::ordered_json;

std::string_view kind_name(ModelKind k) {
    switch (k) {
        case ModelKind::untrained: return "untrained";
        case ModelKind::trained: return "trained";
        case ModelKind::constant_negative: return "constant-negative";
        case ModelKind::constant_positive: return "constant-positive";
    }
    return "untrained";
}

ModelKind parse_kind(const std::string& s) {
    if (s == "trained") return ModelKind::trained;
    if (s == "constant-negative") return ModelKind::constant_negative;
    if (s == "constant-positive") return ModelKind::constant_positive;
    if (s == "untrained") return ModelKind::untrained;
    throw ModelError("unknown model kind '" + s + "'");
}

json linear_to_json(const LinearModel& m) {
    json j;
    j["kind"] = kind_name(m.kind);
    j["bias"] = m.bias;
    json w = json::array();
    for (const auto& f : m.weights) w.push_back(json::array({f.id, f.value}));
    j["weights"] = std::move(w);
    return j;
}

LinearModel linear_from_json(const json& j) {
    LinearModel m;
    m.kind = parse_kind(j.at("kind").get<std::string>());
    m.bias = j.at("bias").get<double>();
    for (const auto& pair : j.at("weights")) {
        if (!pair.is_array() || pair.size() != 2) throw ModelError("weight entries must be [feature_id, weight]");
        m.weights.push_back({pair[0].get<FeatureId>(), pair[1].get<double>()});
    }
    return m;
}

}  // namespace

void write_model(std::ostream& out, const HomerModel& model) {
    json j;
    j["format"] = "homer-model";
    j["version"] = kModelFormatVersion;
    j["flat_br"] = model.flat_br;

    const auto& hp = model.tree.params;
    j["params"] = {
        {"k", hp.k},
        {"nmax", hp.nmax},
        {"iterations", hp.iterations},
        {"seed", hp.seed},
        {"clusterer", std::string(to_string(hp.clusterer))},
    };
    const auto& lp = model.learner;
    j["learner"] = {
        {"lambda", lp.lambda},
        {"epochs", lp.epochs},
        {"loss", std::string(to_string(lp.loss))},
        {"seed", lp.seed},
        {"memory", lp.memory},
        {"gradient_tolerance", lp.gradient_tolerance},
    };
    j["vocab"] = model.vocab.names();
    j["vocab_hash"] = model.vocab.hash();
    j["num_features"] = model.num_features;
    j["label_frequencies"] = model.label_frequencies;

    json nodes = json::array();
    for (const auto& n : model.tree.nodes) {
        json jn;
        jn["id"] = n.id;
        jn["parent"] = n.parent == kNoNode ? -1 : static_cast<long long>(n.parent);
        jn["depth"] = n.depth;
        jn["labels"] = n.labels;
        jn["children"] = n.children;
        jn["train_size"] = n.train_size;
        if (n.classifier) {
            json models = json::array();
            for (const auto& m : n.classifier->models) models.push_back(linear_to_json(m));
            jn["models"] = std::move(models);
        }
        nodes.push_back(std::move(jn));
    }
    j["tree"] = {{"root", model.tree.root}, {"nodes", std::move(nodes)}};
    out << j.dump() << '\n';
}

HomerModel read_model(std::istream& in) {
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ModelError(std::string("model is not valid JSON: ") + e.what());
    }
    try {
        if (j.value("format", std::string{}) != "homer-model") throw ModelError("not a homer model file");
        const int version = j.at("version").get<int>();
        if (version != kModelFormatVersion)
            throw ModelError("unsupported model format version " + std::to_string(version) + " (expected " +
                             std::to_string(kModelFormatVersion) + ")");

        HomerModel model;
        model.flat_br = j.at("flat_br").get<bool>();
        const auto& p = j.at("params");
        model.tree.params.k = p.at("k").get<std::size_t>();
        model.tree.params.nmax = p.at("nmax").get<std::size_t>();
        model.tree.params.iterations = p.at("iterations").get<std::size_t>();
        model.tree.params.seed = p.at("seed").get<std::uint64_t>();
        model.tree.params.clusterer = parse_clusterer(p.at("clusterer").get<std::string>());
        const auto& l = j.at("learner");
        model.learner.lambda = l.at("lambda").get<double>();
        model.learner.epochs = l.at("epochs").get<std::size_t>();
        model.learner.loss = parse_loss(l.at("loss").get<std::string>());
        model.learner.seed = l.at("seed").get<std::uint64_t>();
        model.learner.memory = l.at("memory").get<std::size_t>();
        model.learner.gradient_tolerance = l.at("gradient_tolerance").get<double>();

        model.vocab = LabelVocabulary(j.at("vocab").get<std::vector<std::string>>());
        if (model.vocab.hash() != j.at("vocab_hash").get<std::string>())
            throw ModelError("vocabulary hash does not match the stored vocabulary");
        model.num_features = j.at("num_features").get<std::size_t>();
        model.label_frequencies = j.at("label_frequencies").get<std::vector<std::size_t>>();

        const auto& t = j.at("tree");
        model.tree.root = t.at("root").get<NodeId>();
        for (const auto& jn : t.at("nodes")) {
            TreeNode n;
            n.id = jn.at("id").get<NodeId>();
            const auto parent = jn.at("parent").get<long long>();
            n.parent = parent < 0 ? kNoNode : static_cast<NodeId>(parent);
            n.depth = jn.at("depth").get<std::size_t>();
            n.labels = jn.at("labels").get<std::vector<LabelId>>();
            n.children = jn.at("children").get<std::vector<NodeId>>();
            n.train_size = jn.at("train_size").get<std::size_t>();
            if (jn.contains("models")) {
                NodeClassifier c;
                for (const auto& jm : jn.at("models")) c.models.push_back(linear_from_json(jm));
                n.classifier = std::move(c);
            }
            if (n.id != model.tree.nodes.size()) throw ModelError("node ids must be dense and in order");
            model.tree.nodes.push_back(std::move(n));
        }
        try {
            model.tree.validate(model.vocab.size());
        } catch (const std::logic_error& e) {
            throw ModelError(e.what());
        }
        return model;
    } catch (const json::exception& e) {
        throw ModelError(std::string("malformed model file: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw ModelError(std::string("malformed model file: ") + e.what());
    } catch (const DataError& e) {
        throw ModelError(std::string("malformed model file: ") + e.what());
    }
}

void save_model(const std::string& path, const HomerModel& model) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ModelError("cannot write model file '" + path + "'");
    write_model(out, model);
    if (!out) throw ModelError("failed writing model file '" + path + "'");
}

HomerModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ModelError("cannot open model file '" + path + "'");
    return read_model(in);
}

}  // namespace homer
