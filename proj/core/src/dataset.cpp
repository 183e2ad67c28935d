#include "homer/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace homer {

namespace {

std::string format_error(const std::string& message, std::size_t line, const std::string& source) {
    std::string out = source.empty() ? (line ? "line " : "") : source;
    if (line) out += (source.empty() ? "" : ":") + std::to_string(line);
    return out.empty() ? message : out + ": " + message;
}

std::string_view trim(std::string_view s) {
    auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
        std::size_t j = i;
        while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
        if (j > i) out.push_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

template <typename T>
std::optional<T> parse_uint(std::string_view s) {
    T value{};
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return value;
}

std::optional<double> parse_double(std::string_view s) {
    // std::from_chars for double is available in libstdc++ 11.
    double value{};
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return value;
}

bool is_feature_token(std::string_view tok) { return tok.find(':') != std::string_view::npos; }

}  // namespace

DataError::DataError(const std::string& message, std::size_t line, const std::string& source)
    : std::runtime_error(format_error(message, line, source)), message_(message), line_(line) {}

LabelVocabulary::LabelVocabulary(std::vector<std::string> names) {
    for (auto& n : names) {
        if (index_.count(n)) throw DataError("duplicate label name '" + n + "' in vocabulary");
        index_.emplace(n, static_cast<LabelId>(names_.size()));
        names_.push_back(std::move(n));
    }
}

LabelId LabelVocabulary::intern(std::string_view name) {
    std::string key(name);
    auto it = index_.find(key);
    if (it != index_.end()) return it->second;
    auto id = static_cast<LabelId>(names_.size());
    index_.emplace(key, id);
    names_.push_back(std::move(key));
    return id;
}

std::optional<LabelId> LabelVocabulary::find(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::string LabelVocabulary::hash() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](unsigned char c) {
        h ^= c;
        h *= 0x100000001b3ULL;
    };
    for (const auto& n : names_) {
        for (unsigned char c : n) mix(c);
        mix('\n');
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

bool SparseInstance::has_label(LabelId l) const { return std::binary_search(labels.begin(), labels.end(), l); }

void MultiLabelDataset::validate() const {
    for (std::size_t i = 0; i < instances.size(); ++i) {
        const auto& inst = instances[i];
        for (std::size_t j = 0; j < inst.features.size(); ++j) {
            const auto& f = inst.features[j];
            if (j > 0 && inst.features[j - 1].id >= f.id)
                throw DataError("instance " + std::to_string(i) + ": feature ids not strictly increasing");
            if (f.id >= num_features)
                throw DataError("instance " + std::to_string(i) + ": feature id " + std::to_string(f.id) +
                                " >= num_features " + std::to_string(num_features));
            if (!std::isfinite(f.value))
                throw DataError("instance " + std::to_string(i) + ": non-finite feature value");
        }
        for (std::size_t j = 0; j < inst.labels.size(); ++j) {
            if (inst.labels[j] >= vocab.size())
                throw DataError("instance " + std::to_string(i) + ": label id out of range");
            if (j > 0 && inst.labels[j - 1] >= inst.labels[j])
                throw DataError("instance " + std::to_string(i) + ": label ids not sorted/unique");
        }
    }
}

MultiLabelDataset read_dataset(std::istream& in, const LoadOptions& options) {
    MultiLabelDataset ds;
    const bool fixed_vocab = options.vocab.has_value();
    if (fixed_vocab) ds.vocab = *options.vocab;

    std::optional<std::size_t> declared_features = options.num_features;
    std::size_t max_feature_seen = 0;
    bool any_feature = false;
    bool first_content_line = true;

    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = trim(raw);
        if (line.empty() || line.front() == '#') continue;

        auto tokens = split_ws(line);

        if (first_content_line) {
            first_content_line = false;
            if (tokens.size() == 3 && std::none_of(tokens.begin(), tokens.end(), is_feature_token) &&
                std::all_of(tokens.begin(), tokens.end(),
                            [](std::string_view t) { return parse_uint<std::size_t>(t).has_value(); })) {
                auto header_features = *parse_uint<std::size_t>(tokens[1]);
                if (!options.num_features) declared_features = header_features;
                continue;
            }
        }

        SparseInstance inst;
        std::size_t first_feature = 0;
        // A leading token without ':' is the label field; an empty label field
        // leaves the line starting directly with features.
        if (!tokens.empty() && !is_feature_token(tokens[0])) {
            first_feature = 1;
            std::string_view field = tokens[0];
            std::size_t pos = 0;
            while (pos <= field.size()) {
                auto comma = field.find(',', pos);
                if (comma == std::string_view::npos) comma = field.size();
                auto tok = field.substr(pos, comma - pos);
                pos = comma + 1;
                if (tok.empty()) {
                    if (field.size() == 0) break;
                    throw DataError("empty label token", line_no);
                }
                LabelId id;
                if (!fixed_vocab) {
                    id = ds.vocab.intern(tok);
                } else if (auto found = ds.vocab.find(tok)) {
                    id = *found;
                } else if (auto num = parse_uint<LabelId>(tok); num && *num < ds.vocab.size()) {
                    id = *num;
                } else if (options.strict_vocab) {
                    throw DataError("label '" + std::string(tok) + "' not in vocabulary", line_no);
                } else {
                    id = ds.vocab.intern(tok);
                }
                inst.labels.push_back(id);
            }
        }
        std::sort(inst.labels.begin(), inst.labels.end());
        inst.labels.erase(std::unique(inst.labels.begin(), inst.labels.end()), inst.labels.end());

        for (std::size_t t = first_feature; t < tokens.size(); ++t) {
            auto tok = tokens[t];
            auto colon = tok.find(':');
            if (colon == std::string_view::npos) throw DataError("expected idx:val, got '" + std::string(tok) + "'", line_no);
            auto idx = parse_uint<FeatureId>(tok.substr(0, colon));
            auto val = parse_double(tok.substr(colon + 1));
            if (!idx || !val) throw DataError("malformed feature '" + std::string(tok) + "'", line_no);
            if (!std::isfinite(*val)) throw DataError("non-finite feature value", line_no);
            if (declared_features && *idx >= *declared_features)
                throw DataError("feature id " + std::to_string(*idx) + " >= declared num_features " +
                                    std::to_string(*declared_features),
                                line_no);
            inst.features.push_back({*idx, *val});
        }
        std::sort(inst.features.begin(), inst.features.end(),
                  [](const Feature& a, const Feature& b) { return a.id < b.id; });
        for (std::size_t j = 1; j < inst.features.size(); ++j)
            if (inst.features[j].id == inst.features[j - 1].id)
                throw DataError("duplicate feature id " + std::to_string(inst.features[j].id), line_no);
        if (!inst.features.empty()) {
            any_feature = true;
            max_feature_seen = std::max<std::size_t>(max_feature_seen, inst.features.back().id);
        }
        ds.instances.push_back(std::move(inst));
    }
    if (in.bad()) throw DataError("read error");

    ds.num_features = declared_features ? *declared_features : (any_feature ? max_feature_seen + 1 : 0);
    return ds;
}

MultiLabelDataset load_dataset(const std::string& path, const LoadOptions& options) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open dataset file '" + path + "'");
    try {
        return read_dataset(in, options);
    } catch (const DataError& e) {
        throw DataError(e.message(), e.line(), path);
    }
}

void write_dataset(std::ostream& out, const MultiLabelDataset& ds) {
    out << ds.size() << ' ' << ds.num_features << ' ' << ds.vocab.size() << '\n';
    const auto old_precision = out.precision(std::numeric_limits<double>::max_digits10);
    for (const auto& inst : ds.instances) {
        for (std::size_t j = 0; j < inst.labels.size(); ++j) {
            if (j) out << ',';
            out << ds.vocab.name(inst.labels[j]);
        }
        for (const auto& f : inst.features) out << ' ' << f.id << ':' << f.value;
        out << '\n';
    }
    out.precision(old_precision);
}

void save_dataset(const std::string& path, const MultiLabelDataset& ds) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write dataset file '" + path + "'");
    write_dataset(out, ds);
}

LabelVocabulary load_vocabulary(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open vocabulary file '" + path + "'");
    std::vector<std::string> names;
    std::string raw;
    while (std::getline(in, raw)) {
        auto name = trim(raw);
        if (name.empty()) continue;
        names.emplace_back(name);
    }
    return LabelVocabulary(std::move(names));
}

void save_vocabulary(const std::string& path, const LabelVocabulary& vocab) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write vocabulary file '" + path + "'");
    for (const auto& n : vocab.names()) out << n << '\n';
}

std::vector<std::size_t> label_frequencies(const MultiLabelDataset& ds) {
    std::vector<std::size_t> freq(ds.vocab.size(), 0);
    for (const auto& inst : ds.instances)
        for (auto l : inst.labels) ++freq.at(l);
    return freq;
}

DatasetStats compute_stats(const MultiLabelDataset& ds) {
    if (ds.empty()) throw std::invalid_argument("compute_stats: empty dataset");
    DatasetStats s;
    s.num_instances = ds.size();
    s.num_labels = ds.vocab.size();
    s.num_features = ds.num_features;
    s.label_frequencies = label_frequencies(ds);
    std::size_t total = 0;
    for (const auto& inst : ds.instances) total += inst.labels.size();
    s.cardinality = static_cast<double>(total) / static_cast<double>(ds.size());
    s.avg_label_frequency = s.num_labels ? static_cast<double>(total) / static_cast<double>(s.num_labels) : 0.0;
    return s;
}

std::vector<std::size_t> filter_indices(const MultiLabelDataset& ds, std::span<const LabelId> subset) {
    std::vector<char> member(ds.vocab.size(), 0);
    for (auto l : subset) member.at(l) = 1;
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const auto& labels = ds.instances[i].labels;
        if (std::any_of(labels.begin(), labels.end(), [&](LabelId l) { return member[l] != 0; })) out.push_back(i);
    }
    return out;
}

MultiLabelDataset filter_by_labels(const MultiLabelDataset& ds, std::span<const LabelId> subset) {
    MultiLabelDataset out;
    out.vocab = ds.vocab;
    out.num_features = ds.num_features;
    for (auto i : filter_indices(ds, subset)) out.instances.push_back(ds.instances[i]);
    return out;
}

}  // namespace homer
