#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace homer {

using LabelId = std::uint32_t;
using FeatureId = std::uint32_t;

/// Raised for malformed input files. Carries the 1-based line number when known;
/// what() reads "source:line: message".
class DataError : public std::runtime_error {
public:
    DataError(const std::string& message, std::size_t line = 0, const std::string& source = {});
    std::size_t line() const noexcept { return line_; }
    const std::string& message() const noexcept { return message_; }

private:
    std::string message_;
    std::size_t line_;
};

/// Ordered label names with a name -> dense id index. Ids are contiguous from 0.
class LabelVocabulary {
public:
    LabelVocabulary() = default;
    explicit LabelVocabulary(std::vector<std::string> names);

    /// Returns the id of `name`, adding it at the end if unseen.
    LabelId intern(std::string_view name);
    std::optional<LabelId> find(std::string_view name) const;

    const std::string& name(LabelId id) const { return names_.at(id); }
    const std::vector<std::string>& names() const noexcept { return names_; }
    std::size_t size() const noexcept { return names_.size(); }
    bool empty() const noexcept { return names_.empty(); }

    /// Order-sensitive FNV-1a digest of the names, as 16 hex digits.
    std::string hash() const;

    friend bool operator==(const LabelVocabulary& a, const LabelVocabulary& b) { return a.names_ == b.names_; }

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, LabelId> index_;
};

struct Feature {
    FeatureId id = 0;
    double value = 0.0;

    friend bool operator==(const Feature&, const Feature&) = default;
};

/// One document: sparse features sorted by strictly increasing id, and a sorted
/// duplicate-free label set (possibly empty for unlabeled test data).
struct SparseInstance {
    std::vector<Feature> features;
    std::vector<LabelId> labels;

    bool has_label(LabelId l) const;

    friend bool operator==(const SparseInstance&, const SparseInstance&) = default;
};

struct MultiLabelDataset {
    LabelVocabulary vocab;
    std::vector<SparseInstance> instances;
    std::size_t num_features = 0;

    std::size_t size() const noexcept { return instances.size(); }
    bool empty() const noexcept { return instances.empty(); }

    /// Throws DataError when an invariant does not hold.
    void validate() const;
};

struct DatasetStats {
    std::size_t num_instances = 0;
    std::size_t num_labels = 0;
    std::size_t num_features = 0;
    double cardinality = 0.0;
    double avg_label_frequency = 0.0;
    std::vector<std::size_t> label_frequencies;
};

struct LoadOptions {
    /// Fixed vocabulary. When set, label tokens are looked up instead of
    /// interned; integer tokens are taken as ids into it when they do not
    /// name a label.
    std::optional<LabelVocabulary> vocab;
    /// Reject label tokens missing from a fixed vocabulary (otherwise they are
    /// appended to it).
    bool strict_vocab = false;
    /// Feature ids at or above this are an error. Defaults to the header value
    /// or, without a header, one past the largest id seen.
    std::optional<std::size_t> num_features;
};

/// Parses the svmlight-style multi-label text format:
///   [N_instances N_features N_labels]      optional header
///   lab1,lab2,... idx:val idx:val ...      one instance per line
/// `#` starts a comment line; LF and CRLF endings are accepted.
MultiLabelDataset read_dataset(std::istream& in, const LoadOptions& options = {});
MultiLabelDataset load_dataset(const std::string& path, const LoadOptions& options = {});

/// Writes the canonical form: header line, then one instance per line with
/// label names and values printed at round-trip precision.
void write_dataset(std::ostream& out, const MultiLabelDataset& ds);
void save_dataset(const std::string& path, const MultiLabelDataset& ds);

/// Sidecar label-name file: one name per line, line i names id i.
LabelVocabulary load_vocabulary(const std::string& path);
void save_vocabulary(const std::string& path, const LabelVocabulary& vocab);

DatasetStats compute_stats(const MultiLabelDataset& ds);

/// Indices of the instances carrying at least one label of `subset`, in dataset order.
std::vector<std::size_t> filter_indices(const MultiLabelDataset& ds, std::span<const LabelId> subset);

/// The instances carrying at least one label of `subset`. Label sets are kept whole.
MultiLabelDataset filter_by_labels(const MultiLabelDataset& ds, std::span<const LabelId> subset);

/// Per-label positive counts.
std::vector<std::size_t> label_frequencies(const MultiLabelDataset& ds);

}  // namespace homer
