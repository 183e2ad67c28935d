#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>

#include "homer/learner.hpp"

namespace homer {

inline constexpr int kModelFormatVersion = 1;

/// Unreadable, unknown-version or inconsistent model files.
class ModelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// JSON model: header (format, version, params, vocabulary and its hash,
/// feature count, training label frequencies), then the tree with each node's
/// models as sparse [[feature_id, weight], ...] lists plus bias. Doubles are
/// written at 17 significant digits so load(save(m)) == m exactly.
void write_model(std::ostream& out, const HomerModel& model);
HomerModel read_model(std::istream& in);

void save_model(const std::string& path, const HomerModel& model);
HomerModel load_model(const std::string& path);

}  // namespace homer
