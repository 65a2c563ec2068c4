#pragma once

#include <string>

#include "hvlab/discrete_model.hpp"

namespace hvlab {

// Load a model file (schema documented in docs/model-schema.md). Throws
// ParseError for unreadable/undecodable files and ValidationError (naming
// the offending table and row) for well-formed files with bad tables.
DiscreteModel load_model(const std::string& path);

// Parse model JSON text; `origin` labels error messages.
DiscreteModel parse_model(const std::string& json_text, const std::string& origin);

// Serialize to the same schema. Diagonal-uniform local joints and
// delta-at-a kernels are written in their structured forms.
std::string serialize_model(const DiscreteModel& model);

void save_model(const DiscreteModel& model, const std::string& path);

}  // namespace hvlab
