#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "gsmp/model.hpp"

namespace gsmp {

struct ParseError : std::runtime_error {
  ParseError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line(line) {}
  int line;
};

// Parses the model text format (see docs/model-format.md). Unknown sections
// and keys are rejected; the result still has to pass validate_model.
ModelParts parse_model(std::string_view text);
ModelParts parse_model_file(const std::string& path);

// Canonical serialization; parse_model(serialize_model(p)) == p for any
// parts that validate cleanly.
std::string serialize_model(const ModelParts& parts);

}  // namespace gsmp
