#pragma once

#include <string>
#include <vector>

#include "gsmp/model.hpp"

namespace gsmp {

struct ExpectedProperty {
  std::string property;
  std::string value;
  std::string provenance;
};

struct NamedModel {
  std::string key;
  ModelParts parts;
  GsmpModel model;
  std::string provenance;
  std::vector<ExpectedProperty> expected;
};

// Built-in catalog; throws std::out_of_range for unknown keys.
const NamedModel& get_model(const std::string& key);
std::vector<std::string> model_keys();

}  // namespace gsmp
