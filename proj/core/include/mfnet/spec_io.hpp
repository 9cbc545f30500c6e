#pragma once

// JSON configuration documents for NetworkSpec. Schema: docs/config_schema.md.

#include <filesystem>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "mfnet/model.hpp"

namespace mfnet {

/// Malformed document: missing key, wrong type or unknown kind. The message
/// names the offending field path.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

nlohmann::json to_json(const Sigmoid& s);
nlohmann::json to_json(const InputSignal& s);
nlohmann::json to_json(const NetworkSpec& spec);

Sigmoid sigmoid_from_json(const nlohmann::json& j, const std::string& path = "sigmoid");
InputSignal input_from_json(const nlohmann::json& j, const std::string& path = "input");

/// Structural parse only; call validate_spec for the invariants.
NetworkSpec spec_from_json(const nlohmann::json& j);

NetworkSpec load_spec(const std::filesystem::path& path);

}  // namespace mfnet
