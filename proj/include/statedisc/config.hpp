#pragma once

#include <string>

#include "json.hpp"
#include "statedisc/experiment.hpp"

namespace statedisc {

// Parses the JSON config schema documented in the README. Collects every
// problem (with its field path) before throwing a ValidationError, so a bad
// config reports all of its mistakes at once.
ExperimentSpec parse_experiment_spec(const std::string& json_text);

// Reads and parses a config file; I/O failures name the path.
ExperimentSpec load_experiment_spec(const std::string& path);

nlohmann::json distribution_to_json(const ParamDistribution& dist);

// Parses a single distribution descriptor; throws ValidationError with
// `path`-prefixed messages on problems.
ParamDistribution distribution_from_json(const nlohmann::json& value,
                                         const std::string& path);

std::optional<OptimizerKind> optimizer_from_name(const std::string& name);

nlohmann::json experiment_spec_to_json(const ExperimentSpec& spec);

}  // namespace statedisc
