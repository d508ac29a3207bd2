#pragma once

#include <optional>
#include <string>

#include <behavsteg/auditor.hpp>
#include <behavsteg/config.hpp>
#include <behavsteg/simulator.hpp>

namespace behavsteg::cli {

/// Loads `path` (empty = no file) and rejects keys no command understands.
KeyValueConfig load_config(const std::string& path);

AuditConfig audit_config_from(const KeyValueConfig& cfg);
PopulationSpec population_spec_from(const KeyValueConfig& cfg);
std::optional<double> percentile_from(const KeyValueConfig& cfg);

}  // namespace behavsteg::cli
