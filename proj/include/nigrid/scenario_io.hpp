#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nigrid/grid.hpp"

namespace nigrid {

/// One field-addressed problem found while reading a scenario file, e.g.
/// {"buses[2].M", "must be > 0"}.
struct Diagnostic {
    std::string path;
    std::string message;
};

struct ParseResult {
    std::optional<GridScenario> scenario;  // finalized via compute_equilibrium when set
    EquilibriumReport equilibrium;
    std::vector<Diagnostic> diagnostics;

    bool ok() const { return scenario.has_value() && diagnostics.empty(); }
};

/// Parses and validates a scenario document. The schema is strict: unknown
/// fields are rejected, every constraint violation is reported with the
/// offending field path, and JSON syntax errors carry a line number.
ParseResult parse_scenario(const std::string& text);

ParseResult load_scenario(const std::string& path);

/// Canonical JSON form of the scenario inputs (derived quantities are not
/// serialized; parsing the result reproduces the scenario field for field).
nlohmann::json scenario_to_json(const GridScenario& scenario);

std::string serialize_scenario(const GridScenario& scenario);

/// FNV-1a over the canonical serialization.
std::uint64_t scenario_hash(const GridScenario& scenario);

}  // namespace nigrid
