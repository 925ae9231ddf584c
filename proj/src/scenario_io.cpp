#include "nigrid/scenario_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace nigrid {

namespace {

using nlohmann::json;

class Reader {
public:
    explicit Reader(std::vector<Diagnostic>& diagnostics) : diagnostics_(diagnostics) {}

    void report(const std::string& path, const std::string& message) {
        diagnostics_.push_back({path, message});
    }

    /// Rejects fields outside the allowed set.
    void check_keys(const json& object, const std::string& path,
                    const std::set<std::string>& allowed) {
        for (const auto& [key, _] : object.items()) {
            if (!allowed.count(key)) report(path.empty() ? key : path + "." + key, "unknown field");
        }
    }

    bool require_object(const json& value, const std::string& path) {
        if (!value.is_object()) {
            report(path, "expected an object");
            return false;
        }
        return true;
    }

    bool require_array(const json& value, const std::string& path) {
        if (!value.is_array()) {
            report(path, "expected an array");
            return false;
        }
        return true;
    }

    std::optional<double> number(const json& object, const std::string& path,
                                 const std::string& key, bool required,
                                 double fallback = 0.0) {
        if (!object.contains(key)) {
            if (required) {
                report(path + "." + key, "missing required field");
                return std::nullopt;
            }
            return fallback;
        }
        const json& value = object.at(key);
        if (!value.is_number()) {
            report(path + "." + key, "expected a number");
            return std::nullopt;
        }
        const double d = value.get<double>();
        if (!std::isfinite(d)) {
            report(path + "." + key, "must be finite");
            return std::nullopt;
        }
        return d;
    }

    std::optional<long long> integer(const json& object, const std::string& path,
                                     const std::string& key) {
        if (!object.contains(key)) {
            report(path + "." + key, "missing required field");
            return std::nullopt;
        }
        const json& value = object.at(key);
        if (!value.is_number_integer()) {
            report(path + "." + key, "expected an integer");
            return std::nullopt;
        }
        return value.get<long long>();
    }

private:
    std::vector<Diagnostic>& diagnostics_;
};

std::size_t line_of_offset(const std::string& text, std::size_t byte) {
    return 1 + static_cast<std::size_t>(
                   std::count(text.begin(), text.begin() + std::min(byte, text.size()), '\n'));
}

}  // namespace

ParseResult parse_scenario(const std::string& text) {
    ParseResult result;
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& err) {
        result.diagnostics.push_back(
            {"", "JSON parse error at line " + std::to_string(line_of_offset(text, err.byte)) +
                     ": " + err.what()});
        return result;
    }

    Reader reader(result.diagnostics);
    if (!reader.require_object(doc, "")) return result;
    reader.check_keys(doc, "",
                      {"buses", "lines", "battery_edges", "initial", "sim",
                       "nominal_frequency"});

    GridScenario scenario;

    // buses: ids must be exactly 1..N
    std::size_t bus_count = 0;
    if (!doc.contains("buses")) {
        reader.report("buses", "missing required field");
    } else if (reader.require_array(doc["buses"], "buses")) {
        const json& buses = doc["buses"];
        bus_count = buses.size();
        if (bus_count == 0) reader.report("buses", "must list at least one bus");
        scenario.buses.assign(bus_count, Bus{});
        std::set<long long> seen_ids;
        for (std::size_t i = 0; i < bus_count; ++i) {
            const std::string path = "buses[" + std::to_string(i) + "]";
            if (!reader.require_object(buses[i], path)) continue;
            reader.check_keys(buses[i], path, {"id", "M", "D", "E0", "P_L", "P_ST"});
            const auto id = reader.integer(buses[i], path, "id");
            std::size_t slot = i;
            if (id) {
                if (*id < 1 || *id > static_cast<long long>(bus_count)) {
                    reader.report(path + ".id",
                                  "bus ids must cover 1.." + std::to_string(bus_count));
                } else if (!seen_ids.insert(*id).second) {
                    reader.report(path + ".id", "duplicate bus id");
                } else {
                    slot = static_cast<std::size_t>(*id - 1);
                }
            }
            Bus bus;
            if (const auto v = reader.number(buses[i], path, "M", true)) bus.inertia = *v;
            if (const auto v = reader.number(buses[i], path, "D", true)) bus.damping = *v;
            if (const auto v = reader.number(buses[i], path, "E0", true)) bus.internal_voltage = *v;
            if (const auto v = reader.number(buses[i], path, "P_L", true)) bus.load = *v;
            if (const auto v = reader.number(buses[i], path, "P_ST", false, 0.0)) {
                bus.battery_baseline = *v;
            }
            if (!(bus.inertia > 0.0)) reader.report(path + ".M", "must be > 0");
            if (bus.damping < 0.0) reader.report(path + ".D", "must be >= 0");
            if (!(bus.internal_voltage > 0.0)) reader.report(path + ".E0", "must be > 0");
            scenario.buses[slot] = bus;
        }
    }

    auto bus_index = [&](const json& object, const std::string& path,
                         const std::string& key) -> std::optional<int> {
        const auto id = reader.integer(object, path, key);
        if (!id) return std::nullopt;
        if (*id < 1 || *id > static_cast<long long>(bus_count)) {
            reader.report(path + "." + key, "references a missing bus id");
            return std::nullopt;
        }
        return static_cast<int>(*id - 1);
    };

    std::size_t line_count = 0;
    if (!doc.contains("lines")) {
        reader.report("lines", "missing required field");
    } else if (reader.require_array(doc["lines"], "lines")) {
        const json& lines = doc["lines"];
        line_count = lines.size();
        for (std::size_t l = 0; l < line_count; ++l) {
            const std::string path = "lines[" + std::to_string(l) + "]";
            if (!reader.require_object(lines[l], path)) continue;
            reader.check_keys(lines[l], path, {"from", "to", "X", "psi_bar"});
            Line line;
            if (const auto v = bus_index(lines[l], path, "from")) line.from = *v;
            if (const auto v = bus_index(lines[l], path, "to")) line.to = *v;
            if (const auto v = reader.number(lines[l], path, "X", true)) line.reactance = *v;
            if (const auto v = reader.number(lines[l], path, "psi_bar", true)) {
                line.equilibrium_angle = *v;
            }
            if (!(line.reactance > 0.0)) reader.report(path + ".X", "must be > 0");
            if (line.from == line.to) reader.report(path, "line endpoints must differ");
            scenario.lines.push_back(line);
        }
    }

    if (doc.contains("battery_edges")) {
        if (reader.require_array(doc["battery_edges"], "battery_edges")) {
            const json& batteries = doc["battery_edges"];
            for (std::size_t b = 0; b < batteries.size(); ++b) {
                const std::string path = "battery_edges[" + std::to_string(b) + "]";
                if (!reader.require_object(batteries[b], path)) continue;
                reader.check_keys(batteries[b], path, {"line_index", "tau", "K1", "K2"});
                int index = -1;
                if (const auto v = reader.integer(batteries[b], path, "line_index")) {
                    if (*v < 1 || *v > static_cast<long long>(line_count)) {
                        reader.report(path + ".line_index", "references a missing line");
                    } else {
                        index = static_cast<int>(*v - 1);
                    }
                }
                BatteryParams params;
                if (const auto v = reader.number(batteries[b], path, "tau", true)) params.tau = *v;
                if (const auto v = reader.number(batteries[b], path, "K1", true)) params.k1 = *v;
                if (const auto v = reader.number(batteries[b], path, "K2", true)) params.k2 = *v;
                if (!(params.tau > 0.0)) reader.report(path + ".tau", "must be > 0");
                if (!(params.k1 > 0.0)) reader.report(path + ".K1", "must be > 0");
                if (!(params.k2 > params.k1)) {
                    reader.report(path + ".K2", "battery design requires K2 > K1");
                }
                if (index >= 0) {
                    if (scenario.battery_edges.count(index)) {
                        reader.report(path + ".line_index", "line already carries a battery");
                    }
                    scenario.battery_edges[index] = params;
                }
            }
        }
    }

    scenario.initial_angle_dev.assign(bus_count, 0.0);
    scenario.initial_freq_dev.assign(bus_count, 0.0);
    if (doc.contains("initial")) {
        if (reader.require_array(doc["initial"], "initial")) {
            const json& initial = doc["initial"];
            std::set<int> seen;
            for (std::size_t e = 0; e < initial.size(); ++e) {
                const std::string path = "initial[" + std::to_string(e) + "]";
                if (!reader.require_object(initial[e], path)) continue;
                reader.check_keys(initial[e], path, {"bus", "delta_dev", "freq_dev"});
                const auto index = bus_index(initial[e], path, "bus");
                if (!index) continue;
                if (!seen.insert(*index).second) {
                    reader.report(path + ".bus", "duplicate initial condition for bus");
                    continue;
                }
                if (const auto v = reader.number(initial[e], path, "delta_dev", false, 0.0)) {
                    scenario.initial_angle_dev[static_cast<std::size_t>(*index)] = *v;
                }
                if (const auto v = reader.number(initial[e], path, "freq_dev", false, 0.0)) {
                    scenario.initial_freq_dev[static_cast<std::size_t>(*index)] = *v;
                }
            }
        }
    }

    if (doc.contains("sim")) {
        if (reader.require_object(doc["sim"], "sim")) {
            reader.check_keys(doc["sim"], "sim", {"T", "dt", "consensus_tol"});
            if (const auto v = reader.number(doc["sim"], "sim", "T", false, scenario.sim.horizon)) {
                scenario.sim.horizon = *v;
            }
            if (const auto v = reader.number(doc["sim"], "sim", "dt", false, scenario.sim.dt)) {
                scenario.sim.dt = *v;
            }
            if (const auto v = reader.number(doc["sim"], "sim", "consensus_tol", false,
                                             scenario.sim.consensus_tolerance)) {
                scenario.sim.consensus_tolerance = *v;
            }
            if (!(scenario.sim.dt > 0.0)) reader.report("sim.dt", "must be > 0");
            if (!(scenario.sim.horizon >= scenario.sim.dt)) {
                reader.report("sim.T", "must be >= sim.dt");
            }
            if (!(scenario.sim.consensus_tolerance > 0.0)) {
                reader.report("sim.consensus_tol", "must be > 0");
            }
        }
    }

    if (doc.contains("nominal_frequency")) {
        json wrapper = json::object();
        wrapper["nominal_frequency"] = doc["nominal_frequency"];
        if (const auto v =
                reader.number(wrapper, "", "nominal_frequency", false, scenario.nominal_frequency)) {
            if (!(*v > 0.0)) {
                reader.report("nominal_frequency", "must be > 0");
            } else {
                scenario.nominal_frequency = *v;
            }
        }
    }

    if (!result.diagnostics.empty()) return result;

    try {
        result.equilibrium = compute_equilibrium(scenario);
    } catch (const Error& err) {
        result.diagnostics.push_back({"", err.what()});
        return result;
    }
    result.scenario = std::move(scenario);
    return result;
}

ParseResult load_scenario(const std::string& path) {
    std::ifstream file(path);
    if (!file) {
        ParseResult result;
        result.diagnostics.push_back({"", "cannot open file: " + path});
        return result;
    }
    std::ostringstream buffer;
    buffer << file.rdbuf();
    return parse_scenario(buffer.str());
}

nlohmann::json scenario_to_json(const GridScenario& scenario) {
    json doc;
    doc["buses"] = json::array();
    for (std::size_t i = 0; i < scenario.buses.size(); ++i) {
        const Bus& bus = scenario.buses[i];
        json entry;
        entry["id"] = i + 1;
        entry["M"] = bus.inertia;
        entry["D"] = bus.damping;
        entry["E0"] = bus.internal_voltage;
        entry["P_L"] = bus.load;
        if (bus.battery_baseline != 0.0) entry["P_ST"] = bus.battery_baseline;
        doc["buses"].push_back(entry);
    }
    doc["lines"] = json::array();
    for (const Line& line : scenario.lines) {
        json entry;
        entry["from"] = line.from + 1;
        entry["to"] = line.to + 1;
        entry["X"] = line.reactance;
        entry["psi_bar"] = line.equilibrium_angle;
        doc["lines"].push_back(entry);
    }
    if (!scenario.battery_edges.empty()) {
        doc["battery_edges"] = json::array();
        for (const auto& [index, params] : scenario.battery_edges) {
            json entry;
            entry["line_index"] = index + 1;
            entry["tau"] = params.tau;
            entry["K1"] = params.k1;
            entry["K2"] = params.k2;
            doc["battery_edges"].push_back(entry);
        }
    }
    json initial = json::array();
    for (std::size_t i = 0; i < scenario.buses.size(); ++i) {
        const double angle =
            i < scenario.initial_angle_dev.size() ? scenario.initial_angle_dev[i] : 0.0;
        const double freq =
            i < scenario.initial_freq_dev.size() ? scenario.initial_freq_dev[i] : 0.0;
        if (angle == 0.0 && freq == 0.0) continue;
        json entry;
        entry["bus"] = i + 1;
        entry["delta_dev"] = angle;
        entry["freq_dev"] = freq;
        initial.push_back(entry);
    }
    if (!initial.empty()) doc["initial"] = initial;
    doc["sim"] = {{"T", scenario.sim.horizon},
                  {"dt", scenario.sim.dt},
                  {"consensus_tol", scenario.sim.consensus_tolerance}};
    doc["nominal_frequency"] = scenario.nominal_frequency;
    return doc;
}

std::string serialize_scenario(const GridScenario& scenario) {
    return scenario_to_json(scenario).dump(2);
}

std::uint64_t scenario_hash(const GridScenario& scenario) {
    const std::string text = serialize_scenario(scenario);
    std::uint64_t hash = 1469598103934665603ull;
    for (unsigned char c : text) {
        hash ^= c;
        hash *= 1099511628211ull;
    }
    return hash;
}

}  // namespace nigrid
