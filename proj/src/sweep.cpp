#include "nigrid/sweep.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace nigrid {

namespace {

struct ParsedSpec {
    std::string section;
    int index = 0;  // 1-based as written
    std::string field;
};

ParsedSpec parse_spec(const std::string& spec) {
    const auto open = spec.find('[');
    const auto close = spec.find(']');
    const auto dot = spec.find('.', close == std::string::npos ? 0 : close);
    if (open == std::string::npos || close == std::string::npos || dot == std::string::npos ||
        !(open < close && close < dot) || dot + 1 >= spec.size()) {
        throw InvalidInputError("parameter spec must look like section[index].field: " + spec);
    }
    ParsedSpec parsed;
    parsed.section = spec.substr(0, open);
    try {
        std::size_t used = 0;
        const std::string digits = spec.substr(open + 1, close - open - 1);
        parsed.index = std::stoi(digits, &used);
        if (used != digits.size()) throw std::invalid_argument(digits);
    } catch (const std::exception&) {
        throw InvalidInputError("parameter spec has a non-numeric index: " + spec);
    }
    parsed.field = spec.substr(dot + 1);
    return parsed;
}

}  // namespace

GridScenario apply_parameter(const GridScenario& scenario, const std::string& spec,
                             double value) {
    GridScenario modified = scenario;

    if (spec == "battery_line") {
        if (modified.battery_edges.size() != 1) {
            throw InvalidInputError("battery_line sweep requires exactly one battery edge");
        }
        const BatteryParams params = modified.battery_edges.begin()->second;
        const int target = static_cast<int>(std::llround(value)) - 1;
        if (target < 0 || target >= static_cast<int>(modified.lines.size())) {
            throw InvalidInputError("battery_line sweep value selects a missing line");
        }
        modified.battery_edges.clear();
        modified.battery_edges[target] = params;
        compute_equilibrium(modified);
        return modified;
    }

    const ParsedSpec parsed = parse_spec(spec);
    const std::size_t slot = static_cast<std::size_t>(parsed.index - 1);

    if (parsed.section == "buses" || parsed.section == "initial") {
        if (parsed.index < 1 || slot >= modified.buses.size()) {
            throw InvalidInputError("parameter spec references a missing bus: " + spec);
        }
    }

    if (parsed.section == "buses") {
        Bus& bus = modified.buses[slot];
        if (parsed.field == "M") bus.inertia = value;
        else if (parsed.field == "D") bus.damping = value;
        else if (parsed.field == "E0") bus.internal_voltage = value;
        else if (parsed.field == "P_L") bus.load = value;
        else if (parsed.field == "P_ST") bus.battery_baseline = value;
        else throw InvalidInputError("unknown bus field in parameter spec: " + spec);
    } else if (parsed.section == "initial") {
        if (parsed.field == "delta_dev") modified.initial_angle_dev[slot] = value;
        else if (parsed.field == "freq_dev") modified.initial_freq_dev[slot] = value;
        else throw InvalidInputError("unknown initial field in parameter spec: " + spec);
    } else if (parsed.section == "lines") {
        if (parsed.index < 1 || slot >= modified.lines.size()) {
            throw InvalidInputError("parameter spec references a missing line: " + spec);
        }
        Line& line = modified.lines[slot];
        if (parsed.field == "X") line.reactance = value;
        else if (parsed.field == "psi_bar") line.equilibrium_angle = value;
        else throw InvalidInputError("unknown line field in parameter spec: " + spec);
    } else if (parsed.section == "battery_edges") {
        const int line_index = parsed.index - 1;
        const auto entry = modified.battery_edges.find(line_index);
        if (entry == modified.battery_edges.end()) {
            throw InvalidInputError("parameter spec references a line without a battery: " + spec);
        }
        if (parsed.field == "tau") entry->second.tau = value;
        else if (parsed.field == "K1") entry->second.k1 = value;
        else if (parsed.field == "K2") entry->second.k2 = value;
        else throw InvalidInputError("unknown battery field in parameter spec: " + spec);
    } else {
        throw InvalidInputError("unknown section in parameter spec: " + spec);
    }

    compute_equilibrium(modified);
    return modified;
}

unsigned worker_count() {
    unsigned count = std::max(1u, std::thread::hardware_concurrency());
    if (const char* cap_text = std::getenv("NI_GRID_THREADS")) {
        const long cap = std::strtol(cap_text, nullptr, 10);
        if (cap >= 1) count = std::min<unsigned>(count, static_cast<unsigned>(cap));
    }
    return count;
}

std::vector<SweepPoint> run_sweep(const GridScenario& scenario, const std::string& spec,
                                  const std::vector<double>& values, const RunConfig& config) {
    std::vector<SweepPoint> points(values.size());
    if (values.empty()) return points;

    // scenario edits are validated up front so a bad spec fails fast
    std::vector<GridScenario> cases;
    cases.reserve(values.size());
    for (double value : values) cases.push_back(apply_parameter(scenario, spec, value));

    const unsigned workers =
        std::min<unsigned>(worker_count(), static_cast<unsigned>(values.size()));
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_lock;

    auto work = [&]() {
        while (true) {
            const std::size_t k = next.fetch_add(1);
            if (k >= values.size()) return;
            try {
                const RunReport report = run_experiment(cases[k], config);
                SweepPoint& point = points[k];
                point.value = values[k];
                point.consensus_achieved = report.consensus.achieved;
                if (report.consensus.settle_time) point.settle_time = *report.consensus.settle_time;
                point.min_w_hat = report.lyapunov.min_value;
                point.max_w_hat_step_increase = report.lyapunov.max_step_increase;
            } catch (...) {
                const std::lock_guard<std::mutex> guard(failure_lock);
                if (!failure) failure = std::current_exception();
                return;
            }
        }
    };

    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
        for (std::thread& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);
    return points;
}

std::string sweep_csv(const std::vector<SweepPoint>& points) {
    std::string out = "value,consensus_achieved,settle_time,min_W_hat,max_W_hat_step_increase\n";
    char buffer[160];
    for (const SweepPoint& point : points) {
        std::snprintf(buffer, sizeof(buffer), "%.17g,%d,%.17g,%.17g,%.17g\n", point.value,
                      point.consensus_achieved ? 1 : 0, point.settle_time, point.min_w_hat,
                      point.max_w_hat_step_increase);
        out += buffer;
    }
    return out;
}

}  // namespace nigrid
