#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nigrid/csv.hpp"
#include "nigrid/experiment.hpp"
#include "nigrid/scenario_io.hpp"
#include "nigrid/sweep.hpp"

namespace {

// exit codes shared with the test harness
constexpr int kOk = 0;
constexpr int kValidationFailure = 1;
constexpr int kDivergence = 2;
constexpr int kInconclusive = 3;

struct CommonOptions {
    std::optional<double> dt;
    std::optional<double> horizon;
    std::optional<double> tolerance;
    std::uint64_t seed = 2024;
    std::string out;
};

void add_common_flags(CLI::App* cmd, CommonOptions& options) {
    cmd->add_option("--dt", options.dt, "Override the integration step [s]");
    cmd->add_option("--horizon", options.horizon, "Override the simulation horizon [s]");
    cmd->add_option("--tolerance", options.tolerance, "Override the consensus tolerance");
    cmd->add_option("--seed", options.seed, "Seed for sampled checks");
}

nigrid::RunConfig make_config(const nigrid::GridScenario& scenario,
                              const CommonOptions& options) {
    nigrid::RunConfig config = nigrid::RunConfig::from(scenario.sim);
    if (options.dt) config.dt = *options.dt;
    if (options.horizon) config.horizon = *options.horizon;
    if (options.tolerance) config.consensus_tolerance = *options.tolerance;
    config.seed = options.seed;
    return config;
}

std::optional<nigrid::GridScenario> load_or_complain(const std::string& path,
                                                     const nigrid::ParseResult& parsed) {
    for (const nigrid::Diagnostic& diag : parsed.diagnostics) {
        std::cerr << path << ": " << (diag.path.empty() ? "" : diag.path + ": ")
                  << diag.message << "\n";
    }
    if (!parsed.ok()) return std::nullopt;
    for (const std::string& warning : parsed.equilibrium.warnings) {
        std::cerr << path << ": warning: " << warning << "\n";
    }
    return parsed.scenario;
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
    std::ofstream file(path, std::ios::binary);
    if (!file) throw nigrid::Error("cannot write " + path.string());
    file << contents;
}

int cmd_validate(const std::string& path) {
    const nigrid::ParseResult parsed = nigrid::load_scenario(path);
    const auto scenario = load_or_complain(path, parsed);
    if (!scenario) return kValidationFailure;
    std::cout << "valid: " << scenario->buses.size() << " buses, " << scenario->lines.size()
              << " lines, " << scenario->battery_edges.size()
              << " battery edges; equilibrium residual " << parsed.equilibrium.residual << "\n";
    return kOk;
}

int cmd_simulate(const std::string& path, const CommonOptions& options) {
    const auto scenario = load_or_complain(path, nigrid::load_scenario(path));
    if (!scenario) return kValidationFailure;
    const nigrid::RunConfig config = make_config(*scenario, options);

    nigrid::Trajectory traj;
    const nigrid::RunReport report = nigrid::run_experiment(*scenario, config, &traj);

    const std::filesystem::path out_dir = options.out.empty() ? "." : options.out;
    std::filesystem::create_directories(out_dir);
    const std::string stem = std::filesystem::path(path).stem().string();
    const std::filesystem::path csv_path = out_dir / (stem + "_trajectory.csv");
    const std::filesystem::path report_path = out_dir / (stem + "_report.json");

    write_file(csv_path, nigrid::trajectory_csv(*scenario, traj));
    write_file(report_path, nigrid::report_to_json(report).dump(2) + "\n");

    std::cout << "wrote " << csv_path.string() << " (" << traj.size() << " samples)\n";
    std::cout << "wrote " << report_path.string() << "\n";
    std::cout << "consensus: " << (report.consensus.achieved ? "achieved" : "not achieved")
              << ", final max pairwise gap " << report.consensus.final_max_pairwise_gap << "\n";
    return kOk;
}

int check_dissipation_suite(const nigrid::GridScenario& scenario,
                            const nigrid::RunReport& report) {
    int exit_code = kOk;
    for (std::size_t i = 0; i < scenario.buses.size(); ++i) {
        if (scenario.buses[i].damping == 0.0) {
            std::cout << "dissipation: bus " << (i + 1)
                      << " has D = 0; the output-strict claim needs D > 0 [fail]\n";
            exit_code = kValidationFailure;
        }
    }
    for (std::size_t i = 0; i < report.plant_dissipation.size(); ++i) {
        const nigrid::DissipationReport& entry = report.plant_dissipation[i];
        std::cout << "dissipation: plant " << (i + 1) << " max violation "
                  << entry.max_violation << " [" << to_string(entry.verdict) << "]\n";
        if (!entry.passed()) exit_code = kValidationFailure;
    }
    for (std::size_t l = 0; l < report.controller_dissipation.size(); ++l) {
        const nigrid::DissipationReport& entry = report.controller_dissipation[l];
        std::cout << "dissipation: controller " << (l + 1) << " max violation "
                  << entry.max_violation << " [" << to_string(entry.verdict) << "]\n";
        if (!entry.passed()) exit_code = kValidationFailure;
    }
    return exit_code;
}

int check_lyapunov_suite(const nigrid::GridScenario& scenario, const nigrid::RunReport& report,
                         std::uint64_t seed) {
    int exit_code = kOk;
    std::cout << "lyapunov: max step increase " << report.lyapunov.max_step_increase
              << " (tolerance " << report.lyapunov.tolerance << ") ["
              << to_string(report.lyapunov.verdict) << "]\n";
    if (report.lyapunov.verdict != nigrid::Verdict::pass) exit_code = kValidationFailure;

    // sampled positive definiteness over a box around the equilibrium
    const nigrid::InterconnectedSystem sys = nigrid::assemble_grid_system(scenario);
    const std::size_t n = scenario.buses.size();
    std::vector<int> battery_lines;
    for (const auto& [index, _] : scenario.battery_edges) battery_lines.push_back(index);

    nigrid::DomainBox box;
    for (std::size_t i = 0; i < 2 * n; ++i) box.intervals.push_back({-0.5, 0.5});
    for (std::size_t b = 0; b < scenario.battery_edges.size(); ++b) {
        box.intervals.push_back({-0.5, 0.5});
    }
    const Eigen::Index np = sys.plant_state_dim();
    auto evaluator = [&](const nigrid::Vector& point) {
        return nigrid::eval_lyapunov_networked(sys, point.head(np), point.tail(point.size() - np),
                                               1e-4)
            .value;
    };
    auto predicate = [&](const nigrid::Vector& point) {
        std::vector<double> angle_devs(n);
        for (std::size_t i = 0; i < n; ++i) angle_devs[i] = point[2 * i + 1];
        const nigrid::DomainReport membership =
            nigrid::domain_membership(scenario, angle_devs, battery_lines);
        return membership.in_d1 && membership.in_d2;
    };
    const nigrid::DomainSampleReport sampled = nigrid::sample_positive_definiteness(
        evaluator, box, predicate, nigrid::SamplingPlan{5, 200}, seed);
    std::cout << "lyapunov: sampled positive definiteness over " << sampled.samples
              << " in-domain points, min " << sampled.min_value << " ["
              << to_string(sampled.verdict) << "]\n";
    if (sampled.verdict == nigrid::Verdict::fail) {
        exit_code = kValidationFailure;
    } else if (sampled.verdict == nigrid::Verdict::inconclusive && exit_code == kOk) {
        exit_code = kInconclusive;
    }
    return exit_code;
}

int check_domain_suite(const nigrid::GridScenario& scenario, const nigrid::RunReport& report) {
    const nigrid::DomainReport& domain = report.domain;
    std::cout << "domain: in_D1 " << (domain.in_d1 ? "yes" : "no") << ", in_D2 "
              << (domain.in_d2 ? "yes" : "no") << ", D2 sum " << domain.d2_sum << "\n";
    if (!domain.in_d1 && domain.first_d1_violation >= 0) {
        const nigrid::Line& line =
            scenario.lines[static_cast<std::size_t>(domain.first_d1_violation)];
        const double pi = 3.14159265358979323846;
        std::cout << "domain: line " << (domain.first_d1_violation + 1)
                  << " angle deviation outside D1 interval ("
                  << (-pi - 2.0 * line.equilibrium_angle) << ", "
                  << (pi - 2.0 * line.equilibrium_angle) << ")\n";
    }
    return (domain.in_d1 && domain.in_d2) ? kOk : kValidationFailure;
}

int cmd_check(const std::string& path, const std::string& which, const CommonOptions& options) {
    const auto scenario = load_or_complain(path, nigrid::load_scenario(path));
    if (!scenario) return kValidationFailure;
    const nigrid::RunConfig config = make_config(*scenario, options);
    const nigrid::RunReport report = nigrid::run_experiment(*scenario, config);

    int exit_code = kOk;
    auto merge = [&](int code) {
        if (code == kValidationFailure || exit_code == kValidationFailure) {
            exit_code = kValidationFailure;
        } else if (code != kOk) {
            exit_code = code;
        }
    };
    if (which == "dissipation" || which == "all") {
        merge(check_dissipation_suite(*scenario, report));
    }
    if (which == "lyapunov" || which == "all") {
        merge(check_lyapunov_suite(*scenario, report, options.seed));
    }
    if (which == "domain" || which == "all") {
        merge(check_domain_suite(*scenario, report));
    }
    std::cout << (exit_code == kOk ? "all checks passed"
                  : exit_code == kInconclusive ? "checks inconclusive"
                                               : "checks failed")
              << "\n";
    return exit_code;
}

int cmd_sweep(const std::string& path, const std::string& spec, const std::string& values_text,
              const CommonOptions& options) {
    const auto scenario = load_or_complain(path, nigrid::load_scenario(path));
    if (!scenario) return kValidationFailure;

    std::vector<double> values;
    std::stringstream stream(values_text);
    std::string item;
    while (std::getline(stream, item, ',')) {
        if (item.empty()) continue;
        values.push_back(std::stod(item));
    }

    const nigrid::RunConfig config = make_config(*scenario, options);
    const std::vector<nigrid::SweepPoint> points =
        nigrid::run_sweep(*scenario, spec, values, config);
    const std::string table = nigrid::sweep_csv(points);
    if (options.out.empty()) {
        std::cout << table;
    } else {
        write_file(options.out, table);
        std::cout << "wrote " << options.out << " (" << points.size() << " rows)\n";
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Networked negative-imaginary grid studies"};
    app.require_subcommand(1);

    std::string scenario_path;
    std::string which = "all";
    std::string param_spec;
    std::string values_text;
    CommonOptions options;

    CLI::App* validate = app.add_subcommand("validate", "Check a scenario file");
    validate->add_option("scenario", scenario_path, "Scenario JSON file")->required();

    CLI::App* simulate =
        app.add_subcommand("simulate", "Run a scenario and write trajectory CSV + run report");
    simulate->add_option("scenario", scenario_path, "Scenario JSON file")->required();
    simulate->add_option("--out", options.out, "Output directory (default: current)");
    add_common_flags(simulate, options);

    CLI::App* check = app.add_subcommand("check", "Run certificate suites");
    check->add_option("scenario", scenario_path, "Scenario JSON file")->required();
    check->add_option("--which", which, "dissipation|lyapunov|domain|all")
        ->check(CLI::IsMember({"dissipation", "lyapunov", "domain", "all"}));
    add_common_flags(check, options);

    CLI::App* sweep = app.add_subcommand("sweep", "Sweep one scenario parameter");
    sweep->add_option("scenario", scenario_path, "Scenario JSON file")->required();
    sweep->add_option("--param", param_spec, "Parameter spec, e.g. initial[1].delta_dev")
        ->required();
    sweep->add_option("--values", values_text, "Comma-separated values")->required();
    sweep->add_option("--out", options.out, "Summary CSV path (default: stdout)");
    add_common_flags(sweep, options);

    CLI11_PARSE(app, argc, argv);

    try {
        if (validate->parsed()) return cmd_validate(scenario_path);
        if (simulate->parsed()) return cmd_simulate(scenario_path, options);
        if (check->parsed()) return cmd_check(scenario_path, which, options);
        if (sweep->parsed()) return cmd_sweep(scenario_path, param_spec, values_text, options);
    } catch (const nigrid::DivergenceError& err) {
        std::cerr << "divergence: " << err.what() << " (t = " << err.first_bad_time() << ")\n";
        return kDivergence;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kValidationFailure;
    }
    return kOk;
}
