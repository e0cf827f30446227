// migsim: service migration policy engine and simulator CLI.
//
// Subcommands: solve-1d, solve-2d, sweep, fit, simulate. Every command
// reads a sectioned key-value config file, writes plot-ready CSV/JSON
// artifacts plus a run manifest into --out, and is deterministic given
// (config, seed). Set MIGSIM_LOG=quiet|info|debug for verbosity.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "migsim/baselines.hpp"
#include "migsim/config.hpp"
#include "migsim/cost_model.hpp"
#include "migsim/distance_mdp.hpp"
#include "migsim/hex_mdp.hpp"
#include "migsim/io.hpp"
#include "migsim/simulator.hpp"
#include "migsim/trace.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace migsim;

namespace {

enum ExitCode {
    exit_ok = 0,
    exit_failure = 1,
    exit_validation = 2,
    exit_io = 3,
    exit_convergence = 4,
    exit_degenerate = 5,
};

int log_level() {
    const char* env = std::getenv("MIGSIM_LOG");
    if (!env) return 1;
    const std::string level(env);
    if (level == "quiet") return 0;
    if (level == "debug") return 2;
    return 1;
}

void log_info(const std::string& msg) {
    if (log_level() >= 1) std::cerr << "migsim: " << msg << "\n";
}

void log_debug(const std::string& msg) {
    if (log_level() >= 2) std::cerr << "migsim[debug]: " << msg << "\n";
}

struct CommonOpts {
    std::string config_path;
    std::string out_dir = ".";
    std::string format = "csv";
    std::uint64_t seed = 0;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "run configuration file")->required();
    cmd->add_option("--out", opts.out_dir, "output directory (created if missing)");
    cmd->add_option("--format", opts.format, "table output format")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--seed", opts.seed, "random seed for simulation commands");
}

fs::path prepare_out(const CommonOpts& opts) {
    fs::path dir(opts.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir.string());
    return dir;
}

template <typename F>
auto timed_ms(F&& f, double& ms) {
    const auto start = std::chrono::steady_clock::now();
    auto result = f();
    ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return result;
}

ConstPlusExpCost migration_cost_from(const ConfigFile& config) {
    return {config.get_double("costs", "beta_c"), config.get_double("costs", "beta_l"),
            config.get_double("costs", "mu")};
}

ConstPlusExpCost transmission_cost_from(const ConfigFile& config) {
    return {config.get_double("costs", "delta_c"), config.get_double("costs", "delta_l"),
            config.get_double("costs", "theta")};
}

DistanceMdpSpec distance_spec_from(const ConfigFile& config) {
    DistanceMdpSpec spec;
    spec.n_max = config.get_int("mdp", "n_max");
    spec.gamma = config.get_double("mdp", "gamma");
    if (config.has("mdp", "r1")) {
        const double r1 = config.get_double("mdp", "r1");
        spec.p = r1;
        spec.q = r1;
        spec.p0 = 2.0 * r1;
    } else {
        spec.p0 = config.get_double("mdp", "p0");
        spec.p = config.get_double("mdp", "p");
        spec.q = config.get_double("mdp", "q");
    }
    spec.migration_cost = migration_cost_from(config);
    spec.transmission_cost = transmission_cost_from(config);
    spec.require_valid();
    return spec;
}

HexMdpSpec hex_spec_from(const ConfigFile& config) {
    HexMdpSpec spec;
    spec.n_max = config.get_int("hex", "n_max");
    spec.move_prob = config.get_double("hex", "r");
    spec.gamma = config.get_double("hex", "gamma");
    spec.migration_cost = migration_cost_from(config);
    spec.transmission_cost = transmission_cost_from(config);
    spec.require_valid();
    return spec;
}

json cost_json(const ConstPlusExpCost& c) {
    return {{"const_term", c.const_term}, {"lin_term", c.lin_term}, {"base", c.base}};
}

json spec_json(const DistanceMdpSpec& spec) {
    return {{"n_max", spec.n_max}, {"p0", spec.p0},       {"p", spec.p},
            {"q", spec.q},         {"gamma", spec.gamma}, {"migration_cost", cost_json(spec.migration_cost)},
            {"transmission_cost", cost_json(spec.transmission_cost)}};
}

json spec_json(const HexMdpSpec& spec) {
    return {{"n_max", spec.n_max},
            {"r", spec.move_prob},
            {"gamma", spec.gamma},
            {"migration_cost", cost_json(spec.migration_cost)},
            {"transmission_cost", cost_json(spec.transmission_cost)}};
}

void write_manifest(const fs::path& dir, json manifest, const CommonOpts& opts) {
    manifest["config"] = opts.config_path;
    manifest["seed"] = opts.seed;
    manifest["format"] = opts.format;
    write_json_file(dir / "manifest.json", manifest);
}

// ---------------------------------------------------------------- solve-1d

int cmd_solve_1d(const CommonOpts& opts) {
    const ConfigFile config = ConfigFile::load(opts.config_path);
    const DistanceMdpSpec spec = distance_spec_from(config);
    const fs::path out = prepare_out(opts);

    double solve_ms = 0.0;
    const SolveResult1D solution = timed_ms([&] { return modified_policy_iteration(spec); }, solve_ms);
    log_info("solve-1d converged in " + std::to_string(solution.iterations) + " iterations, " +
             std::to_string(solve_ms) + " ms");

    const auto policy_path =
        table_policy_values_1d(solution.policy, solution.values).write(out, "policy", opts.format);
    const auto values_path = table_values_1d(solution.values).write(out, "values", opts.format);
    write_spec_config(out / "spec.ini", spec);

    write_manifest(out,
                   {{"command", "solve-1d"},
                    {"spec", spec_json(spec)},
                    {"iterations", solution.iterations},
                    {"solve_wall_ms", solve_ms},
                    {"outputs",
                     {policy_path.string(), values_path.string(), (out / "spec.ini").string()}}},
                   opts);
    return exit_ok;
}

// ---------------------------------------------------------------- solve-2d

int cmd_solve_2d(const CommonOpts& opts, const std::string& method) {
    const ConfigFile config = ConfigFile::load(opts.config_path);
    const HexMdpSpec spec = hex_spec_from(config);
    const fs::path out = prepare_out(opts);
    const HexStateSpace space(spec.n_max);

    json manifest{{"command", "solve-2d"}, {"method", method}, {"spec", spec_json(spec)}};
    std::vector<std::string> outputs;
    std::optional<ValueTable2D> exact_values;
    std::optional<ValueTable2D> approx_values;

    if (method == "exact" || method == "both") {
        double ms = 0.0;
        const SolveResult2D exact =
            timed_ms([&] { return solve_exact(spec, SolveMethod::policy_iteration); }, ms);
        exact_values = exact.values;
        manifest["exact"] = {{"iterations", exact.iterations}, {"solve_wall_ms", ms}};
        outputs.push_back(table_policy_values_2d(space, exact.policy, exact.values)
                              .write(out, "policy_2d_exact", opts.format)
                              .string());
        log_info("exact 2-D solve: " + std::to_string(ms) + " ms");
    }

    if (method == "approx" || method == "both") {
        const DistanceMdpSpec dspec = build_approx_distance_spec(spec);
        double ms = 0.0;
        const auto [dsolution, mapped] = timed_ms(
            [&] {
                SolveResult1D d = modified_policy_iteration(dspec);
                HexPolicy m = map_1d_policy_to_2d(spec, d.policy);
                return std::make_pair(std::move(d), std::move(m));
            },
            ms);
        approx_values = evaluate_policy_2d(spec, mapped);
        manifest["approx"] = {{"iterations", dsolution.iterations},
                              {"solve_wall_ms", ms},
                              {"error_bound", error_bound(spec)},
                              {"distance_spec", spec_json(dspec)}};
        outputs.push_back(table_policy_values_1d(dsolution.policy, dsolution.values)
                              .write(out, "policy_1d", opts.format)
                              .string());
        outputs.push_back(table_policy_values_2d(space, mapped, *approx_values)
                              .write(out, "policy_2d_approx", opts.format)
                              .string());
        log_info("approximation path: " + std::to_string(ms) + " ms");
    }

    if (exact_values && approx_values) {
        double max_gap = 0.0;
        for (std::size_t s = 0; s < exact_values->size(); ++s)
            max_gap = std::max(max_gap, (*approx_values)[s] - (*exact_values)[s]);
        manifest["observed_max_gap"] = max_gap;
        manifest["gap_within_bound"] = max_gap <= error_bound(spec) + 1e-8;
        const double exact_ms = manifest["exact"]["solve_wall_ms"].get<double>();
        const double approx_ms = manifest["approx"]["solve_wall_ms"].get<double>();
        if (approx_ms > 0.0) manifest["speedup"] = exact_ms / approx_ms;
        log_info("observed max gap " + format_double(max_gap) + ", bound " +
                 format_double(error_bound(spec)));

        // per-state comparison of the approximation and the baselines
        const DistanceMdpSpec dspec = build_approx_distance_spec(spec);
        const auto rows = compare_policies(
            spec,
            {{"approx", map_1d_policy_to_2d(spec, modified_policy_iteration(dspec).policy)},
             {"never-migrate", build_baseline_2d(spec, BaselineKind::never_migrate)},
             {"always-migrate", build_baseline_2d(spec, BaselineKind::always_migrate)},
             {"myopic", build_baseline_2d(spec, BaselineKind::myopic)}});
        outputs.push_back(table_comparison(rows, &space).write(out, "comparison", opts.format).string());
    }

    write_spec_config(out / "spec.ini", spec);
    outputs.push_back((out / "spec.ini").string());
    manifest["outputs"] = outputs;
    write_manifest(out, manifest, opts);
    return exit_ok;
}

// ------------------------------------------------------------------- sweep

struct SweepPolicies {
    bool optimal = false, approx = false, never = false, always = false, myopic = false;
};

double state_avg(const ValueTable2D& values) {
    double sum = 0.0;
    for (const double v : values) sum += v;
    return sum / static_cast<double>(values.size());
}

int cmd_sweep(const CommonOpts& opts) {
    const ConfigFile config = ConfigFile::load(opts.config_path);
    const fs::path out = prepare_out(opts);

    const std::string parameter = config.get_string_or("sweep", "parameter", "beta_l_neg");
    if (parameter != "beta_l_neg" && parameter != "gamma")
        throw ValidationError("config field [sweep] parameter must be beta_l_neg or gamma");
    const std::vector<double> values = config.get_doubles("sweep", "values");
    if (values.empty()) throw ValidationError("config field [sweep] values is empty");

    std::vector<double> gammas;
    if (parameter == "beta_l_neg") {
        gammas = config.has("sweep", "gammas") ? config.get_doubles("sweep", "gammas")
                                               : std::vector<double>{0.5, 0.9, 0.99};
    } else {
        gammas = {0.0}; // placeholder; gamma comes from the sweep values
    }

    SweepPolicies which;
    const auto names = config.has("sweep", "policies")
                           ? config.get_strings("sweep", "policies")
                           : std::vector<std::string>{"optimal", "approx", "never-migrate",
                                                      "always-migrate", "myopic"};
    for (const auto& name : names) {
        if (name == "optimal") which.optimal = true;
        else if (name == "approx") which.approx = true;
        else if (name == "never-migrate") which.never = true;
        else if (name == "always-migrate") which.always = true;
        else if (name == "myopic") which.myopic = true;
        else throw ValidationError("config field [sweep] policies: unknown policy " + name);
    }

    json manifest{{"command", "sweep"}, {"parameter", parameter}};
    std::vector<std::string> outputs;
    json checks = json::array();

    for (const double gamma : gammas) {
        Table table;
        table.columns = {"gamma", parameter, "policy", "state_avg_cost"};
        std::vector<std::pair<double, double>> never_always; // per value, for intersections
        for (const double value : values) {
            HexMdpSpec spec = hex_spec_from(config);
            if (parameter == "beta_l_neg") {
                spec.gamma = gamma;
                spec.migration_cost.lin_term = -value;
                spec.migration_cost.const_term = 1.0 + value; // beta_c + beta_l = 1
            } else {
                spec.gamma = value;
            }
            spec.require_valid();
            const double row_gamma = parameter == "gamma" ? value : gamma;
            log_debug("sweep point gamma=" + format_double(row_gamma) + " " + parameter + "=" +
                      format_double(value));

            std::optional<ValueTable2D> optimal;
            if (which.optimal) {
                optimal = solve_exact(spec, SolveMethod::policy_iteration).values;
                table.add_row({row_gamma, value, "optimal", state_avg(*optimal)});
            }
            if (which.approx) {
                const auto dsolution = modified_policy_iteration(build_approx_distance_spec(spec));
                const auto v_dist = evaluate_policy_2d(spec, map_1d_policy_to_2d(spec, dsolution.policy));
                table.add_row({row_gamma, value, "approx", state_avg(v_dist)});
                if (optimal) {
                    double max_gap = 0.0;
                    for (std::size_t s = 0; s < v_dist.size(); ++s)
                        max_gap = std::max(max_gap, v_dist[s] - (*optimal)[s]);
                    checks.push_back({{"gamma", row_gamma},
                                      {"value", value},
                                      {"observed_max_gap", max_gap},
                                      {"error_bound", error_bound(spec)},
                                      {"within_bound", max_gap <= error_bound(spec) + 1e-8}});
                }
            }
            double never_avg = 0.0, always_avg = 0.0;
            if (which.never) {
                never_avg = state_avg(
                    evaluate_policy_2d(spec, build_baseline_2d(spec, BaselineKind::never_migrate)));
                table.add_row({row_gamma, value, "never-migrate", never_avg});
            }
            if (which.always) {
                always_avg = state_avg(
                    evaluate_policy_2d(spec, build_baseline_2d(spec, BaselineKind::always_migrate)));
                table.add_row({row_gamma, value, "always-migrate", always_avg});
            }
            if (which.never && which.always) never_always.emplace_back(never_avg, always_avg);
            if (which.myopic)
                table.add_row({row_gamma, value, "myopic",
                               state_avg(evaluate_policy_2d(
                                   spec, build_baseline_2d(spec, BaselineKind::myopic)))});
        }

        const std::string name =
            parameter == "gamma" ? "sweep" : "sweep_gamma_" + format_double(gamma);
        outputs.push_back(table.write(out, name, opts.format).string());

        if (which.never && which.always) {
            for (std::size_t i = 0; i + 1 < never_always.size(); ++i) {
                const double d0 = never_always[i].first - never_always[i].second;
                const double d1 = never_always[i + 1].first - never_always[i + 1].second;
                if (d0 == 0.0 || (d0 < 0.0) != (d1 < 0.0)) {
                    manifest["never_always_intersections"].push_back(
                        {{"gamma", parameter == "gamma" ? values[i] : gamma},
                         {"between_values", {values[i], values[i + 1]}}});
                    log_info("never/always cost curves cross between " + format_double(values[i]) +
                             " and " + format_double(values[i + 1]));
                }
            }
        }
    }

    if (!checks.empty()) manifest["approx_gap_checks"] = checks;
    manifest["outputs"] = outputs;
    write_manifest(out, manifest, opts);
    return exit_ok;
}

// --------------------------------------------------------------------- fit

TabulatedCost read_tabulated(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open cost table " + path.string());
    std::vector<std::pair<double, double>> points; // (n, f)
    std::string line;
    int line_no = 0;
    bool indexed = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        for (char& c : line)
            if (c == ',') c = ' ';
        std::istringstream fields(line);
        double a = 0.0, b = 0.0;
        if (!(fields >> a)) {
            if (line_no == 1) continue; // header
            throw ParseError(path.string() + ":" + std::to_string(line_no) + ": expected a number");
        }
        if (fields >> b) {
            indexed = true;
            points.emplace_back(a, b);
        } else {
            points.emplace_back(static_cast<double>(points.size()), a);
        }
    }
    if (points.empty()) throw EmptyTraceError("cost table " + path.string() + " is empty");
    if (indexed)
        std::sort(points.begin(), points.end());
    TabulatedCost table;
    for (const auto& [n, f] : points) table.values.push_back(f);
    if (table.values.size() % 2 == 0)
        throw ValidationError("cost table must hold 2W+1 values, got " +
                              std::to_string(table.values.size()));
    table.width = static_cast<int>(table.values.size() / 2);
    return table;
}

int cmd_fit(const CommonOpts& opts) {
    const ConfigFile config = ConfigFile::load(opts.config_path);
    const fs::path out = prepare_out(opts);
    const fs::path input = config.get_string("fit", "input");

    TabulatedCost table = read_tabulated(input);
    if (config.has("fit", "w")) {
        const int w = config.get_int("fit", "w");
        if (2 * w + 1 > static_cast<int>(table.values.size()))
            throw ValidationError("config field [fit] w too large for the table");
        table.values.resize(static_cast<std::size_t>(2 * w + 1));
        table.width = w;
    }

    const FitResult fit = fit_exponential(table);

    Table rows;
    rows.columns = {"n", "f", "fitted"};
    for (std::size_t n = 0; n < table.values.size(); ++n)
        rows.add_row({static_cast<std::int64_t>(n), table.values[n],
                      fit.params.const_term +
                          fit.params.lin_term * std::pow(fit.params.base, static_cast<double>(n))});
    const auto fit_path = rows.write(out, "fit", opts.format);

    json residuals;
    for (const int n : {0, table.width, 2 * table.width}) {
        const double fitted = fit.params.const_term +
                              fit.params.lin_term * std::pow(fit.params.base, n);
        residuals[std::to_string(n)] = table.values[static_cast<std::size_t>(n)] - fitted;
    }
    write_json_file(out / "fit.json",
                    {{"params", cost_json(fit.params)},
                     {"sse", fit.sse},
                     {"root_used", fit.root_used == FitRoot::plus ? "plus" : "minus"},
                     {"guarded", fit.guarded},
                     {"interpolation_residuals", residuals},
                     {"validate_violations", validate(fit.params)},
                     {"w", table.width}});

    write_manifest(out,
                   {{"command", "fit"},
                    {"input", input.string()},
                    {"outputs", {fit_path.string(), (out / "fit.json").string()}}},
                   opts);
    log_info("fit: base " + format_double(fit.params.base) + ", sse " + format_double(fit.sse));
    return exit_ok;
}

// ---------------------------------------------------------------- simulate

std::vector<PolicyKind> policies_from(const ConfigFile& config) {
    if (!config.has("simulate", "policies"))
        return {PolicyKind::proposed, PolicyKind::never_migrate, PolicyKind::always_migrate,
                PolicyKind::myopic};
    std::vector<PolicyKind> kinds;
    for (const auto& name : config.get_strings("simulate", "policies")) {
        if (name == "proposed") kinds.push_back(PolicyKind::proposed);
        else if (name == "never-migrate") kinds.push_back(PolicyKind::never_migrate);
        else if (name == "always-migrate") kinds.push_back(PolicyKind::always_migrate);
        else if (name == "myopic") kinds.push_back(PolicyKind::myopic);
        else throw ValidationError("config field [simulate] policies: unknown policy " + name);
    }
    return kinds;
}

int cmd_simulate(const CommonOpts& opts) {
    const ConfigFile config = ConfigFile::load(opts.config_path);
    const fs::path out = prepare_out(opts);

    const double slot_seconds = config.get_double_or("simulate", "T", 60.0);
    const std::string mode = config.get_string_or("simulate", "mode", "synthetic");

    SlottedTrace slotted;
    json source;
    if (mode == "trace") {
        const fs::path dir = config.get_string("simulate", "trace_dir");
        const std::string format_name = config.get_string_or("simulate", "trace_format", "cabspotting");
        const TraceFormat format =
            format_name == "csv" ? TraceFormat::csv : TraceFormat::cabspotting;
        log_info("ingesting traces from " + dir.string());
        const IngestResult records = ingest_traces(dir, format);
        slotted = tessellate(records, config.get_double_or("simulate", "cell_separation_m", 500.0),
                             slot_seconds);
        source = {{"mode", "trace"},
                  {"trace_dir", dir.string()},
                  {"entities", records.by_entity.size()},
                  {"records", records.record_count()},
                  {"malformed_lines", records.malformed_lines},
                  {"reordered_records", records.reordered_records}};
    } else if (mode == "synthetic") {
        const int entities = config.get_int_or("simulate", "entities", 200);
        const int slots = config.get_int_or("simulate", "slots", 600);
        const double walk_r = config.get_double_or("simulate", "walk_r", 0.08);
        slotted = generate_synthetic_walk(entities, slots, walk_r, opts.seed);
        slotted.slot_seconds = slot_seconds;
        source = {{"mode", "synthetic"},
                  {"entities", entities},
                  {"slots", slots},
                  {"walk_r", walk_r}};
    } else {
        throw ValidationError("config field [simulate] mode must be trace or synthetic");
    }

    TraceSimConfig sim;
    sim.update_seconds = config.get_double_or("simulate", "T_u", 60.0);
    sim.window_seconds = config.get_double_or("simulate", "T_w", 3600.0);
    sim.n_max = config.get_int_or("simulate", "N", 10);
    sim.gamma = config.get_double_or("simulate", "gamma", 0.9);
    sim.resource_transmission = config.get_double_or("simulate", "R_t", 1.5);
    sim.resource_processing = config.get_double_or("simulate", "R_p", 1.5);
    sim.mu = config.get_double_or("simulate", "mu", 0.8);
    sim.theta = config.get_double_or("simulate", "theta", 0.8);
    sim.initial_r = config.get_double_or("simulate", "initial_r", 0.05);
    sim.gap_carry_slots = config.get_int_or("simulate", "gap_carry_slots", 5);
    sim.policies = policies_from(config);

    log_info("simulating " + std::to_string(slotted.cells.size()) + " entities over slots " +
             std::to_string(slotted.first_slot) + ".." + std::to_string(slotted.last_slot));
    const SimReport report = run_trace_simulation(slotted, sim);

    Table series;
    series.columns = {"slot", "active"};
    for (const auto& name : report.policy_names) series.columns.push_back("avg_cost_" + name);
    for (const auto& row : report.per_slot) {
        std::vector<TableCell> cells{row.slot, static_cast<std::int64_t>(row.active)};
        for (const double c : row.avg_cost) cells.emplace_back(c);
        series.add_row(std::move(cells));
    }
    series.write_csv(out / "report.csv"); // the per-slot series is always CSV

    json totals, reductions;
    for (std::size_t p = 0; p < report.policy_names.size(); ++p) {
        totals[report.policy_names[p]] = report.total_avg_cost[p];
        if (std::isfinite(report.reduction_vs[p]))
            reductions[report.policy_names[p]] = report.reduction_vs[p];
        else if (report.policy_names[p] != "proposed")
            reductions[report.policy_names[p]] = nullptr;
    }
    json r_series = json::array();
    for (const auto& [slot, r] : report.r_series) r_series.push_back({{"slot", slot}, {"r", r}});
    write_json_file(out / "summary.json", {{"source", source},
                                           {"policies", report.policy_names},
                                           {"avg_cost_per_entity_slot", totals},
                                           {"cost_reduction_vs", reductions},
                                           {"r_series", r_series},
                                           {"max_post_action_distance", report.max_post_action_distance},
                                           {"m_max", report.m_max}});

    write_manifest(out,
                   {{"command", "simulate"},
                    {"source", source},
                    {"outputs", {(out / "report.csv").string(), (out / "summary.json").string()}}},
                   opts);
    for (std::size_t p = 0; p < report.policy_names.size(); ++p)
        log_info("policy " + report.policy_names[p] + ": avg cost " +
                 format_double(report.total_avg_cost[p]));
    return exit_ok;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"service migration policy engine and simulator"};
    app.require_subcommand(1);

    CommonOpts opts;
    std::string method = "approx";

    CLI::App* solve_1d = app.add_subcommand("solve-1d", "solve the distance-based MDP");
    add_common(solve_1d, opts);

    CLI::App* solve_2d = app.add_subcommand("solve-2d", "solve the hexagon offset MDP");
    add_common(solve_2d, opts);
    solve_2d->add_option("--method", method, "exact, approx, or both")
        ->check(CLI::IsMember({"exact", "approx", "both"}));

    CLI::App* sweep = app.add_subcommand("sweep", "cost sweeps across policies");
    add_common(sweep, opts);

    CLI::App* fit = app.add_subcommand("fit", "fit a tabulated cost function");
    add_common(fit, opts);

    CLI::App* simulate = app.add_subcommand("simulate", "random-walk or trace-driven simulation");
    add_common(simulate, opts);

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve_1d->parsed()) return cmd_solve_1d(opts);
        if (solve_2d->parsed()) return cmd_solve_2d(opts, method);
        if (sweep->parsed()) return cmd_sweep(opts);
        if (fit->parsed()) return cmd_fit(opts);
        if (simulate->parsed()) return cmd_simulate(opts);
    } catch (const ValidationError& e) {
        std::cerr << "migsim: validation error: " << e.what() << "\n";
        return exit_validation;
    } catch (const InsufficientDataError& e) {
        std::cerr << "migsim: validation error: " << e.what() << "\n";
        return exit_validation;
    } catch (const DegenerateInputError& e) {
        std::cerr << "migsim: degenerate input: " << e.what() << "\n";
        return exit_degenerate;
    } catch (const NonMonotoneError& e) {
        std::cerr << "migsim: degenerate input: " << e.what() << "\n";
        return exit_degenerate;
    } catch (const DegenerateSpecError& e) {
        std::cerr << "migsim: degenerate input: " << e.what() << "\n";
        return exit_degenerate;
    } catch (const NonConvergenceError& e) {
        std::cerr << "migsim: solver failed to converge: " << e.what() << "\n";
        return exit_convergence;
    } catch (const IoError& e) {
        std::cerr << "migsim: i/o error: " << e.what() << "\n";
        return exit_io;
    } catch (const ParseError& e) {
        std::cerr << "migsim: i/o error: " << e.what() << "\n";
        return exit_io;
    } catch (const EmptyTraceError& e) {
        std::cerr << "migsim: i/o error: " << e.what() << "\n";
        return exit_io;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "migsim: i/o error: " << e.what() << "\n";
        return exit_io;
    } catch (const std::exception& e) {
        std::cerr << "migsim: error: " << e.what() << "\n";
        return exit_failure;
    }
    return exit_failure;
}
