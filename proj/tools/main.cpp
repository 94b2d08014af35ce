// Command-line driver: case loading, scenario configuration, and the four
// subcommands (simulate / identify / sweep / report).  All results go to
// files; exit codes are 0 (ok), 1 (bad input), 2 (simulation failure).
#include "gridcascade/cascade.hpp"
#include "gridcascade/cia.hpp"
#include "gridcascade/errors.hpp"
#include "gridcascade/network.hpp"
#include "gridcascade/serialize.hpp"
#include "gridcascade/version.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

using gridcascade::CascadeConfig;
using gridcascade::DisturbanceBounds;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitBadInput = 1;
constexpr int kExitSimError = 2;

struct CommonArgs {
    std::string case_path;
    int branch = 8;
    double timer = 1.0;
    double dt = 0.01;
    std::string facts = "off";
    int max_steps = 12;
    std::string out_dir = ".";
};

void add_common(CLI::App* cmd, CommonArgs& a, bool needs_case) {
    auto* opt = cmd->add_option("--case", a.case_path, "network case file (JSON, or MATPOWER .m)");
    if (needs_case) opt->required();
    cmd->add_option("--branch", a.branch, "disturbed branch id")->capture_default_str();
    cmd->add_option("--timer", a.timer, "relay timer threshold T in seconds")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--dt", a.dt, "controller integration step in seconds")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--facts", a.facts, "series-compensation control: on|off")
        ->check(CLI::IsMember({"on", "off"}))
        ->capture_default_str();
    cmd->add_option("--max-steps", a.max_steps, "cascading-step budget m")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--out", a.out_dir, "output directory")->capture_default_str();
}

gridcascade::NetworkCase load_prepared_case(const std::string& path) {
    const auto fmt = path.size() >= 2 && path.substr(path.size() - 2) == ".m"
                         ? gridcascade::CaseFormat::MatpowerM
                         : gridcascade::CaseFormat::NativeJson;
    std::vector<std::string> warnings;
    auto cs = gridcascade::apply_hvdc(gridcascade::load_case(path, fmt), &warnings);
    for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
    return cs;
}

CascadeConfig to_config(const CommonArgs& a) {
    CascadeConfig cfg;
    cfg.m = a.max_steps;
    cfg.relay_period = a.timer;
    cfg.dt = a.dt;
    cfg.facts_enabled = a.facts == "on";
    return cfg;
}

json config_manifest(const CommonArgs& a) {
    return json{{"case", a.case_path},   {"branch", a.branch},
                {"timer", a.timer},      {"dt", a.dt},
                {"facts", a.facts},      {"max_steps", a.max_steps},
                {"out", a.out_dir}};
}

std::string out_path(const CommonArgs& a, const std::string& name) {
    std::filesystem::create_directories(a.out_dir);
    return (std::filesystem::path(a.out_dir) / name).string();
}

void write_outputs(const CommonArgs& a, const std::string& command, const json& resolved,
                   std::uint64_t seed,
                   const std::vector<std::pair<std::string, std::string>>& files) {
    for (const auto& [name, content] : files)
        gridcascade::write_text_file(out_path(a, name), content);
    const std::string checksum =
        a.case_path.empty() ? std::string() : gridcascade::file_checksum(a.case_path);
    const json manifest =
        gridcascade::make_manifest(command, a.case_path, checksum, resolved, seed);
    gridcascade::write_text_file(out_path(a, "manifest.json"), manifest.dump(2) + "\n");
}

int run_simulate(const CommonArgs& a, double delta) {
    const auto cs = load_prepared_case(a.case_path);
    const CascadeConfig cfg = to_config(a);
    const gridcascade::Disturbance d{a.branch, delta};
    const auto trace = gridcascade::simulate_cascade(cs, d, cfg);
    json resolved = config_manifest(a);
    resolved["delta"] = delta;
    write_outputs(a, "simulate", resolved, 0,
                  {{"trace.json", trace_to_json(trace, d, cfg).dump(2) + "\n"},
                   {"timeline.csv", timeline_csv(trace)}});
    return kExitOk;
}

int run_identify(const CommonArgs& a, DisturbanceBounds bounds, int lmax, std::uint64_t seed) {
    const auto cs = load_prepared_case(a.case_path);
    const CascadeConfig cfg = to_config(a);
    const gridcascade::JfnkConfig solver_cfg;
    const auto res = gridcascade::identify(cs, a.branch, bounds, cfg, solver_cfg, lmax, seed);
    json resolved = config_manifest(a);
    resolved["bounds"] = {bounds.lo, bounds.hi};
    resolved["lmax"] = lmax;
    write_outputs(a, "identify", resolved, seed,
                  {{"identification.json", identification_to_json(res, cfg).dump(2) + "\n"}});
    return kExitOk;
}

int run_sweep(const CommonArgs& a, DisturbanceBounds bounds, int grid, int jobs) {
    const auto cs = load_prepared_case(a.case_path);
    const CascadeConfig cfg = to_config(a);
    const auto res = gridcascade::sweep(cs, a.branch, bounds, grid, cfg, jobs);
    json resolved = config_manifest(a);
    resolved["bounds"] = {bounds.lo, bounds.hi};
    resolved["grid"] = grid;
    resolved["jobs"] = jobs;
    write_outputs(a, "sweep", resolved, 0,
                  {{"sweep.json", sweep_to_json(res, a.branch, bounds, cfg).dump(2) + "\n"},
                   {"sweep.csv", sweep_csv(res)}});
    return kExitOk;
}

std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c;
    }
    return q + "\"";
}

int run_report(const std::vector<std::string>& trace_files, const std::string& out_dir) {
    if (trace_files.empty()) throw gridcascade::ValidationError("report needs at least one trace file");
    struct Row {
        std::string file;
        bool facts;
        double timer, delta, j;
        int outages, islands;
    };
    std::vector<Row> rows;
    for (const auto& f : trace_files) {
        std::ifstream in(f);
        if (!in) throw gridcascade::ParseError("cannot open trace file: " + f);
        json j;
        try {
            j = json::parse(in);
        } catch (const json::exception& e) {
            throw gridcascade::ParseError("bad trace JSON in " + f + ": " + e.what());
        }
        const auto bundle = gridcascade::trace_from_json(j);
        rows.push_back(Row{f, bundle.config.facts_enabled, bundle.config.relay_period,
                           bundle.disturbance.delta, bundle.trace.final_cost,
                           bundle.trace.outage_count(), bundle.trace.final_islands});
    }
    std::ostringstream csv;
    csv << "trace,facts,timer_s,delta,outages,islands,J,outage_reduction_pct,cost_change_pct\n";
    const double base_n = rows.front().outages;
    const double base_j = rows.front().j;
    char buf[256];
    for (const auto& r : rows) {
        const double dn = base_n > 0 ? 100.0 * (base_n - r.outages) / base_n : 0.0;
        const double dj = base_j != 0.0 ? 100.0 * (r.j - base_j) / std::abs(base_j) : 0.0;
        csv << csv_quote(r.file) << ',' << (r.facts ? "on" : "off") << ',';
        std::snprintf(buf, sizeof buf, "%g,%.17g,%d,%d,%.17g,%.1f,%.1f\n", r.timer, r.delta,
                      r.outages, r.islands, r.j, dn, dj);
        csv << buf;
    }
    std::filesystem::create_directories(out_dir);
    const auto path = (std::filesystem::path(out_dir) / "report.csv").string();
    gridcascade::write_text_file(path, csv.str());
    json resolved{{"inputs", trace_files}, {"out", out_dir}};
    const json manifest = gridcascade::make_manifest("report", "", "", resolved, 0);
    gridcascade::write_text_file((std::filesystem::path(out_dir) / "manifest.json").string(),
                                 manifest.dump(2) + "\n");
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{std::string(gridcascade::kToolName) +
                 " — cascading-failure simulation and worst-disturbance identification"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(gridcascade::kVersion));

    CommonArgs sim_args, id_args, sw_args;
    double delta = 0.0;
    std::vector<double> id_bounds{0.0, 37.45}, sw_bounds{0.0, 37.45};
    int lmax = 10, grid = 150, jobs = 1;
    std::uint64_t seed = 1;
    std::vector<std::string> report_inputs;
    std::string report_out = ".";

    auto* sim = app.add_subcommand("simulate", "run one cascade and write its trace");
    add_common(sim, sim_args, true);
    sim->add_option("--delta", delta, "susceptance disturbance added to the branch")->required();

    auto* ident = app.add_subcommand("identify", "search for the worst in-bounds disturbance");
    add_common(ident, id_args, true);
    ident->add_option("--bounds", id_bounds, "disturbance bounds LO HI")
        ->expected(2)
        ->capture_default_str();
    ident->add_option("--lmax", lmax, "number of restarts")->capture_default_str();
    ident->add_option("--seed", seed, "restart RNG seed")->capture_default_str();

    auto* sw = app.add_subcommand("sweep", "evaluate the cost over a uniform disturbance grid");
    add_common(sw, sw_args, true);
    sw->add_option("--bounds", sw_bounds, "disturbance bounds LO HI")
        ->expected(2)
        ->capture_default_str();
    sw->add_option("--grid", grid, "number of grid points")->capture_default_str();
    sw->add_option("--jobs", jobs, "parallel workers for grid points")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();

    auto* rep = app.add_subcommand("report", "tabulate previously written traces");
    rep->add_option("traces", report_inputs, "trace JSON files to merge");
    rep->add_option("--out", report_out, "output directory")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitBadInput;
    }

    try {
        if (sim->parsed()) return run_simulate(sim_args, delta);
        if (ident->parsed()) {
            if (lmax < 1) throw gridcascade::ValidationError("--lmax must be at least 1");
            if (id_bounds[0] > id_bounds[1])
                throw gridcascade::ValidationError("--bounds LO must not exceed HI");
            return run_identify(id_args, DisturbanceBounds{id_bounds[0], id_bounds[1]}, lmax,
                                seed);
        }
        if (sw->parsed()) {
            if (grid < 2) throw gridcascade::ValidationError("--grid must be at least 2");
            if (sw_bounds[0] > sw_bounds[1])
                throw gridcascade::ValidationError("--bounds LO must not exceed HI");
            return run_sweep(sw_args, DisturbanceBounds{sw_bounds[0], sw_bounds[1]}, grid, jobs);
        }
        if (rep->parsed()) return run_report(report_inputs, report_out);
    } catch (const gridcascade::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitBadInput;
    } catch (const gridcascade::ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitBadInput;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitBadInput;
    } catch (const std::exception& e) {
        std::cerr << "simulation error: " << e.what() << '\n';
        return kExitSimError;
    }
    return kExitBadInput;
}
