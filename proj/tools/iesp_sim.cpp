// Command-line front end: run one scenario, sweep a grid, or validate a file.
//
// Exit codes: 0 ok, 1 validation error, 2 simulation fault.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "iesp/errors.hpp"
#include "iesp/export.hpp"
#include "iesp/scenario.hpp"
#include "iesp/simulation.hpp"
#include "iesp/sweep.hpp"

namespace fs = std::filesystem;
using namespace iesp;

namespace {

constexpr int kOk = 0;
constexpr int kInvalid = 1;
constexpr int kFault = 2;

void print_issues(const ValidationError& e) {
    std::cerr << "validation failed:\n";
    for (const auto& issue : e.issues())
        std::cerr << "  " << issue << '\n';
}

int cmd_validate(const fs::path& file) {
    const auto sc = sim::load_scenario(file);
    std::cout << file.string() << ": ok (" << sc.name << ", " << sc.duration << " s, "
              << sim::trajectory_of(sc).total_length() << " m course)\n";
    return kOk;
}

int cmd_run(const fs::path& file, fs::path out_dir, bool no_iesp, bool no_abs, bool plots) {
    auto sc = sim::load_scenario(file);
    if (no_iesp)
        sc.iesp_enabled = false;
    if (no_abs)
        sc.abs_enabled = false;
    if (out_dir.empty())
        out_dir = fs::path("out") / sc.name;

    const auto result = sim::run(sc);
    const auto metrics = sim::compute_metrics(result.trace, sim::trajectory_of(sc));
    const auto files = sim::export_run(result, metrics, out_dir, plots);

    std::printf("%s: %zu samples, max |beta| %.2f deg%s, max error %.3f m, mean error %.3f m\n",
                sc.name.c_str(), result.trace.samples.size(), metrics.max_abs_beta_deg,
                metrics.spin ? " (spin)" : "", metrics.max_track_error, metrics.final_track_error_mean);
    std::printf("wrote %s\n", files.csv.string().c_str());
    if (result.fault) {
        std::cerr << "simulation fault: " << result.fault->message << '\n';
        return kFault;
    }
    return kOk;
}

int cmd_sweep(const fs::path& tmpl_file, const fs::path& grid_file, unsigned jobs, const fs::path& out_file) {
    const auto tmpl = sim::read_json_file(tmpl_file);
    // Fail early if the template itself is broken.
    (void)sim::scenario_from_json(tmpl, tmpl_file.parent_path());
    const auto grid = sim::load_grid(grid_file);
    const auto rows = sim::sweep(tmpl, tmpl_file.parent_path(), grid, jobs);

    int code = kOk;
    for (const auto& r : rows) {
        if (!r.error.empty())
            code = kInvalid;
        else if (r.fault && code == kOk)
            code = kFault;
    }
    if (out_file.empty()) {
        sim::write_sweep_csv(std::cout, grid, rows);
    } else {
        if (out_file.has_parent_path())
            fs::create_directories(out_file.parent_path());
        std::ofstream out(out_file);
        if (!out)
            throw IoError("cannot write " + out_file.string());
        sim::write_sweep_csv(out, grid, rows);
        std::printf("%zu rows written to %s\n", rows.size(), out_file.string().c_str());
    }
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Closed-loop vehicle simulator with fuzzy stability control"};
    app.require_subcommand(1);

    fs::path run_file, run_out;
    bool no_iesp = false, no_abs = false, plots = false;
    auto* run = app.add_subcommand("run", "Simulate one scenario and export trace, metrics and plots");
    run->add_option("scenario", run_file, "Scenario JSON file")->required()->check(CLI::ExistingFile);
    run->add_option("--out", run_out, "Output directory (default out/<scenario name>)");
    run->add_flag("--no-iesp", no_iesp, "Disable the stability program");
    run->add_flag("--no-abs", no_abs, "Disable the anti-lock modulator");
    run->add_flag("--plots", plots, "Also write SVG plots");

    fs::path sweep_tmpl, sweep_grid, sweep_out;
    unsigned jobs = 1;
    auto* sweep = app.add_subcommand("sweep", "Run a scenario template over a parameter grid");
    sweep->add_option("template", sweep_tmpl, "Scenario JSON template")->required()->check(CLI::ExistingFile);
    sweep->add_option("grid", sweep_grid, "Grid JSON file")->required()->check(CLI::ExistingFile);
    sweep->add_option("--jobs", jobs, "Parallel runs (0 = all cores)");
    sweep->add_option("--out", sweep_out, "Summary CSV path (default stdout)");

    fs::path validate_file;
    auto* validate = app.add_subcommand("validate", "Check a scenario file and list every problem");
    validate->add_option("scenario", validate_file, "Scenario JSON file")->required()->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kInvalid;
    }

    try {
        if (*run)
            return cmd_run(run_file, run_out, no_iesp, no_abs, plots);
        if (*sweep)
            return cmd_sweep(sweep_tmpl, sweep_grid, jobs, sweep_out);
        return cmd_validate(validate_file);
    } catch (const ValidationError& e) {
        print_issues(e);
        return kInvalid;
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return kInvalid;
    } catch (const SimulationFault& e) {
        std::cerr << "simulation fault: " << e.what() << '\n';
        return kFault;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return kFault;
    }
}
