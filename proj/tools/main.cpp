#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "multiphonon/liouvillian.hpp"
#include "multiphonon/observables.hpp"
#include "multiphonon/params.hpp"
#include "multiphonon/peaks.hpp"
#include "multiphonon/steady_state.hpp"
#include "multiphonon/sweep.hpp"
#include "verify.hpp"

using namespace multiphonon;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_error = 1;
constexpr int exit_verify_failed = 2;

void warn_regime(const SystemParams& params)
{
    for (const auto& d : validate_regime(params))
        std::cerr << "warning: " << to_string(d.kind) << ": " << d.message << '\n';
}

CutoffMode cutoff_mode(const RunConfig& config, std::optional<double> obs_tol)
{
    if (!obs_tol) return FixedCutoffs{config.cutoffs};
    AutoCutoffs mode;
    mode.obs_tol = *obs_tol;
    return mode;
}

int run_solve(const std::string& config_path, std::optional<int> order, std::optional<double> obs_tol)
{
    RunConfig config = load_config(config_path);
    if (order) config.order = ExpansionOrder(*order);
    warn_regime(config.params);

    SweepRow row = solve_point(config.params, config.order, cutoff_mode(config, obs_tol));
    row.axis_value = config.params.delta;
    if (!row.converged) {
        std::cerr << "error: " << row.error << '\n';
        return exit_error;
    }
    std::cout << "# cutoffs_used: n_max=" << row.cutoffs.n_max << " m_max=" << row.cutoffs.m_max << '\n'
              << "# residual: " << row.solver_residual << '\n'
              << csv_header() << '\n'
              << csv_row(row) << '\n';
    return exit_ok;
}

struct SweepArgs {
    std::string config;
    std::string axis{"delta"};
    double from{0.0};
    double to{0.12};
    int steps{240};
    std::optional<int> order;
    int workers{1};
    std::string out;
    bool plot{false};
    std::optional<double> obs_tol;
};

int run_sweep_command(const SweepArgs& args)
{
    RunConfig config = load_config(args.config);
    if (args.order) config.order = ExpansionOrder(*args.order);

    SweepSpec spec;
    spec.axis = parse_axis(args.axis);
    spec.from = args.from;
    spec.to = args.to;
    spec.steps = args.steps;
    spec.base = config.params;
    spec.order = config.order;
    spec.cutoffs = cutoff_mode(config, args.obs_tol);
    require_valid(spec);
    if (args.plot && args.out.empty()) throw std::invalid_argument("--plot needs --out");
    warn_regime(spec.base);

    const auto rows = run_sweep(spec, args.workers);
    for (const auto& r : rows)
        if (!r.converged) std::cerr << "warning: point " << r.axis_value << " failed: " << r.error << '\n';

    if (args.out.empty()) {
        write_csv(std::cout, rows);
    } else if (args.plot) {
        std::cerr << "plot script: " << emit_plot_script(rows, spec.axis, args.out).string() << '\n';
    } else {
        std::ofstream file(args.out);
        if (!file) throw std::runtime_error("cannot write " + args.out);
        write_csv(file, rows);
    }
    return exit_ok;
}

int run_peaks(const std::string& input, const std::string& x_column, const std::string& y_column, double prominence)
{
    CsvTable table;
    if (input == "-") {
        table = read_csv(std::cin);
    } else {
        std::ifstream file(input);
        if (!file) throw std::runtime_error("cannot read " + input);
        table = read_csv(file);
    }
    const auto xs = table.numeric_column(x_column);
    const auto ys = table.numeric_column(y_column);
    std::vector<double> x, y;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (xs[i] && ys[i]) {
            x.push_back(*xs[i]);
            y.push_back(*ys[i]);
        }
    }
    const PeakReport report = detect_peaks(x, y, PeakOptions{prominence});
    std::cout << "peaks: " << report.positions.size() << '\n';
    for (std::size_t i = 0; i < report.positions.size(); ++i)
        std::cout << "  x=" << report.positions[i] << " prominence=" << report.prominences[i] << '\n';
    if (report.inferred_kerr) {
        std::cout << "mean_spacing: " << *report.inferred_kerr << '\n' << "inferred_g: " << *report.inferred_g << '\n';
    } else {
        std::cout << "mean_spacing: undefined (fewer than two peaks)\n";
    }
    return exit_ok;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Steady states of a driven optomechanical cavity with multiphonon secular terms"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<int> order;
    std::optional<double> obs_tol;

    auto* solve = app.add_subcommand("solve", "Solve a single parameter point and print one CSV row");
    solve->add_option("--config", config_path, "key = value parameter file")->required()->check(CLI::ExistingFile);
    solve->add_option("--order", order, "Expansion order N (overrides order_N)")->check(CLI::NonNegativeNumber);
    solve->add_option("--obs-tol", obs_tol, "Escalate cutoffs until observables change less than this")
        ->check(CLI::PositiveNumber);

    SweepArgs sweep_args;
    auto* sweep = app.add_subcommand("sweep", "Sweep delta, chi or nbar and write CSV");
    sweep->add_option("--config", sweep_args.config, "key = value parameter file")->required()->check(CLI::ExistingFile);
    sweep->add_option("--axis", sweep_args.axis, "delta | chi | nbar")
        ->check(CLI::IsMember({"delta", "chi", "nbar"}))
        ->capture_default_str();
    sweep->add_option("--from", sweep_args.from)->capture_default_str();
    sweep->add_option("--to", sweep_args.to)->capture_default_str();
    sweep->add_option("--steps", sweep_args.steps)->check(CLI::Range(2, 1000000))->capture_default_str();
    sweep->add_option("--order", sweep_args.order, "Expansion order N (overrides order_N)")->check(CLI::NonNegativeNumber);
    sweep->add_option("--workers", sweep_args.workers)->check(CLI::PositiveNumber)->capture_default_str();
    sweep->add_option("--out", sweep_args.out, "CSV output path (stdout when omitted)");
    sweep->add_flag("--plot", sweep_args.plot, "Also write <out>_plot.py");
    sweep->add_option("--obs-tol", sweep_args.obs_tol, "Auto-converge cutoffs at this relative tolerance")
        ->check(CLI::PositiveNumber);

    std::string peaks_input;
    std::string x_column = "axis_value";
    std::string y_column = "mean_phonon";
    double prominence = PeakOptions{}.prominence_fraction;
    auto* peaks = app.add_subcommand("peaks", "Detect peaks in a sweep CSV and infer the Kerr scale");
    peaks->add_option("input", peaks_input, "CSV file, or - for stdin")->required();
    peaks->add_option("--x", x_column)->capture_default_str();
    peaks->add_option("--column", y_column)->capture_default_str();
    peaks->add_option("--prominence", prominence, "Fraction of the series range")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();

    auto* verify = app.add_subcommand("verify", "Run the built-in cross-checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? exit_ok : exit_error;
    }

    try {
        if (*solve) return run_solve(config_path, order, obs_tol);
        if (*sweep) return run_sweep_command(sweep_args);
        if (*peaks) return run_peaks(peaks_input, x_column, y_column, prominence);
        if (*verify) return multiphonon::cli::run_verification(std::cout) ? exit_ok : exit_verify_failed;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_error;
    }
    return exit_error;
}
