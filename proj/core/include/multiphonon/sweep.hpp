// sweep.hpp: Parameter sweeps over detuning, coupling or bath occupation,
// with CSV output and an emitted plotting script.

#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "multiphonon/observables.hpp"
#include "multiphonon/params.hpp"
#include "multiphonon/steady_state.hpp"

namespace multiphonon {

enum class SweepAxis { Delta, Chi, Nbar };

SweepAxis parse_axis(const std::string& name);
const char* to_string(SweepAxis axis);

struct FixedCutoffs {
    FockCutoffs cutoffs;
};

struct AutoCutoffs {
    CutoffPolicy policy;
    double obs_tol{1e-3};
};

using CutoffMode = std::variant<FixedCutoffs, AutoCutoffs>;

struct SweepSpec {
    SweepAxis axis{SweepAxis::Delta};
    double from{0.0};
    double to{0.1};
    int steps{2};
    SystemParams base;
    ExpansionOrder order{1};
    CutoffMode cutoffs{FixedCutoffs{FockCutoffs{8, 16}}};
};

// from < to and steps >= 2; from == to is accepted and yields `steps`
// copies of the same point.
void require_valid(const SweepSpec& spec);

std::vector<double> sweep_grid(const SweepSpec& spec);
SystemParams with_axis_value(const SystemParams& base, SweepAxis axis, double value);

struct SweepRow {
    double axis_value{0.0};
    SystemParams params;
    int order_N{1};
    FockCutoffs cutoffs;
    std::optional<ObservablesRecord> observables; // empty when the point failed
    double solver_residual{0.0};
    bool converged{false};
    std::string error;
};

// One steady-state point on the phonon-diagonal subspace.
SweepRow solve_point(const SystemParams& params, ExpansionOrder order, const CutoffMode& cutoffs);

// Rows come back in ascending axis order regardless of `workers`.
std::vector<SweepRow> run_sweep(const SweepSpec& spec, int workers = 1);

inline constexpr const char* kCsvColumns[] = {
    "axis_value", "delta",  "chi",  "nbar", "order_N", "n_max",
    "m_max",      "mean_photon", "mean_phonon", "g2_a", "g2_b", "g3_b",
    "g4_b",       "appendix_b_residual", "solver_residual", "converged"};

std::string csv_header();
std::string csv_row(const SweepRow& row);
void write_csv(std::ostream& out, const std::vector<SweepRow>& rows);

struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    // Blank or unparsable cells are empty optionals.
    std::vector<std::optional<double>> numeric_column(const std::string& name) const;
};

CsvTable read_csv(std::istream& in);

// Writes `csv_path` and a matplotlib script next to it (<stem>_plot.py) that
// draws mean-number and correlation panels against the sweep axis, one curve
// per (nbar, order_N). Returns the script path.
std::filesystem::path emit_plot_script(const std::vector<SweepRow>& rows,
                                       SweepAxis axis,
                                       const std::filesystem::path& csv_path);

} // namespace multiphonon
