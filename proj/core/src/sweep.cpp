#include "multiphonon/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace multiphonon {

SweepAxis parse_axis(const std::string& name)
{
    if (name == "delta") return SweepAxis::Delta;
    if (name == "chi") return SweepAxis::Chi;
    if (name == "nbar") return SweepAxis::Nbar;
    throw std::invalid_argument("unknown sweep axis '" + name + "' (expected delta, chi or nbar)");
}

const char* to_string(SweepAxis axis)
{
    switch (axis) {
    case SweepAxis::Delta: return "delta";
    case SweepAxis::Chi: return "chi";
    case SweepAxis::Nbar: return "nbar";
    }
    return "?";
}

void require_valid(const SweepSpec& spec)
{
    if (spec.steps < 2) throw std::invalid_argument("sweep needs at least 2 steps");
    if (!(spec.from <= spec.to)) throw std::invalid_argument("sweep range must satisfy from < to");
    if (spec.order.value < 0) throw std::invalid_argument("expansion order must be >= 0");
    require_well_formed(spec.base);
}

std::vector<double> sweep_grid(const SweepSpec& spec)
{
    require_valid(spec);
    std::vector<double> grid(static_cast<std::size_t>(spec.steps));
    const double step = (spec.to - spec.from) / (spec.steps - 1);
    for (int i = 0; i < spec.steps; ++i) grid[static_cast<std::size_t>(i)] = spec.from + i * step;
    grid.back() = spec.to;
    return grid;
}

SystemParams with_axis_value(const SystemParams& base, SweepAxis axis, double value)
{
    SystemParams p = base;
    switch (axis) {
    case SweepAxis::Delta: p.delta = value; break;
    case SweepAxis::Chi: p.g = value; break;
    case SweepAxis::Nbar: p.nbar = value; break;
    }
    return p;
}

SweepRow solve_point(const SystemParams& params, ExpansionOrder order, const CutoffMode& mode)
{
    SweepRow row;
    row.params = params;
    row.order_N = order.value;
    try {
        SolveReport report;
        if (const auto* fixed = std::get_if<FixedCutoffs>(&mode)) {
            row.cutoffs = fixed->cutoffs;
            report = steady_state(phonon_diagonal_generator(params, fixed->cutoffs, order));
        } else {
            const auto& autoc = std::get<AutoCutoffs>(mode);
            row.cutoffs = autoc.policy.start;
            report = converge_cutoffs(params, order, autoc.obs_tol, autoc.policy);
        }
        row.cutoffs = report.cutoffs_used;
        row.solver_residual = report.residual;
        row.observables =
            observables_from_distribution(distribution_from_populations(report.populations(), row.cutoffs), params);
        row.converged = true;
    } catch (const std::exception& e) {
        row.error = e.what();
        row.converged = false;
        row.observables.reset();
    }
    return row;
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec, int workers)
{
    const auto grid = sweep_grid(spec);
    std::vector<SweepRow> rows(grid.size());
    std::atomic<std::size_t> next{0};

    auto work = [&] {
        for (std::size_t i = next++; i < grid.size(); i = next++) {
            rows[i] = solve_point(with_axis_value(spec.base, spec.axis, grid[i]), spec.order, spec.cutoffs);
            rows[i].axis_value = grid[i];
        }
    };

    const int count = std::max(1, std::min<int>(workers, static_cast<int>(grid.size())));
    if (count == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(static_cast<std::size_t>(count));
        for (int w = 0; w < count; ++w) pool.emplace_back(work);
    }
    return rows;
}

namespace {

std::string number(double v)
{
    std::ostringstream s;
    s << std::setprecision(12) << v;
    return s.str();
}

std::string number(const std::optional<double>& v)
{
    return v ? number(*v) : std::string{};
}

} // namespace

std::string csv_header()
{
    std::string h;
    for (const char* c : kCsvColumns) {
        if (!h.empty()) h += ',';
        h += c;
    }
    return h;
}

std::string csv_row(const SweepRow& r)
{
    std::ostringstream s;
    s << number(r.axis_value) << ',' << number(r.params.delta) << ',' << number(r.params.chi()) << ','
      << number(r.params.nbar) << ',' << r.order_N << ',' << r.cutoffs.n_max << ',' << r.cutoffs.m_max << ',';
    if (r.observables) {
        const auto& o = *r.observables;
        s << number(o.mean_photon) << ',' << number(o.mean_phonon) << ',' << number(o.g2_a) << ','
          << number(o.g2_b) << ',' << number(o.g3_b) << ',' << number(o.g4_b) << ','
          << number(o.appendix_b_residual) << ',' << number(r.solver_residual) << ',';
    } else {
        s << ",,,,,,,,";
    }
    s << (r.converged ? "true" : "false");
    return s.str();
}

void write_csv(std::ostream& out, const std::vector<SweepRow>& rows)
{
    out << csv_header() << '\n';
    for (const auto& r : rows) out << csv_row(r) << '\n';
}

namespace {

std::vector<std::string> split(const std::string& line)
{
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream s(line);
    while (std::getline(s, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

} // namespace

CsvTable read_csv(std::istream& in)
{
    CsvTable table;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        if (table.columns.empty()) {
            table.columns = split(line);
            continue;
        }
        auto cells = split(line);
        if (cells.size() != table.columns.size()) {
            throw std::runtime_error("CSV row has " + std::to_string(cells.size()) + " cells, header has " +
                                     std::to_string(table.columns.size()));
        }
        table.rows.push_back(std::move(cells));
    }
    if (table.columns.empty()) throw std::runtime_error("CSV input has no header");
    return table;
}

std::vector<std::optional<double>> CsvTable::numeric_column(const std::string& name) const
{
    const auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) throw std::invalid_argument("CSV has no column '" + name + "'");
    const auto col = static_cast<std::size_t>(it - columns.begin());
    std::vector<std::optional<double>> out;
    out.reserve(rows.size());
    for (const auto& row : rows) {
        const std::string& cell = row[col];
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
        if (cell.empty() || ec != std::errc{} || ptr != cell.data() + cell.size()) out.emplace_back();
        else out.emplace_back(v);
    }
    return out;
}

std::filesystem::path emit_plot_script(const std::vector<SweepRow>& rows,
                                       SweepAxis axis,
                                       const std::filesystem::path& csv_path)
{
    if (rows.empty()) throw std::invalid_argument("emit_plot_script: empty table");
    {
        std::ofstream csv(csv_path);
        if (!csv) throw std::runtime_error("cannot write " + csv_path.string());
        write_csv(csv, rows);
        if (!csv) throw std::runtime_error("error while writing " + csv_path.string());
    }

    const std::string axis_label = axis == SweepAxis::Delta ? R"(\Delta/\omega)"
                                   : axis == SweepAxis::Chi ? R"(\chi = g/\omega)"
                                                            : R"(\bar n)";
    auto script_path = csv_path;
    script_path.replace_filename(csv_path.stem().string() + "_plot.py");
    std::ofstream py(script_path);
    if (!py) throw std::runtime_error("cannot write " + script_path.string());
    py << R"(#!/usr/bin/env python3
"""Plot a sweep table: mean quanta numbers and equal-time correlations."""
import csv
import sys
from collections import defaultdict

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

CSV_PATH = ")" << csv_path.filename().string() << R"("
AXIS_LABEL = r"$)" << axis_label << R"($"


def load(path):
    curves = defaultdict(lambda: defaultdict(list))
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            if row["converged"] != "true":
                continue
            key = (row["nbar"], row["order_N"])
            for name in ("axis_value", "mean_photon", "mean_phonon", "g2_a", "g2_b", "g3_b", "g4_b"):
                cell = row[name]
                curves[key][name].append(float(cell) if cell else float("nan"))
    return curves


def panel(ax, curves, column, ylabel):
    for (nbar, order), data in sorted(curves.items()):
        ax.plot(data["axis_value"], data[column], label=rf"$\bar n$={nbar}, N={order}")
    ax.set_xlabel(AXIS_LABEL)
    ax.set_ylabel(ylabel)
    ax.legend(fontsize="small")


def main():
    path = sys.argv[1] if len(sys.argv) > 1 else CSV_PATH
    curves = load(path)
    fig, axes = plt.subplots(2, 2, figsize=(10, 8))
    panel(axes[0][0], curves, "mean_photon", r"$\langle n\rangle$")
    panel(axes[0][1], curves, "mean_phonon", r"$\langle m\rangle$")
    panel(axes[1][0], curves, "g2_a", r"$g^{(2)}_a(0)$")
    panel(axes[1][1], curves, "g2_b", r"$g^{(2)}_b(0)$")
    fig.tight_layout()
    out = path.rsplit(".", 1)[0] + ".png"
    fig.savefig(out, dpi=150)
    print(out)


if __name__ == "__main__":
    main()
)";
    if (!py) throw std::runtime_error("error while writing " + script_path.string());
    return script_path;
}

} // namespace multiphonon
